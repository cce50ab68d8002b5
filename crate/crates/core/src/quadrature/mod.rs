//! Numerical oracles: the ball measure `I(ρ, r)`, its asymptotic sandwich,
//! and the Palm integral for the expected number of isolated vertices.

mod ball;
pub mod gauss_kronrod;
mod palm;

pub use ball::{
    ball_kernel, ball_measure, ball_measure_bounds, e_bound_constant, BallMass,
    BallMeasureBounds, W2Reading,
};
pub use gauss_kronrod::{Estimate, Integrator, Tolerance};
pub use palm::{expected_isolated, g_function, limit_n_i};
