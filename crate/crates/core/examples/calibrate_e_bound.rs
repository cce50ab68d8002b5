//! Prints `2 · sup_L |K_d(L) - Γ((d+1)/2)| · L` for `d = 2..=12`, the table
//! behind `e_bound_constant`. The supremum is taken over a log grid of `L`
//! together with the large-`L` limit `h Γ(h+2) / 2`, `h = (d-1)/2`.

use lnnd::quadrature::ball_kernel;
use statrs::function::gamma::gamma;

fn main() {
    for d in 2..=12usize {
        let g = gamma((d as f64 + 1.0) / 2.0);
        let mut worst: f64 = 0.0;
        let mut arg = 0.0;
        for k in 0..=7000 {
            let l = 10f64.powf(-3.0 + k as f64 * 1e-3);
            let gap = (ball_kernel(d, l).expect("kernel quadrature") - g).abs() * l;
            if gap > worst {
                worst = gap;
                arg = l;
            }
        }
        let h = (d as f64 - 1.0) / 2.0;
        let tail = h * gamma(h + 2.0) / 2.0;
        if tail > worst {
            worst = tail;
            arg = f64::INFINITY;
        }
        println!("d={d:2}  sup={worst:.6e}  at L={arg:.4e}  constant={:.17e}", 2.0 * worst);
    }
}
