//! Calibration run behind the frozen finite-`n` thresholds: the reference
//! experiment (d = 2, α = 2, λ = 1, n = 10^5, 2000 trials, β ∈ {-1, 0, 1})
//! under ten master seeds, and ten strong-law trajectories to n = 2^20.
//!
//! Usage: `cargo run --release -p lnnd-core --example calibrate_thresholds [seeds]`

use lnnd::experiments::{simulate, strong_law_track, ExperimentConfig};
use lnnd::{ModelParams, SamplingMode};

fn main() {
    let seeds: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed count"))
        .unwrap_or(10);
    let params = ModelParams::new(2, 1.0, 2.0).unwrap();
    let mut ks_max: f64 = 0.0;
    for seed in 1..=seeds {
        let cfg = ExperimentConfig::new(
            params,
            vec![100_000],
            2000,
            vec![-1.0, 0.0, 1.0],
            SamplingMode::Binomial,
            seed,
        )
        .unwrap();
        let (_, s) = simulate(&cfg).unwrap();
        let size = &s.per_n[0];
        ks_max = ks_max.max(size.ks_to_gumbel);
        print!(
            "seed {seed:2}: ks_to_gumbel {:.4}  ks_ball_mass_constant {:.4}",
            size.ks_to_gumbel, size.ks_ball_mass_constant
        );
        for b in &s.per_beta {
            print!(
                " | beta {:+}: mean {:.3} oracle {:.3} disp {:.3} gof_p {:.3} p0 {:.4}/{:.4}",
                b.beta,
                b.mean_w,
                b.oracle_e_w,
                b.dispersion_index.unwrap_or(f64::NAN),
                b.gof.map_or(f64::NAN, |g| g.p_value),
                b.p_empty,
                b.oracle_p_empty
            );
        }
        println!();
    }
    println!("max ks_to_gumbel over {seeds} seeds: {ks_max:.6}");

    let (mut lo, mut hi, mut late_max) = (f64::INFINITY, 0.0f64, 0.0f64);
    for seed in 1..=seeds {
        let track = strong_law_track(&params, 1 << 20, seed).unwrap();
        let last = track.last().unwrap().1;
        let late = track
            .iter()
            .filter(|(n, _)| *n >= 1 << 14)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max);
        lo = lo.min(last);
        hi = hi.max(last);
        late_max = late_max.max(late);
        println!("track seed {seed:2}: final {last:.4}  max after 2^14 {late:.4}");
    }
    println!("final ratio range [{lo:.4}, {hi:.4}], max after 2^14 {late_max:.4}");
}
