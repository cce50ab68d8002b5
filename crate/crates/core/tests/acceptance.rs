//! Acceptance criteria. Each test prints one `AC-k PASS|FAIL` line with the
//! measured quantities, then asserts.
//!
//! Run with `cargo test -p lnnd-core --test acceptance -- --nocapture` to see
//! the report lines.

use std::path::PathBuf;
use std::sync::OnceLock;

use lnnd::experiments::{
    containment_fraction, shell_hit_fraction, simulate, strong_law_track, write_outputs,
    ExperimentConfig, RecordSet, SummaryStats, DISPERSION_BAND, GOF_MIN_P, KS_ENVELOPE,
    MEAN_SE_MULTIPLE, P_EMPTY_TOLERANCE, RECORDS_FILE, SUMMARY_FILE,
};
use lnnd::geometry::{nn_distances, nn_distances_brute};
use lnnd::model::{
    ball_mass_limit_constant, critical_radius, limit_constant, normalizing_constant, sequence_a,
};
use lnnd::quadrature::{ball_measure, ball_measure_bounds, expected_isolated, W2Reading};
use lnnd::sampler::sample_cloud;
use lnnd::{ModelParams, SamplingMode};

fn report(id: &str, pass: bool, detail: &str) {
    println!("{id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn gaussian() -> ModelParams {
    ModelParams::new(2, 1.0, 2.0).unwrap()
}

fn reference_config() -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.json");
    ExperimentConfig::load(&path).unwrap()
}

fn reference_run() -> &'static (RecordSet, SummaryStats) {
    static RUN: OnceLock<(RecordSet, SummaryStats)> = OnceLock::new();
    RUN.get_or_init(|| simulate(&reference_config()).unwrap())
}

const REFERENCE: &[(usize, f64, f64, &str, &str)] = &include!("data/reference_constants.in");

#[test]
fn ac01_constants_match_high_precision_reference() {
    let mut worst: f64 = 0.0;
    for &(d, alpha, lambda, a_ref, c_ref) in REFERENCE {
        let p = ModelParams::new(d, lambda, alpha).unwrap();
        let a: f64 = a_ref.parse().unwrap();
        let c: f64 = c_ref.parse().unwrap();
        worst = worst
            .max((normalizing_constant(&p) - a).abs() / a)
            .max((limit_constant(&p) - c).abs() / c);
    }
    let pass = worst <= 1e-12 && REFERENCE.len() == 27;
    report(
        "AC-1",
        pass,
        &format!("{} triples, max relative error {worst:.3e} (tol 1e-12)", REFERENCE.len()),
    );
    assert!(pass);
}

#[test]
fn ac02_ball_measure_at_origin_matches_closed_form() {
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 1.0, 2.0] {
        let p = ModelParams::new(2, lambda, 2.0).unwrap();
        for r in [0.1, 0.5, 1.0, 2.0, 3.0] {
            let exact = 1.0 - (-lambda * r * r).exp();
            worst = worst.max((ball_measure(&p, 0.0, r).unwrap().value - exact).abs());
        }
    }
    let pass = worst <= 1e-10;
    report("AC-2", pass, &format!("max abs error {worst:.3e} (tol 1e-10)"));
    assert!(pass);
}

#[test]
fn ac03_ball_measure_sandwich_and_leading_term() {
    let grid: Vec<f64> = (3..=12).map(|k| 10f64.powi(k)).collect();
    let mut sandwich_ok = true;
    let mut ratio_ok = true;
    let mut details = Vec::new();
    for (d, alpha, lambda) in [(2, 2.0, 1.0), (3, 2.0, 1.0), (2, 1.0, 1.0), (2, 3.0, 1.0)] {
        let p = ModelParams::new(d, lambda, alpha).unwrap();
        let mut inside = Vec::new();
        let mut gaps = Vec::new();
        for &n in &grid {
            let rho = (sequence_a(&p, n).unwrap() / lambda).powf(1.0 / alpha);
            let r = critical_radius(&p, n, 0.0).unwrap();
            let i = ball_measure(&p, rho, r).unwrap().value;
            let b = ball_measure_bounds(&p, rho, r, W2Reading::Corrected).unwrap();
            inside.push(b.lower <= i && i <= b.upper);
            gaps.push((i / (b.h * b.gamma_factor) - 1.0).abs());
        }
        let first = inside.iter().position(|&ok| ok);
        let holds = first.is_some_and(|k| inside[k..].iter().all(|&ok| ok));
        let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
        let last = *gaps.last().unwrap();
        sandwich_ok &= holds;
        ratio_ok &= monotone && last < 0.1;
        details.push(format!(
            "({d},{alpha},{lambda}): sandwich from n=1e{} {}, |I/(HΓ)-1| monotone={monotone} at 1e12 = {last:.4}",
            first.map_or(-1, |k| k as i64 + 3),
            if holds { "holds" } else { "broken" },
        ));
    }
    let pass = sandwich_ok && ratio_ok;
    report(
        "AC-3",
        pass,
        &format!(
            "sandwich {} ; ratio<0.1 {} ; {}",
            if sandwich_ok { "ok" } else { "fails" },
            if ratio_ok { "ok" } else { "fails" },
            details.join(" ; ")
        ),
    );
    assert!(sandwich_ok, "sandwich bounds violated");
    assert!(ratio_ok, "leading-term ratio did not reach 0.1 by n = 1e12");
}

#[test]
fn ac04_palm_integral_approaches_its_limit() {
    let p = gaussian();
    let mut pass = true;
    let mut details = Vec::new();
    for beta in [-1.0f64, 0.0, 1.0] {
        let limit = (-beta).exp() / limit_constant(&p);
        let corrected = (-beta).exp() / ball_mass_limit_constant(&p);
        let errs: Vec<f64> = [1e4, 1e6, 1e8, 1e10]
            .iter()
            .map(|&n| {
                let r = critical_radius(&p, n, beta).unwrap();
                let e = expected_isolated(&p, n, r, SamplingMode::Poisson).unwrap().value;
                (e - limit).abs() / limit
            })
            .collect();
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        let last = *errs.last().unwrap();
        pass &= decreasing && last < 0.2;
        let e10 = (1.0 + errs[3]) * limit;
        details.push(format!(
            "β={beta}: rel err {:?} decreasing={decreasing} (E[W] at 1e10 ≈ {e10:.4}, limit {limit:.4}, with C_d/α^d {corrected:.4})",
            errs.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>()
        ));
    }
    report("AC-4", pass, &details.join(" ; "));
    assert!(pass);
}

#[test]
fn ac05_isolated_counts_are_poisson_with_oracle_mean() {
    let (_, s) = reference_run();
    let n = reference_config().n_values[0];
    let b = s.beta(n, 0.0).unwrap();
    let se = b.std_err.unwrap();
    let mean_ok = (b.mean_w - b.oracle_e_w).abs() <= MEAN_SE_MULTIPLE * se;
    let index = b.dispersion_index.unwrap();
    let disp_ok = (DISPERSION_BAND.0..=DISPERSION_BAND.1).contains(&index);
    let p = b.gof.map(|g| g.p_value).unwrap_or(f64::NAN);
    let gof_ok = p > GOF_MIN_P;
    let pass = mean_ok && disp_ok && gof_ok;
    report(
        "AC-5",
        pass,
        &format!(
            "n={n} M={} β=0: (a) mean_W {:.4} vs oracle {:.4}, {:.2} SE {} ; (b) dispersion {index:.4} {} ; (c) GOF p {p:.3e} {}",
            b.trials,
            b.mean_w,
            b.oracle_e_w,
            (b.mean_w - b.oracle_e_w).abs() / se,
            if mean_ok { "ok" } else { "fails" },
            if disp_ok { "ok" } else { "fails" },
            if gof_ok { "ok" } else { "fails" },
        ),
    );
    assert!(mean_ok, "mean outside 3 standard errors");
    assert!(disp_ok, "dispersion index outside band");
    assert!(gof_ok, "chi-square goodness of fit rejects Po(oracle mean)");
}

#[test]
fn ac06_empty_graph_probability_and_gumbel_distance() {
    let (_, s) = reference_run();
    let n = reference_config().n_values[0];
    let mut pass = true;
    let mut details = Vec::new();
    for beta in [-1.0, 0.0, 1.0] {
        let b = s.beta(n, beta).unwrap();
        let gap = (b.p_empty - b.oracle_p_empty).abs();
        pass &= gap <= P_EMPTY_TOLERANCE;
        details.push(format!(
            "β={beta}: p_empty {:.4} vs exp(-E W) {:.4} (gap {gap:.4})",
            b.p_empty, b.oracle_p_empty
        ));
    }
    let size = s.size(n).unwrap();
    let ks_ok = size.ks_to_gumbel <= KS_ENVELOPE;
    pass &= ks_ok;
    details.push(format!(
        "KS(gumbel_T) {:.4} vs envelope {KS_ENVELOPE} ; KS with C_d/α^d recentering {:.4}",
        size.ks_to_gumbel, size.ks_ball_mass_constant
    ));
    report("AC-6", pass, &details.join(" ; "));
    assert!(pass);
}

#[test]
fn ac07_strong_law_trajectories_stay_in_band() {
    let p = gaussian();
    let mut pass = true;
    let mut finals = Vec::new();
    let mut late_max: f64 = 0.0;
    for seed in 101..=110 {
        let track = strong_law_track(&p, 1 << 20, seed).unwrap();
        let last = track.last().unwrap().1;
        let late = track
            .iter()
            .filter(|(n, _)| *n >= 1 << 14)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max);
        pass &= (0.3..=1.5).contains(&last) && late <= 2.0;
        late_max = late_max.max(late);
        finals.push(format!("{last:.3}"));
    }
    report(
        "AC-7",
        pass,
        &format!("final ratios {finals:?} (need [0.3, 1.5]), max after 2^14 {late_max:.3} (need ≤ 2)"),
    );
    assert!(pass);
}

#[test]
fn ac08_containment_and_shell() {
    let p = gaussian();
    let base = ExperimentConfig::new(p, vec![100_000], 500, vec![0.0], SamplingMode::Binomial, 808)
        .unwrap();
    let (contain, _) = simulate(&base.clone().with_containment(2.0 * p.alpha()).unwrap()).unwrap();
    let contained = containment_fraction(&contain.records).unwrap();
    let (shell, _) = simulate(&base.with_containment(-1.0).unwrap()).unwrap();
    let hit = shell_hit_fraction(&shell.records).unwrap();
    let pass = contained >= 0.95 && hit >= 0.95;
    report(
        "AC-8",
        pass,
        &format!(
            "n=1e5 M=500: contained at c=2α {contained:.4} {} ; shell hit at c=-1 {hit:.4} {}",
            if contained >= 0.95 { "ok" } else { "fails" },
            if hit >= 0.95 { "ok" } else { "fails" },
        ),
    );
    assert!(contained >= 0.95, "containment fraction below 0.95");
    assert!(hit >= 0.95, "shell hit fraction below 0.95");
}

#[test]
fn ac09_kd_tree_matches_brute_force_exactly() {
    let sizes = [10u64, 100, 1000];
    let mut mismatches = 0;
    for k in 0..200u64 {
        let d = 2 + (k % 3) as usize;
        let n = sizes[(k / 3 % 3) as usize];
        let alpha = [0.7, 1.0, 2.0, 3.0][(k % 4) as usize];
        let p = ModelParams::new(d, 1.0, alpha).unwrap();
        let cloud = sample_cloud(&p, n, SamplingMode::Binomial, 9000 + k);
        if nn_distances(&cloud).unwrap() != nn_distances_brute(&cloud).unwrap() {
            mismatches += 1;
        }
    }
    report("AC-9", mismatches == 0, &format!("200 clouds, {mismatches} mismatches"));
    assert_eq!(mismatches, 0);
}

#[test]
fn ac10_reference_run_is_byte_identical() {
    let (set, summary) = reference_run();
    let first = tempfile::tempdir().unwrap();
    write_outputs(first.path(), set, summary).unwrap();
    let (set2, summary2) = simulate(&reference_config()).unwrap();
    let second = tempfile::tempdir().unwrap();
    write_outputs(second.path(), &set2, &summary2).unwrap();
    let same = |name: &str| {
        std::fs::read(first.path().join(name)).unwrap() == std::fs::read(second.path().join(name)).unwrap()
    };
    let pass = same(RECORDS_FILE) && same(SUMMARY_FILE);
    report("AC-10", pass, &format!("{RECORDS_FILE} and {SUMMARY_FILE} identical across runs: {pass}"));
    assert!(pass);
}
