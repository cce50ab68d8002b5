//! Globally adaptive 21-point Gauss–Kronrod quadrature.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1); odd entries are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_837_935_494,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One 21-point Kronrod panel with its embedded Gauss error estimate.
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let w = half.abs();
    Panel {
        a,
        b,
        value: res_k * half,
        error: rescale_error((res_k - res_g) * half, res_abs * w, res_asc * w),
    }
}

/// Adaptive integrator: bisects the panel with the largest error estimate
/// until the summed error meets the tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tolerance: Tolerance,
    pub max_panels: usize,
}

impl Integrator {
    pub const fn new(tolerance: Tolerance) -> Self {
        Self {
            tolerance,
            max_panels: 2000,
        }
    }

    pub const fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Integrates over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[breaks[0], breaks[last]]` starting from the panels
    /// delimited by the (sorted) `breaks`.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        breaks: &[f64],
    ) -> Result<Estimate> {
        assert!(breaks.len() >= 2, "need at least one panel");
        let mut heap = BinaryHeap::with_capacity(breaks.len() + 16);
        let mut evaluations = 0;
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                heap.push(gk21(&mut f, w[0], w[1]));
                evaluations += 21;
            }
        }
        let total = |h: &BinaryHeap<Panel>| -> (f64, f64) {
            h.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
        };
        let (mut value, mut error) = total(&heap);
        let mut refinements = 0;
        while error > self.tolerance.target(value) {
            if heap.len() >= self.max_panels {
                return Err(Error::Quadrature {
                    achieved: error,
                    requested: self.tolerance.target(value),
                    evaluations,
                });
            }
            let worst = heap.pop().expect("nonempty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                return Err(Error::Quadrature {
                    achieved: error,
                    requested: self.tolerance.target(value),
                    evaluations,
                });
            }
            let left = gk21(&mut f, worst.a, mid);
            let right = gk21(&mut f, mid, worst.b);
            evaluations += 42;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            refinements += 1;
            // re-sum periodically so incremental updates don't drift
            if refinements % 64 == 0 {
                (value, error) = total(&heap);
            }
        }
        let (value, error) = total(&heap);
        Ok(Estimate {
            value,
            error,
            evaluations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_rule_is_exact_to_degree_31() {
        for k in 0..=31 {
            let p = gk21(&mut |x: f64| x.powi(k), -1.0, 1.0);
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((p.value - exact).abs() < 1e-14, "degree {k}: {}", p.value);
        }
        let p = gk21(&mut |x: f64| x.powi(32), -1.0, 1.0);
        assert!((p.value - 2.0 / 33.0).abs() > 1e-16);
    }

    #[test]
    fn gauss_rule_is_exact_to_degree_19() {
        for k in (0..=19).step_by(2) {
            let mut g = 0.0;
            for j in 0..5 {
                let x = XGK[2 * j + 1];
                g += WG[j] * 2.0 * x.powi(k);
            }
            assert_relative_eq!(g, 2.0 / (k as f64 + 1.0), max_relative = 1e-14);
        }
        assert_relative_eq!(WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn smooth_integrals() {
        let q = Integrator::new(Tolerance::new(0.0, 1e-13));
        let e = q.integrate(f64::exp, 0.0, 1.0).unwrap();
        assert_relative_eq!(e.value, std::f64::consts::E - 1.0, max_relative = 1e-14);
        let e = q.integrate(|x: f64| x.sqrt(), 0.0, 1.0).unwrap();
        assert_relative_eq!(e.value, 2.0 / 3.0, max_relative = 1e-13);
        let e = q.integrate_with_breaks(|x: f64| (-x * x).exp(), &[-30.0, 0.0, 30.0]).unwrap();
        assert_relative_eq!(e.value, std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn narrow_peak() {
        let q = Integrator::new(Tolerance::new(0.0, 1e-10));
        let s = 1e-3;
        let e = q
            .integrate(|x: f64| (-0.5 * ((x - 0.3) / s).powi(2)).exp(), 0.0, 1.0)
            .unwrap();
        assert_relative_eq!(e.value, s * (2.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let q = Integrator::new(Tolerance::new(0.0, 1e-12)).with_max_panels(4);
        let err = q.integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
