//! Adaptive quadrature on a finite interval, built on the 21-point
//! Gauss–Kronrod rule.
//!
//! The caller supplies an ordered list of breakpoints; each gap becomes an
//! initial segment. Segments are split at their midpoint, worst error first,
//! until the summed error estimate meets `max(abs_tol, rel_tol·|total|)` or
//! the subdivision budget runs out. The final value is accumulated in
//! left-to-right segment order so the result does not depend on the order in
//! which segments happened to be refined.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 21-point Gauss-Kronrod abscissae/weights (positive half; rule is symmetric).
#[allow(clippy::excessive_precision)]
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
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Value and error estimate for one integral.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Worst error first; ties broken by left endpoint for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrate `f` over the interval spanned by `breakpoints` (ascending,
/// at least two entries). Non-finite integrand values are reported as a
/// domain error rather than propagated as NaN.
pub(crate) fn adaptive_gk21(
    f: &dyn Fn(f64) -> f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: u32,
    what: &'static str,
) -> Result<QuadResult> {
    assert!(breakpoints.len() >= 2, "need at least one segment");

    let mut heap = BinaryHeap::new();
    for pair in breakpoints.windows(2) {
        heap.push(rule_gk21(f, pair[0], pair[1])?);
    }

    let mut splits = 0u32;
    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= abs_tol.max(rel_tol * total.abs()) {
            // Deterministic left-to-right accumulation.
            let mut segments: Vec<Segment> = heap.into_vec();
            segments.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = segments.iter().map(|s| s.value).sum();
            let error = segments.iter().map(|s| s.error).sum();
            return Ok(QuadResult { value, error });
        }
        if splits >= max_subdivisions {
            return Err(Error::QuadratureBudget {
                what,
                achieved: total_error,
                needed: abs_tol.max(rel_tol * total.abs()),
            });
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept what we have.
            heap.push(worst);
            let mut segments: Vec<Segment> = heap.into_vec();
            segments.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = segments.iter().map(|s| s.value).sum();
            let error = segments.iter().map(|s| s.error).sum();
            return Ok(QuadResult { value, error });
        }
        heap.push(rule_gk21(f, worst.a, mid)?);
        heap.push(rule_gk21(f, mid, worst.b)?);
        splits += 1;
    }
}

/// One application of the 21-point rule on [a, b].
fn rule_gk21(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain("integrand returned a non-finite value", x))
        }
    };

    let f_center = eval(center)?;
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut values = [0.0f64; 21];
    values[10] = f_center;

    for j in 0..10 {
        let dx = half * XGK[j];
        let f_lo = eval(center - dx)?;
        let f_hi = eval(center + dx)?;
        values[j] = f_lo;
        values[20 - j] = f_hi;
        kronrod += WGK[j] * (f_lo + f_hi);
        res_abs += WGK[j] * (f_lo.abs() + f_hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f_lo + f_hi);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((values[j] - mean).abs() + (values[20 - j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let raw = ((kronrod - gauss) * half).abs();
    let mut error = raw;
    if res_asc != 0.0 && raw != 0.0 {
        let scale = (200.0 * raw / res_asc).powf(1.5);
        error = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    let round_off = 50.0 * f64::EPSILON * res_abs;
    if round_off > error {
        error = round_off;
    }

    Ok(Segment { a, b, value, error })
}
