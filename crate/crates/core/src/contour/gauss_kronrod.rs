//! Adaptive 21-point Gauss–Kronrod quadrature for complex-valued integrands
//! of a real parameter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{QuadSettings, QuadratureResult};
use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
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
    0.123_491_976_262_065_851_077_600_525_452_564,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights paired with XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
}

/// One GK21 application on `[a, b]`; the error follows the QUADPACK scaling.
pub(crate) fn gk21<F>(f: &F, a: f64, b: f64) -> Panel
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    let mut abs_sum = fc.norm() * WGK[10];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        *slot = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[10];
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[j];
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error }
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Globally adaptive GK21 over `[a, b]`, seeded with the given interior
/// breakpoints and panels no wider than `max_panel`.
pub(crate) fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    max_panel: Option<f64>,
    settings: &QuadSettings,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        let (s, e) = (w[0], w[1]);
        let pieces = match max_panel {
            Some(width) if width > 0.0 => ((e - s) / width).ceil().max(1.0) as usize,
            _ => 1,
        };
        for i in 0..pieces {
            let pa = s + (e - s) * i as f64 / pieces as f64;
            let pb = if i + 1 == pieces { e } else { s + (e - s) * (i + 1) as f64 / pieces as f64 };
            heap.push(ByError(gk21(f, pa, pb)));
        }
    }
    let mut evaluations = 21 * heap.len();
    let mut bisections = 0usize;

    loop {
        let (value, error) = totals(&heap);
        let tolerance = settings.abs_tol.max(settings.rel_tol * value.norm());
        if error <= tolerance {
            return Ok(QuadratureResult { value: value * sign, error_estimate: error, evaluations });
        }
        let worst = heap.peek().map(|p| p.0).expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 1e-14 * (worst.a.abs() + worst.b.abs()).max(1.0);
        if bisections >= settings.max_subdivisions || too_narrow {
            return Err(Error::NotConverged(QuadratureResult {
                value: value * sign,
                error_estimate: error,
                evaluations,
            }));
        }
        heap.pop();
        heap.push(ByError(gk21(f, worst.a, mid)));
        heap.push(ByError(gk21(f, mid, worst.b)));
        evaluations += 42;
        bisections += 1;
    }
}

fn totals(heap: &BinaryHeap<ByError>) -> (Complex64, f64) {
    heap.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.0.value, e + p.0.error))
}
