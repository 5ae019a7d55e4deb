//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature over an initial
//! panel partition.
//!
//! Improper integrals are handled by the callers: each one cuts its range
//! where an analytic envelope of the integrand drops below
//! [`QuadratureSpec::tail_cut`] and attaches the integral of that envelope
//! beyond the cut as `tail_bound`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::sum::Neumaier;

/// Tolerances and limits shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_panel_depth: u32,
    /// Hard cap on the number of live panels.
    pub max_panels: usize,
    /// Integrand-envelope level below which infinite ranges are cut.
    pub tail_cut: f64,
    /// Largest admissible zero-truncation tail of Φ, relative to Φ(1, t, τ).
    pub zero_tail_rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_panel_depth: 40,
            max_panels: 400_000,
            tail_cut: 1e-11,
            zero_tail_rel_tol: 2e-2,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            rel_tol,
            tail_cut: abs_tol / 10.0,
            ..Default::default()
        }
    }
}

/// Value of a definite integral with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Integral {
    pub value: f64,
    /// Kronrod error estimate summed over panels.
    pub error: f64,
    /// Certified bound on the mass outside the integrated range.
    pub tail_bound: f64,
    pub panels: usize,
}

impl Integral {
    pub fn budget(&self) -> f64 {
        self.error + self.tail_bound
    }

    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail_bound += tail;
        self
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_479,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// One G10/K21 panel: (kronrod value, error estimate).
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let pair = f1 + f2;
        res_k += WGK[j] * pair;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrate `f` over the union of the panels given by consecutive entries
/// of `partition` (which must be nondecreasing).
pub fn integrate<F: Fn(f64) -> f64>(f: F, partition: &[f64], spec: &QuadratureSpec) -> Result<Integral> {
    if partition.len() < 2 {
        return Ok(Integral::default());
    }
    if partition.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(LabError::InvalidArgument(
            "quadrature partition must be nondecreasing and finite".into(),
        ));
    }
    let mut heap = BinaryHeap::with_capacity(partition.len() * 2);
    let mut frozen: Vec<Panel> = Vec::new();
    let mut total_err = 0.0;
    let mut total_val = Neumaier::new();
    for w in partition.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, err) = gk21(&f, w[0], w[1]);
        total_err += err;
        total_val.add(value);
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            err,
            depth: 0,
        });
    }
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * total_val.value().abs());
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= spec.max_panel_depth || heap.len() + frozen.len() >= spec.max_panels {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        total_err += e1 + e2 - worst.err;
        total_val.add(v1);
        total_val.add(v2);
        total_val.add(-worst.value);
        for (a, b, value, err) in [(worst.a, mid, v1, e1), (mid, worst.b, v2, e2)] {
            heap.push(Panel {
                a,
                b,
                value,
                err,
                depth: worst.depth + 1,
            });
        }
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).collect::<Neumaier>().value();
    let error = panels.iter().map(|p| p.err).collect::<Neumaier>().value();
    if !value.is_finite() {
        return Err(LabError::QuadratureFailure("non-finite integrand".into()));
    }
    let target = spec.abs_tol.max(spec.rel_tol * value.abs());
    if error > target {
        return Err(LabError::QuadratureFailure(format!(
            "error estimate {error:e} above target {target:e} after {} panels",
            panels.len()
        )));
    }
    Ok(Integral {
        value,
        error,
        tail_bound: 0.0,
        panels: panels.len(),
    })
}

/// `n` equal panels on `[a, b]`.
pub fn uniform_partition(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut out: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    out.push(b);
    out
}

/// Partition of `[center - reach, center + reach]` with panel widths growing
/// geometrically away from `center`, starting at `first`.
pub fn geometric_partition(center: f64, first: f64, reach: f64, ratio: f64) -> Vec<f64> {
    let mut right = vec![0.0];
    let mut width = first;
    let mut x = 0.0;
    while x < reach {
        x = (x + width).min(reach);
        right.push(x);
        width *= ratio;
    }
    let mut out: Vec<f64> = right.iter().rev().map(|d| center - d).collect();
    out.extend(right.iter().skip(1).map(|d| center + d));
    out
}

/// Merge several sorted partitions into one sorted, deduplicated partition.
pub fn merge_partitions(parts: &[Vec<f64>]) -> Vec<f64> {
    let mut all: Vec<f64> = parts.iter().flatten().copied().collect();
    all.sort_by(|a, b| a.total_cmp(b));
    all.dedup();
    all
}
