//! Zero-side kernels: the weight w, the pair sums F(X, T, τ), Φ(X, t, τ)
//! and the mean square 𝒥(X, T, τ).
//!
//! Pair sums run over positive ordinates only. With c = cos(γ·log X) and
//! s = sin(γ·log X) precomputed per zero, a same-sign pair contributes
//! (c c' + s s')·w(τ(γ−γ')) and an opposite-sign pair (c c' − s s')·w(τ(γ+γ')),
//! so the inner loop needs no transcendental calls.

pub mod identities;

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::quad::{integrate, uniform_partition, Integral, QuadratureSpec};
use crate::sum::{reduce, Accumulator, Execution, Neumaier};
use crate::zerodata::{rvm_error_bound, smooth_count, zero_density, SignedZeroWindow};

pub use identities::{
    hbg_identity_check, residue_identity_check, tau_f_integral_check, HbgCheck, TauFCheck,
};

/// w(u) = 4/(4 + u²).
#[inline]
pub fn w(u: f64) -> f64 {
    4.0 / (4.0 + u * u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrParams {
    pub x: f64,
    pub height: f64,
    pub tau: f64,
    /// Pairs with w(τΔ) below this are skipped; 0 keeps every pair.
    pub pair_tol: f64,
    pub exec: Execution,
}

impl PairCorrParams {
    pub fn new(x: f64, height: f64, tau: f64, pair_tol: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(LabError::InvalidArgument(format!("X = {x} must be positive")));
        }
        if !(height >= 2.0) {
            return Err(LabError::InvalidArgument(format!("T = {height} below 2")));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(LabError::InvalidArgument(format!("tau = {tau} outside (0, 1]")));
        }
        if !(0.0..1.0).contains(&pair_tol) {
            return Err(LabError::InvalidArgument(format!("pair_tol = {pair_tol} outside [0, 1)")));
        }
        Ok(PairCorrParams {
            x,
            height,
            tau,
            pair_tol,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Largest |γ − γ'| kept: (2/τ)·√(1/pair_tol − 1).
    pub fn bandwidth(&self) -> f64 {
        if self.pair_tol == 0.0 {
            f64::INFINITY
        } else {
            2.0 / self.tau * (1.0 / self.pair_tol - 1.0).sqrt()
        }
    }
}

/// A pair-correlation evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FValue {
    pub value: f64,
    /// Signed pairs summed.
    pub pairs_exact: u64,
    /// Signed pairs dropped by the bandwidth cut.
    pub pairs_skipped: u64,
    /// pair_tol · pairs_skipped.
    pub truncation_bound: f64,
}

#[derive(Default)]
struct RowTotal {
    sum: Neumaier,
    // Unordered in-band pairs: same-sign off-diagonal, opposite-sign
    // diagonal and opposite-sign off-diagonal.
    same_off: u64,
    opp_diag: u64,
    opp_off: u64,
}

impl Accumulator for RowTotal {
    fn merge(&mut self, other: Self) {
        self.sum.merge(other.sum);
        self.same_off += other.same_off;
        self.opp_diag += other.opp_diag;
        self.opp_off += other.opp_off;
    }
}

/// Unit phases (cos γL, sin γL) of the positive ordinates.
pub(crate) fn phases(positives: &[f64], log_x: f64) -> (Vec<f64>, Vec<f64>) {
    positives.iter().map(|g| (g * log_x).sin_cos()).map(|(s, c)| (c, s)).unzip()
}

fn pair_rows(g: &[f64], c: &[f64], s: &[f64], tau: f64, band: f64, rows: Range<usize>, acc: &mut RowTotal) {
    let n = g.len();
    for i in rows {
        let (gi, ci, si) = (g[i], c[i], s[i]);
        let mut same = 1.0;
        let mut j = i + 1;
        while j < n && g[j] - gi <= band {
            let d = tau * (g[j] - gi);
            same += 2.0 * (ci * c[j] + si * s[j]) * (4.0 / (4.0 + d * d));
            j += 1;
        }
        acc.same_off += (j - i - 1) as u64;
        let mut opp = 0.0;
        if 2.0 * gi <= band {
            let d = 2.0 * tau * gi;
            opp += (ci * ci - si * si) * (4.0 / (4.0 + d * d));
            acc.opp_diag += 1;
            let mut j = i + 1;
            while j < n && gi + g[j] <= band {
                let d = tau * (gi + g[j]);
                opp += 2.0 * (ci * c[j] - si * s[j]) * (4.0 / (4.0 + d * d));
                j += 1;
            }
            acc.opp_off += (j - i - 1) as u64;
        }
        acc.sum.add(same + opp);
    }
}

/// Σ over signed pairs of cos(Δ·log X)·w(τΔ) restricted to |Δ| ≤ band.
/// Returns (value, signed pairs summed).
pub(crate) fn band_pair_sum(
    g: &[f64],
    c: &[f64],
    s: &[f64],
    tau: f64,
    band: f64,
    exec: Execution,
) -> (f64, u64) {
    let total: RowTotal = reduce(g.len(), exec, |rows, acc| pair_rows(g, c, s, tau, band, rows, acc));
    let n = g.len() as u64;
    let pairs = 2 * (n + 2 * total.same_off) + 2 * (total.opp_diag + 2 * total.opp_off);
    (2.0 * total.sum.value(), pairs)
}

/// F(X, T, τ) = Σ_{−T ≤ γ, γ' ≤ T} X^{i(γ−γ')}·w(τ(γ−γ')).
pub fn f_tau(win: &SignedZeroWindow<'_>, p: &PairCorrParams) -> Result<FValue> {
    if win.height() != p.height {
        return Err(LabError::InvalidArgument(format!(
            "window height {} differs from T = {}",
            win.height(),
            p.height
        )));
    }
    let g = win.positives();
    let (c, s) = phases(g, p.x.ln());
    let (value, pairs_exact) = band_pair_sum(g, &c, &s, p.tau, p.bandwidth(), p.exec);
    let total = 4 * (g.len() as u64) * (g.len() as u64);
    let pairs_skipped = total - pairs_exact;
    Ok(FValue {
        value,
        pairs_exact,
        pairs_skipped,
        truncation_bound: p.pair_tol * pairs_skipped as f64,
    })
}

/// Montgomery's F(X, T) = F(X, T, 1), all pairs.
pub fn f(win: &SignedZeroWindow<'_>, x: f64) -> Result<FValue> {
    f_tau(win, &PairCorrParams::new(x, win.height(), 1.0, 0.0)?)
}

/// Reference evaluation over the materialized signed list.
pub fn f_tau_materialized(win: &SignedZeroWindow<'_>, x: f64, tau: f64) -> f64 {
    let list = win.signed_list();
    let log_x = x.ln();
    let mut acc = Neumaier::new();
    for a in &list {
        for b in &list {
            let d = a - b;
            acc.add((d * log_x).cos() * w(tau * d));
        }
    }
    acc.value()
}

/// Φ together with a certified bound on the zeros above the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub value: f64,
    pub tail_bound: f64,
}

// ∫_a^∞ log(u/2π)/(u − t)² du for a > t.
fn log_over_square_tail(a: f64, t: f64) -> f64 {
    let second = if (t / a).abs() < 1e-8 {
        1.0 / a
    } else {
        -(-t / a).ln_1p() / t
    };
    (a / (2.0 * PI)).ln() / (a - t) + second
}

// Bound on Σ_{γ > a} 1/(1 + τ²(γ − t)²) for a > t, a ≥ 14, from
// |N(u) − smooth_count(u)| ≤ R(u) and |R'(u)| ≤ 0.58/u.
fn decreasing_tail(a: f64, t: f64, tau: f64) -> f64 {
    let lorentz = |u: f64| 1.0 / (1.0 + tau * tau * (u - t) * (u - t));
    let tau2 = tau * tau;
    2.0 * rvm_error_bound(a) * lorentz(a)
        + log_over_square_tail(a, t) / (2.0 * PI * tau2)
        + 0.58 / (a * (a - t) * tau2)
}

/// Certified bound on Σ_{|γ| > H} 1/(1 + τ²(t − γ)²) for |t| < H.
pub fn zero_tail_bound(t: f64, tau: f64, height: f64) -> f64 {
    if t.abs() >= height {
        return f64::INFINITY;
    }
    let a = height.max(14.0);
    decreasing_tail(a, t, tau) + decreasing_tail(a, -t, tau)
}

/// Certified upper bound on Φ(1, t, τ) over all zeros.
pub fn phi_envelope(t: f64, tau: f64) -> f64 {
    let t = t.abs();
    let lower = 14.0;
    let half_line = PI / (2.0 * tau);
    // Ordinates −γ: decreasing in γ everywhere.
    let mirrored = {
        let m = 2.0 * lower + t;
        zero_density(m) * 2.0 * half_line
            + log_over_square_tail(m, -t) / (2.0 * PI * tau * tau)
            + 2.0 * rvm_error_bound(lower)
            + 0.58 / lower * 2.0 * half_line
    };
    let direct = if t <= lower {
        let m = 2.0 * lower;
        zero_density(m + t) * 2.0 * half_line
            + log_over_square_tail(m + t, t) / (2.0 * PI * tau * tau)
            + 2.0 * rvm_error_bound(lower)
            + 0.58 / lower * 2.0 * half_line
    } else {
        4.0 * rvm_error_bound(t)
            + smooth_count(lower).max(0.0)
            + zero_density(t) * half_line
            + zero_density(2.0 * t) * half_line
            + log_over_square_tail(2.0 * t, t) / (2.0 * PI * tau * tau)
            + 0.58 / t * half_line
    };
    mirrored + direct
}

/// Precomputed phases for repeated Φ(X, ·, τ) evaluations on one window.
#[derive(Debug, Clone)]
pub struct PhiKernel<'a> {
    positives: &'a [f64],
    height: f64,
    tau: f64,
    cos_l: Vec<f64>,
    sin_l: Vec<f64>,
}

impl<'a> PhiKernel<'a> {
    pub fn new(win: &SignedZeroWindow<'a>, x: f64, tau: f64) -> Self {
        let (cos_l, sin_l) = phases(win.positives(), x.ln());
        PhiKernel {
            positives: win.positives(),
            height: win.height(),
            tau,
            cos_l,
            sin_l,
        }
    }

    /// Σ_{|γ| ≤ H} X^{iγ}/(1 + τ²(t − γ)²).
    ///
    /// Written as Σ cos(γL)(a + b) + i·Σ sin(γL)(a − b) with a, b the
    /// weights of +γ and −γ, so that t ↦ −t conjugates the sum bit for bit.
    pub fn sum(&self, t: f64) -> Complex64 {
        let tau2 = self.tau * self.tau;
        let mut re = 0.0;
        let mut im = 0.0;
        for ((g, c), s) in self.positives.iter().zip(&self.cos_l).zip(&self.sin_l) {
            let dm = t - g;
            let dp = t + g;
            let a = 1.0 / (1.0 + tau2 * dm * dm);
            let b = 1.0 / (1.0 + tau2 * dp * dp);
            re += c * (a + b);
            im += s * (a - b);
        }
        Complex64::new(re, im)
    }

    pub fn eval(&self, t: f64) -> PhiValue {
        PhiValue {
            value: self.sum(t).norm(),
            tail_bound: zero_tail_bound(t, self.tau, self.height),
        }
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Smallest window height whose zero tail at `t` is below `tol`.
pub fn required_height(t: f64, tau: f64, tol: f64) -> f64 {
    let mut h = (2.0 * t.abs()).max(100.0);
    while zero_tail_bound(t, tau, h) > tol && h < 1e12 {
        h *= 1.5;
    }
    h
}

/// Check that the window supports Φ up to |t| = `t_max` at the relative
/// zero-tail tolerance of `q`.
pub fn check_height(win: &SignedZeroWindow<'_>, t_max: f64, tau: f64, q: &QuadratureSpec) -> Result<f64> {
    let tail = zero_tail_bound(t_max, tau, win.height());
    let unit = PhiKernel::new(win, 1.0, tau).sum(t_max).re.max(1.0);
    let tol = q.zero_tail_rel_tol * unit;
    if !(tail <= tol) {
        return Err(LabError::InsufficientHeight {
            required_t: required_height(t_max, tau, tol),
            tail_bound: tail,
        });
    }
    Ok(tail)
}

/// Φ(X, t, τ) from the zeros in `win`, with the certified tail for the rest.
pub fn phi(win: &SignedZeroWindow<'_>, x: f64, t: f64, tau: f64) -> Result<PhiValue> {
    check_height(win, t, tau, &QuadratureSpec::default())?;
    Ok(PhiKernel::new(win, x, tau).eval(t))
}

/// Panel width used for integrals of Φ².
pub(crate) fn phi_panel_width(tau: f64) -> f64 {
    (0.5 / tau).min(0.5)
}

/// 𝒥(X, T, τ) = 4τ∫_{−T}^{T} Φ(X, t, τ)² dt. The two halves are integrated
/// on mirrored partitions.
pub fn jcal(win: &SignedZeroWindow<'_>, x: f64, t_max: f64, tau: f64, q: &QuadratureSpec) -> Result<Integral> {
    let tail = check_height(win, t_max, tau, q)?;
    let kernel = PhiKernel::new(win, x, tau);
    let panels = (t_max / phi_panel_width(tau)).ceil() as usize;
    let right = uniform_partition(0.0, t_max, panels);
    let left: Vec<f64> = right.iter().rev().map(|t| -t).collect();
    let integrand = |t: f64| {
        let v = kernel.sum(t).norm_sqr();
        4.0 * tau * v
    };
    let a = integrate(integrand, &left, q)?;
    let b = integrate(integrand, &right, q)?;
    let value = a.value + b.value;
    // |Φ_true² − Φ²| ≤ 2Φ·tail + tail², with ∫Φ ≤ √(2T∫Φ²).
    let phi_l1 = (2.0 * t_max * value.max(0.0) / (4.0 * tau)).sqrt();
    let zero_tail = 4.0 * tau * (2.0 * tail * phi_l1 + 2.0 * t_max * tail * tail);
    Ok(Integral {
        value,
        error: a.error + b.error,
        tail_bound: zero_tail,
        panels: a.panels + b.panels,
    })
}

/// Half-range integrals of 𝒥, for the evenness check: (∫_{−T}^0, ∫_0^T).
pub fn jcal_halves(win: &SignedZeroWindow<'_>, x: f64, t_max: f64, tau: f64, q: &QuadratureSpec) -> Result<(f64, f64)> {
    check_height(win, t_max, tau, q)?;
    let kernel = PhiKernel::new(win, x, tau);
    let panels = (t_max / phi_panel_width(tau)).ceil() as usize;
    let right = uniform_partition(0.0, t_max, panels);
    let left: Vec<f64> = right.iter().rev().map(|t| -t).collect();
    let integrand = |t: f64| 4.0 * tau * kernel.sum(t).norm_sqr();
    Ok((integrate(integrand, &left, q)?.value, integrate(integrand, &right, q)?.value))
}
