//! Exact identities linking F(X, T, τ) to integrals over zeros.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::quad::{geometric_partition, integrate, merge_partitions, uniform_partition, Integral, QuadratureSpec};
use crate::sum::Execution;
use crate::zerodata::{SignedZeroWindow, ZeroOrdinates};

use super::{band_pair_sum, f_tau, phases, w, PairCorrParams};

/// ∫ dt/[(1+τ²(t−γ)²)(1+τ²(t−γ')²)] by quadrature against (π/2τ)·w(τ(γ−γ')).
pub fn residue_identity_check(gamma: f64, gamma_p: f64, tau: f64, q: &QuadratureSpec) -> Result<(Integral, f64)> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(LabError::InvalidArgument(format!("tau = {tau} outside (0, 1]")));
    }
    let tau2 = tau * tau;
    let integrand = |t: f64| {
        let a = t - gamma;
        let b = t - gamma_p;
        1.0 / ((1.0 + tau2 * a * a) * (1.0 + tau2 * b * b))
    };
    let center = 0.5 * (gamma + gamma_p);
    let half_gap = 0.5 * (gamma - gamma_p).abs();
    // Beyond distance c from both peaks the integrand is below 1/(τ⁴u⁴).
    let c = (2.0 / (3.0 * tau2 * tau2 * q.tail_cut)).cbrt();
    let reach = half_gap + c;
    let tail = 2.0 / (3.0 * tau2 * tau2 * c * c * c);
    let first = 0.25 / tau;
    let partition = merge_partitions(&[
        geometric_partition(center, first, reach, 1.3),
        geometric_partition(gamma, first, half_gap + first, 1.3),
        geometric_partition(gamma_p, first, half_gap + first, 1.3),
    ]);
    let partition: Vec<f64> = partition
        .into_iter()
        .filter(|t| (t - center).abs() <= reach)
        .collect();
    let lhs = integrate(integrand, &partition, q)?.with_tail(tail);
    let rhs = PI / (2.0 * tau) * w(tau * (gamma - gamma_p));
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauFCheck {
    pub lhs: Integral,
    pub rhs: f64,
}

/// ∫ |Σ_{|γ|≤T} X^{iγ}e^{iγv}|² e^{−2|v|/τ} dv against τ·F(X, T, τ).
pub fn tau_f_integral_check(win: &SignedZeroWindow<'_>, x: f64, tau: f64, q: &QuadratureSpec) -> Result<TauFCheck> {
    if win.is_empty() {
        return Err(LabError::InvalidArgument("empty zero window".into()));
    }
    let p = PairCorrParams::new(x, win.height(), tau, 0.0)?;
    let rhs = tau * f_tau(win, &p)?.value;
    let g = win.positives();
    let log_x = x.ln();
    // |Σ ...|² ≤ (2N)²; the two tails beyond ±V integrate to (2N)²·τ·e^{−2V/τ}.
    let mass = (2.0 * g.len() as f64).powi(2);
    let target = q.tail_cut * rhs.abs().max(1.0);
    let cut = 0.5 * tau * (mass * tau / target).ln().max(1.0);
    let tail = mass * tau * (-2.0 * cut / tau).exp();
    let freq = 2.0 * g.last().copied().unwrap_or(1.0);
    let panels = ((cut * freq / (2.0 * PI)).ceil() as usize).max(4);
    let integrand = |v: f64| {
        let mut s = 0.0;
        for gm in g {
            s += (gm * (log_x + v)).cos();
        }
        4.0 * s * s * (-2.0 * v.abs() / tau).exp()
    };
    let left = integrate(integrand, &uniform_partition(-cut, 0.0, panels), q)?;
    let right = integrate(integrand, &uniform_partition(0.0, cut, panels), q)?;
    let lhs = Integral {
        value: left.value + right.value,
        error: left.error + right.error,
        tail_bound: tail,
        panels: left.panels + right.panels,
    };
    Ok(TauFCheck { lhs, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbgCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub budget: f64,
    /// F(X, T)/τ².
    pub direct_term: f64,
    /// ((τ²−1)/τ³)·∫F(u, T)a(u, X, τ)² du/u.
    pub integral_term: f64,
    /// Smallest band-limited F(u, T) met at a quadrature node.
    pub min_node_value: f64,
    /// Decimal digits lost to cancellation between the two terms.
    pub cancellation_digits: f64,
    pub evaluations: usize,
}

impl HbgCheck {
    /// More than six digits cancelled.
    pub fn cancellation_flagged(&self) -> bool {
        self.cancellation_digits > 6.0
    }
}

/// Pair-difference band kept inside the u-integral.
pub const HBG_BAND: f64 = 100.0;

/// Both sides of the Heath-Brown–Goldston relation between F(X, T, τ) and
/// F(·, T).
///
/// With u = X·e^y the weight a(u, X, τ)² becomes e^{−2|y|/τ}. The integrand
/// keeps the pairs with |Δ| ≤ [`HBG_BAND`], which makes it band limited; the
/// dropped pairs integrate to at most
/// w(D)·|∫_{−Y}^{Y} e^{iΔy}e^{−2|y|/τ} dy| ≤ w(D)·2(α + e^{−αY}(α + |Δ|))/(α² + D²)
/// each, with α = 2/τ.
pub fn hbg_identity_check(zeros: &ZeroOrdinates, x: f64, t: f64, tau: f64, q: &QuadratureSpec) -> Result<HbgCheck> {
    let win = zeros.window(t)?;
    let lhs = f_tau(&win, &PairCorrParams::new(x, t, tau, 0.0)?)?.value;
    let plain = f_tau(&win, &PairCorrParams::new(x, t, 1.0, 0.0)?)?.value;
    let direct_term = plain / (tau * tau);
    let coeff = (tau * tau - 1.0) / (tau * tau * tau);
    if coeff == 0.0 {
        return Ok(HbgCheck {
            lhs,
            rhs: plain,
            budget: 0.0,
            direct_term,
            integral_term: 0.0,
            min_node_value: plain,
            cancellation_digits: 0.0,
            evaluations: 0,
        });
    }
    let g = win.positives();
    let n = g.len() as u64;
    let alpha = 2.0 / tau;
    let band = HBG_BAND;
    let unit = f_tau(&win, &PairCorrParams::new(1.0, t, 1.0, 0.0)?)?.value;
    // ∫_{|y|>Y} |F(u,T)|e^{−α|y|} ≤ F(1,T)·τ·e^{−αY}.
    let tail_target = 1e-6 * lhs.abs().max(1.0);
    let reach = ((unit * tau / tail_target).ln() / alpha).max(1.0);
    let tail = unit * tau * (-alpha * reach).exp();

    let log_x = x.ln();
    let min_node = Cell::new(f64::INFINITY);
    let evaluations = Cell::new(0usize);
    let kept = Cell::new(0u64);
    let integrand = |y: f64| {
        let (c, s) = phases(g, log_x + y);
        let (v, pairs) = band_pair_sum(g, &c, &s, 1.0, band, Execution::Serial);
        min_node.set(min_node.get().min(v));
        evaluations.set(evaluations.get() + 1);
        kept.set(pairs);
        v * (-alpha * y.abs()).exp()
    };
    let panels = ((reach * band / (4.0 * PI)).ceil() as usize).max(4);
    let left = integrate(integrand, &uniform_partition(-reach, 0.0, panels), q)?;
    let right = integrate(integrand, &uniform_partition(0.0, reach, panels), q)?;
    let integral = left.value + right.value;
    let skipped = (4 * n * n - kept.get()) as f64;
    let max_gap = 2.0 * t;
    let truncation = skipped * w(band) * 2.0 * (alpha + (-alpha * reach).exp() * (alpha + max_gap))
        / (alpha * alpha + band * band);
    let integral_term = coeff * integral;
    let rhs = direct_term + integral_term;
    let scale = direct_term.abs().max(integral_term.abs());
    let rounding = 64.0 * f64::EPSILON * (scale + unit);
    let budget = coeff.abs() * (left.error + right.error + tail + truncation) + rounding;
    Ok(HbgCheck {
        lhs,
        rhs,
        budget,
        direct_term,
        integral_term,
        min_node_value: min_node.get(),
        cancellation_digits: (scale / rhs.abs()).log10().max(0.0),
        evaluations: evaluations.get(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::with_tolerances(1e-12, 1e-12)
    }

    #[test]
    fn residue_classical_integral() {
        let (lhs, rhs) = residue_identity_check(0.0, 0.0, 1.0, &spec()).unwrap();
        assert!((rhs - PI / 2.0).abs() < 1e-15);
        assert!((lhs.value - rhs).abs() < 1e-9);
    }

    #[test]
    fn residue_two_peaks() {
        let (lhs, rhs) = residue_identity_check(0.0, 10.0, 0.5, &spec()).unwrap();
        assert!((rhs - 4.0 * PI / 29.0).abs() < 1e-15);
        assert!((lhs.value - rhs).abs() < 1e-9);
        let (swapped, rhs2) = residue_identity_check(10.0, 0.0, 0.5, &spec()).unwrap();
        assert!((swapped.value - lhs.value).abs() < 1e-12);
        assert_eq!(rhs, rhs2);
    }

    #[test]
    fn tau_f_single_zero() {
        let g = [14.134725141734694];
        let win = SignedZeroWindow::new(&g, 20.0).unwrap();
        let x: f64 = 10.0;
        let tau = 1.0;
        let check = tau_f_integral_check(&win, x, tau, &spec()).unwrap();
        // 4∫cos²(γ(L+v))e^{−2|v|/τ} = 2τ + 2τ·cos(2γL)·w(2τγ).
        let gamma = g[0];
        let closed = 2.0 * tau + 2.0 * tau * (2.0 * gamma * x.ln()).cos() * w(2.0 * tau * gamma);
        assert!((check.rhs - closed).abs() < 1e-13);
        assert!((check.lhs.value - closed).abs() < 1e-8 * closed);
    }
}
