//! Zero sums weighted by c(θ, ρ): the integrals I and U and the two
//! comparisons built on them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::LambdaTable;
use crate::error::{LabError, Result};
use crate::paircorr::{phi_envelope, w, zero_tail_bound, PhiKernel};
use crate::quad::{integrate, uniform_partition, Integral, QuadratureSpec};
use crate::sum::{reduce, Execution, Neumaier};
use crate::zerodata::SignedZeroWindow;

use super::{c_coeff, j_exact, kappa_of, ShortIntervalSpec};

// (sin κt / t)², continuous at t = 0.
fn sinc_sq(kappa: f64, t: f64) -> f64 {
    let u = kappa * t;
    if u.abs() < 1e-4 {
        kappa * kappa * (1.0 - u * u / 3.0)
    } else {
        let s = u.sin() / t;
        s * s
    }
}

/// I(X, τ, κ) = 4τ∫_0^∞ (sin κt/t)²·|Φ(X, t, τ)|² dt.
///
/// The quadrature runs to half the window height. The tail bound collects
/// the zeros above the window on that range and the envelope of Φ beyond
/// it, where env(t)/log t decreases.
pub fn i_integral(win: &SignedZeroWindow<'_>, x: f64, tau: f64, kappa: f64, q: &QuadratureSpec) -> Result<Integral> {
    if !(kappa > 0.0) {
        return Err(LabError::InvalidArgument(format!("kappa = {kappa} must be positive")));
    }
    if !(win.height() >= 30.0) {
        return Err(LabError::InvalidArgument(format!("window height {} below 30", win.height())));
    }
    let cut = 0.5 * win.height();
    let kernel = PhiKernel::new(win, x, tau);
    let panels = (cut / crate::paircorr::phi_panel_width(tau)).ceil() as usize;
    let integrand = |t: f64| 4.0 * tau * sinc_sq(kappa, t) * kernel.sum(t).norm_sqr();
    let body = integrate(integrand, &uniform_partition(0.0, cut, panels), q)?;

    let tail = zero_tail_bound(0.0, tau, win.height()).max(zero_tail_bound(cut, tau, win.height()));
    let weight_mass = PI * kappa / 2.0;
    let phi_l1 = (weight_mass * body.value.max(0.0) / (4.0 * tau)).sqrt();
    let window_part = 4.0 * tau * tail * (2.0 * phi_l1 + tail * weight_mass);
    let l = cut.ln();
    let env = phi_envelope(cut, tau) / l;
    let beyond = 4.0 * tau * env * env * (l * l + 2.0 * l + 2.0) / cut;
    Ok(Integral {
        value: body.value,
        error: body.error,
        tail_bound: window_part + beyond,
        panels: body.panels,
    })
}

/// (π/2)·κ·log(1/κ).
pub fn i_reference(kappa: f64) -> f64 {
    PI / 2.0 * kappa * (1.0 / kappa).ln()
}

// ∫_A^B x^{1+iδ} dx to second order in δ.
fn power_integral_series(a: f64, b: f64, delta: f64) -> Complex64 {
    let part = |x: f64| {
        let l = x.ln();
        let x2 = x * x;
        let first = x2 * (l / 2.0 - 0.25);
        let second = x2 * (l * l / 2.0 - l / 2.0 + 0.25);
        Complex64::new(x2 / 2.0 - delta * delta * second / 2.0, delta * first)
    };
    part(b) - part(a)
}

const SERIES_CUTOFF: f64 = 1e-6;

/// Parameters of U beyond the short-interval spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UParams {
    /// Zeros with γ ≤ z enter the sum.
    pub z: f64,
    pub exec: Execution,
}

fn check_z(win: &SignedZeroWindow<'_>, z: f64) -> Result<usize> {
    if z > win.height() {
        return Err(LabError::HeightExceeded {
            requested: z,
            available: win.height(),
        });
    }
    Ok(win.positives().partition_point(|&g| g <= z))
}

/// U(X, τ, θ) = ∫_X^{X(1+τ)} |Σ_{|γ|≤Z} c(θ, ρ)x^ρ|² dx in closed form.
///
/// Each pair contributes c(θ,ρ)·conj(c(θ,ρ'))·K(γ − γ') with
/// K(δ) = (B^{2+iδ} − A^{2+iδ})/(2+iδ); the powers factor over the pair so
/// only per-zero phases are exponentiated. K(−δ) = conj(K(δ)) folds the
/// four sign combinations into two real parts.
pub fn u_integral(win: &SignedZeroWindow<'_>, spec: &ShortIntervalSpec, up: &UParams) -> Result<f64> {
    let count = check_z(win, up.z)?;
    let g = &win.positives()[..count];
    let (a, b) = (spec.x, spec.upper());
    let (la, lb) = (a.ln(), b.ln());
    let span = lb - la;
    let coeff: Vec<Complex64> = g.iter().map(|&y| c_coeff(spec.theta, Complex64::new(0.5, y))).collect();
    let pa: Vec<Complex64> = g.iter().map(|&y| Complex64::from_polar(1.0, y * la)).collect();
    let pb: Vec<Complex64> = g.iter().map(|&y| Complex64::from_polar(1.0, y * lb)).collect();
    let (a2, b2) = (a * a, b * b);
    let k0 = (b2 - a2) / 2.0;

    let k_of = |num: Complex64, delta: f64| -> Complex64 {
        if delta.abs() * span < SERIES_CUTOFF {
            power_integral_series(a, b, delta)
        } else {
            num / Complex64::new(2.0, delta)
        }
    };

    let acc: Neumaier = reduce(count, up.exec, |rows, acc: &mut Neumaier| {
        for j in rows {
            let (cj, aj, bj) = (coeff[j], pa[j] * a2, pb[j] * b2);
            let mut row = 2.0 * cj.norm_sqr() * k0 + 2.0 * (cj * cj * k_of(bj * pb[j] - aj * pa[j], 2.0 * g[j])).re;
            let mut off = 0.0;
            for k in j + 1..count {
                let ck = coeff[k];
                let diff = k_of(bj * pb[k].conj() - aj * pa[k].conj(), g[j] - g[k]);
                let sum = k_of(bj * pb[k] - aj * pa[k], g[j] + g[k]);
                off += (cj * ck.conj() * diff).re + (cj * ck * sum).re;
            }
            row += 4.0 * off;
            acc.add(row);
        }
    });
    Ok(acc.value())
}

/// U by direct summation over the signed list, for cross-checking.
pub fn u_integral_materialized(win: &SignedZeroWindow<'_>, spec: &ShortIntervalSpec, z: f64) -> Result<f64> {
    let count = check_z(win, z)?;
    let mut signed: Vec<f64> = win.positives()[..count].iter().map(|g| -g).collect();
    signed.extend_from_slice(&win.positives()[..count]);
    let (a, b) = (spec.x, spec.upper());
    let mut total = Complex64::new(0.0, 0.0);
    for &g in &signed {
        let cg = c_coeff(spec.theta, Complex64::new(0.5, g));
        for &h in &signed {
            let ch = c_coeff(spec.theta, Complex64::new(0.5, h));
            let s = Complex64::new(2.0, g - h);
            let k = ((s * b.ln()).exp() - (s * a.ln()).exp()) / s;
            total += cg * ch.conj() * k;
        }
    }
    Ok(total.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma10Report {
    pub j: f64,
    pub u: f64,
    pub rel_gap: f64,
}

/// J against U; the comparison is only claimed for Z ≥ X·log²X.
pub fn lemma10_check(
    spec: &ShortIntervalSpec,
    table: &LambdaTable,
    win: &SignedZeroWindow<'_>,
    z: f64,
    exec: Execution,
) -> Result<Lemma10Report> {
    let floor = spec.x * spec.x.ln().powi(2);
    if z < floor {
        return Err(LabError::RangeViolation(format!("Z = {z} below X·log²X = {floor}")));
    }
    let j = j_exact(spec, table, exec)?;
    let u = u_integral(win, spec, &UParams { z, exec })?;
    Ok(Lemma10Report {
        j,
        u,
        rel_gap: (j - u).abs() / j.max(u),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma9Report {
    /// ∫|c(θ, it)|²·|Φ(X, t, τ)|² dt over the real line.
    pub lhs: Integral,
    /// ∫|Σ_{|γ|≤Z} c(θ, ½+iγ)X^{iγ}/(1+τ²(t−γ)²)|² dt, in closed form.
    pub rhs: f64,
    /// θ²τ^{−3}log⁴(2/θ) + log⁴(2Z)/(τ²Z).
    pub err_scale: f64,
}

impl Lemma9Report {
    pub fn scaled_gap(&self) -> f64 {
        (self.lhs.value - self.rhs).abs() / self.err_scale
    }
}

/// Both sides of the smoothing relation between |c(θ, it)|² and the
/// per-zero coefficients. The right side uses
/// ∫ dt/((1+τ²(t−γ)²)(1+τ²(t−γ')²)) = (π/2τ)·w(τ(γ−γ')).
pub fn lemma9_check(
    theta: f64,
    tau: f64,
    x: f64,
    z: f64,
    win: &SignedZeroWindow<'_>,
    q: &QuadratureSpec,
) -> Result<Lemma9Report> {
    if !(theta > 0.0 && theta <= tau && tau <= 1.0) {
        return Err(LabError::RangeViolation(format!("need 0 < θ ≤ τ ≤ 1, got θ = {theta}, τ = {tau}")));
    }
    if !(z >= 1.0 / theta) {
        return Err(LabError::RangeViolation(format!("Z = {z} below 1/θ")));
    }
    let count = check_z(win, z)?;
    // |c(θ, it)|² = 4(sin κt/t)² and even in t.
    let half = i_integral(win, x, tau, kappa_of(theta), q)?;
    let scale = 2.0 / tau;
    let lhs = Integral {
        value: half.value * scale,
        error: half.error * scale,
        tail_bound: half.tail_bound * scale,
        panels: half.panels,
    };

    let g = &win.positives()[..count];
    let log_x = x.ln();
    let u: Vec<Complex64> = g
        .iter()
        .map(|&y| c_coeff(theta, Complex64::new(0.5, y)) * Complex64::from_polar(1.0, y * log_x))
        .collect();
    let mut acc = Neumaier::default();
    for j in 0..count {
        acc.add(2.0 * u[j].norm_sqr() + 2.0 * (u[j] * u[j]).re * w(2.0 * tau * g[j]));
        let mut off = 0.0;
        for k in j + 1..count {
            off += (u[j] * u[k].conj()).re * w(tau * (g[j] - g[k])) + (u[j] * u[k]).re * w(tau * (g[j] + g[k]));
        }
        acc.add(4.0 * off);
    }
    let rhs = PI / (2.0 * tau) * acc.value();
    let err_scale = theta * theta / tau.powi(3) * (2.0 / theta).ln().powi(4) + (2.0 * z).ln().powi(4) / (tau * tau * z);
    Ok(Lemma9Report { lhs, rhs, err_scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gk21;

    #[test]
    fn single_zero_u() {
        let g = [14.134725141734694];
        let win = SignedZeroWindow::new(&g, 20.0).unwrap();
        let spec = ShortIntervalSpec::new(50.0, 0.5, 0.2).unwrap();
        let up = UParams {
            z: 20.0,
            exec: Execution::Serial,
        };
        let u = u_integral(&win, &spec, &up).unwrap();
        let c = c_coeff(0.2, Complex64::new(0.5, g[0]));
        let (a, b) = (spec.x, spec.upper());
        let s = Complex64::new(2.0, 2.0 * g[0]);
        let k2 = ((s * b.ln()).exp() - (s * a.ln()).exp()) / s;
        let closed = c.norm_sqr() * (b * b - a * a) + 2.0 * (c * c * k2).re;
        assert!((u - closed).abs() < 1e-10 * closed.abs());
        // 4x·(Re(c·x^{iγ}))² integrated numerically.
        let f = |x: f64| {
            let v = (c * Complex64::from_polar(1.0, g[0] * x.ln())).re;
            4.0 * x * v * v
        };
        let mut quad = 0.0;
        let steps = 200;
        for i in 0..steps {
            let lo = a + (b - a) * i as f64 / steps as f64;
            let hi = a + (b - a) * (i + 1) as f64 / steps as f64;
            quad += gk21(&f, lo, hi).0;
        }
        assert!((u - quad).abs() < 1e-10 * quad);
    }

    #[test]
    fn symmetric_matches_materialized() {
        let g: Vec<f64> = (0..120).map(|k| 14.0 + 1.37 * k as f64 + (k as f64).sin()).collect();
        let win = SignedZeroWindow::new(&g, 200.0).unwrap();
        let spec = ShortIntervalSpec::new(300.0, 0.4, 0.05).unwrap();
        let fast = u_integral(&win, &spec, &UParams { z: 180.0, exec: Execution::Parallel }).unwrap();
        let slow = u_integral_materialized(&win, &spec, 180.0).unwrap();
        assert!(fast >= 0.0);
        assert!((fast - slow).abs() < 1e-12 * slow.abs(), "{fast} vs {slow}");
        assert!(matches!(
            u_integral(&win, &spec, &UParams { z: 250.0, exec: Execution::Serial }),
            Err(LabError::HeightExceeded { .. })
        ));
    }

    #[test]
    fn series_branch_continuity() {
        let (a, b) = (100.0f64, 150.0f64);
        let delta = 0.9 * SERIES_CUTOFF / (b / a).ln();
        let s = Complex64::new(2.0, delta);
        let direct = ((s * b.ln()).exp() - (s * a.ln()).exp()) / s;
        let series = power_integral_series(a, b, delta);
        assert!((direct - series).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn empty_window_i_is_tail_only() {
        let g: [f64; 0] = [];
        let win = SignedZeroWindow::new(&g, 100.0).unwrap();
        let v = i_integral(&win, 10.0, 0.5, 0.01, &QuadratureSpec::default()).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.tail_bound > 0.0);
    }

    #[test]
    fn lemma10_precondition() {
        let g = [14.134725141734694];
        let win = SignedZeroWindow::new(&g, 20.0).unwrap();
        let table = crate::arith::sieve_lambda(1000).unwrap();
        let spec = ShortIntervalSpec::new(500.0, 0.5, 0.05).unwrap();
        assert!(matches!(
            lemma10_check(&spec, &table, &win, 20.0, Execution::Serial),
            Err(LabError::RangeViolation(_))
        ));
    }

    #[test]
    fn lemma9_hypotheses() {
        let g = [14.134725141734694, 21.022039638771555];
        let win = SignedZeroWindow::new(&g, 40.0).unwrap();
        let q = QuadratureSpec::default();
        assert!(matches!(lemma9_check(0.5, 0.2, 10.0, 20.0, &win, &q), Err(LabError::RangeViolation(_))));
        assert!(matches!(lemma9_check(0.1, 0.2, 10.0, 5.0, &win, &q), Err(LabError::RangeViolation(_))));
        let r = lemma9_check(0.2, 0.2, 10.0, 10.0, &win, &q).unwrap();
        assert!(r.lhs.value >= 0.0 && r.rhs >= 0.0);
    }
}
