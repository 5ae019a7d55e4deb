//! Mean squares of primes in short intervals and their zero-side
//! counterparts.

use num_complex::Complex64;

use crate::arith::LambdaTable;
use crate::asympt::DEFAULT_EPSILON;
use crate::error::{LabError, Result};
use crate::sum::{reduce, Execution, Neumaier};

mod zeros_side;

pub use zeros_side::{
    i_integral, i_reference, lemma10_check, lemma9_check, u_integral, u_integral_materialized, Lemma10Report,
    Lemma9Report, UParams,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortIntervalSpec {
    pub x: f64,
    pub tau: f64,
    pub theta: f64,
}

impl ShortIntervalSpec {
    pub fn new(x: f64, tau: f64, theta: f64) -> Result<Self> {
        if !(x >= 2.0 && x.is_finite()) {
            return Err(LabError::InvalidArgument(format!("X = {x} below 2")));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(LabError::InvalidArgument(format!("tau = {tau} outside (0, 1]")));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(LabError::InvalidArgument(format!("theta = {theta} outside (0, 1]")));
        }
        Ok(ShortIntervalSpec { x, tau, theta })
    }

    /// X(1 + τ).
    pub fn upper(&self) -> f64 {
        self.x * (1.0 + self.tau)
    }

    /// Largest argument of ψ met by the integrand.
    pub fn reach(&self) -> f64 {
        self.upper() * (1.0 + self.theta)
    }
}

fn require_range(table: &LambdaTable, reach: f64) -> Result<()> {
    if (table.range_end() as f64) < reach {
        return Err(LabError::InsufficientSieve {
            required_n: reach.ceil() as u64,
            tail_bound: f64::INFINITY,
            tol: 0.0,
        });
    }
    Ok(())
}

// Sorted, deduplicated breakpoints in [a, b]: every point where
// ψ(x + shift(x)) − ψ(x) can jump.
fn breakpoints(table: &LambdaTable, a: f64, b: f64, pullback: impl Fn(f64) -> f64, far: f64) -> Vec<f64> {
    let ns = table.ns();
    let mut points = vec![a, b];
    let lo = table.count_up_to(a);
    let hi = table.count_up_to(b);
    points.extend(ns[lo..hi].iter().map(|&n| n as f64).filter(|&n| n > a));
    let lo = table.count_up_to(a);
    let hi = table.count_up_to(far);
    points.extend(
        ns[lo..hi]
            .iter()
            .map(|&n| pullback(n as f64))
            .filter(|&y| y > a && y < b),
    );
    points.sort_by(f64::total_cmp);
    points.dedup_by(|next, prev| (*next - *prev).abs() <= 1e-12 * prev.abs());
    points
}

fn psi_at(table: &LambdaTable, x: f64) -> f64 {
    table.psi_prefix(table.count_up_to(x))
}

/// J(X, τ, θ) = ∫_X^{X(1+τ)} (ψ(x+θx) − ψ(x) − θx)² dx, exactly: between
/// breakpoints the ψ-difference D is constant and the panel [a, b] with
/// midpoint m contributes (b − a)·((D − θm)² + θ²(b − a)²/12).
pub fn j_exact(spec: &ShortIntervalSpec, table: &LambdaTable, exec: Execution) -> Result<f64> {
    require_range(table, spec.reach())?;
    let theta = spec.theta;
    let grow = 1.0 + theta;
    let points = breakpoints(table, spec.x, spec.upper(), |n| n / grow, spec.reach());
    let acc: Neumaier = reduce(points.len() - 1, exec, |r, acc: &mut Neumaier| {
        for i in r {
            let (a, b) = (points[i], points[i + 1]);
            let m = 0.5 * (a + b);
            let width = b - a;
            let d = psi_at(table, grow * m) - psi_at(table, m);
            let e = d - theta * m;
            acc.add(width * (e * e + theta * theta * width * width / 12.0));
        }
    });
    Ok(acc.value())
}

/// (1 + τ/2)·τ·θ·X²·log(1/θ).
pub fn j_rhs(spec: &ShortIntervalSpec) -> f64 {
    (1.0 + spec.tau / 2.0) * spec.tau * spec.theta * spec.x * spec.x * (1.0 / spec.theta).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SVSpec {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl SVSpec {
    pub fn new(x: f64, y: f64, h: f64) -> Result<Self> {
        Self::with_epsilon(x, y, h, DEFAULT_EPSILON)
    }

    /// Requires h ≤ Y ≤ X and X^ε ≤ h ≤ X^{1−ε}.
    pub fn with_epsilon(x: f64, y: f64, h: f64, epsilon: f64) -> Result<Self> {
        if !(x >= 2.0) {
            return Err(LabError::InvalidArgument(format!("X = {x} below 2")));
        }
        if !(h <= y && y <= x) {
            return Err(LabError::RangeViolation(format!("need h ≤ Y ≤ X, got h = {h}, Y = {y}")));
        }
        if !(h >= x.powf(epsilon) && h <= x.powf(1.0 - epsilon)) {
            return Err(LabError::RangeViolation(format!(
                "h = {h} outside [X^{epsilon}, X^{}]",
                1.0 - epsilon
            )));
        }
        Ok(SVSpec { x, y, h })
    }
}

/// ∫_X^{X+Y} (ψ(x+h) − ψ(x) − h)² dx exactly, with the reference Y·h·log(X/h).
pub fn sv_integral(spec: &SVSpec, table: &LambdaTable) -> Result<(f64, f64)> {
    let (a, b, h) = (spec.x, spec.x + spec.y, spec.h);
    require_range(table, b + h)?;
    let points = breakpoints(table, a, b, |n| n - h, b + h);
    let mut acc = Neumaier::default();
    for pair in points.windows(2) {
        let m = 0.5 * (pair[0] + pair[1]);
        let e = psi_at(table, m + h) - psi_at(table, m) - h;
        acc.add((pair[1] - pair[0]) * e * e);
    }
    Ok((acc.value(), spec.y * h * (spec.x / h).ln()))
}

// e^z − 1 without cancellation for small |z|.
fn exp_m1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

/// c(θ, s) = ((1+θ)^s − 1)/s, with the limit log(1+θ) at s = 0.
pub fn c_coeff(theta: f64, s: Complex64) -> Complex64 {
    let l = theta.ln_1p();
    if s.norm() < 1e-8 {
        let sl = s * l;
        return (Complex64::new(1.0, 0.0) + sl / 2.0 + sl * sl / 6.0) * l;
    }
    exp_m1(s * l) / s
}

/// κ = ½·log(1 + θ).
pub fn kappa_of(theta: f64) -> f64 {
    0.5 * theta.ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauberianParams {
    pub kappa: f64,
    pub theta: f64,
    pub z: f64,
}

impl TauberianParams {
    pub fn new(theta: f64, z: f64) -> Result<Self> {
        Self::from_parts(kappa_of(theta), theta, z)
    }

    pub fn from_parts(kappa: f64, theta: f64, z: f64) -> Result<Self> {
        if !(theta > 0.0 && kappa > 0.0) {
            return Err(LabError::InvalidArgument("kappa and theta must be positive".into()));
        }
        if (kappa - kappa_of(theta)).abs() > 1e-14 {
            return Err(LabError::InvalidArgument(format!(
                "kappa = {kappa} inconsistent with theta = {theta}"
            )));
        }
        Ok(TauberianParams { kappa, theta, z })
    }
}

/// Dense midpoint Riemann sums for cross-checking the exact evaluators.
pub mod oracle {
    use super::*;

    // ψ by a pointer that only moves forward.
    struct Cursor<'a> {
        table: &'a LambdaTable,
        next: usize,
        psi: f64,
    }

    impl<'a> Cursor<'a> {
        fn new(table: &'a LambdaTable) -> Self {
            Cursor { table, next: 0, psi: 0.0 }
        }

        fn psi(&mut self, x: f64) -> f64 {
            let ns = self.table.ns();
            while self.next < ns.len() && ns[self.next] as f64 <= x {
                self.psi += self.table.lambdas()[self.next];
                self.next += 1;
            }
            self.psi
        }
    }

    pub fn j_midpoint(spec: &ShortIntervalSpec, table: &LambdaTable, panels: usize) -> Result<f64> {
        require_range(table, spec.reach())?;
        let (a, b) = (spec.x, spec.upper());
        let dx = (b - a) / panels as f64;
        let grow = 1.0 + spec.theta;
        let mut lower = Cursor::new(table);
        let mut upper = Cursor::new(table);
        let mut acc = Neumaier::default();
        for i in 0..panels {
            let m = a + (i as f64 + 0.5) * dx;
            let e = upper.psi(grow * m) - lower.psi(m) - spec.theta * m;
            acc.add(e * e);
        }
        Ok(acc.value() * dx)
    }

    pub fn sv_midpoint(spec: &SVSpec, table: &LambdaTable, panels: usize) -> Result<f64> {
        require_range(table, spec.x + spec.y + spec.h)?;
        let dx = spec.y / panels as f64;
        let mut lower = Cursor::new(table);
        let mut upper = Cursor::new(table);
        let mut acc = Neumaier::default();
        for i in 0..panels {
            let m = spec.x + (i as f64 + 0.5) * dx;
            let e = upper.psi(m + spec.h) - lower.psi(m) - spec.h;
            acc.add(e * e);
        }
        Ok(acc.value() * dx)
    }
}
