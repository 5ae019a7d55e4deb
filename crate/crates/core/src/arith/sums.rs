//! S(X, τ), S̃(X, τ) and the three-range split of S.

use crate::error::{LabError, Result};
use crate::sum::{reduce, Execution, Neumaier};

use super::LambdaTable;

/// Chebyshev bound ψ(x) < 1.03883·x, valid for every x > 0.
const PSI_LINEAR_BOUND: f64 = 1.03883;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SWeightParams {
    pub x: f64,
    pub tau: f64,
    /// Largest admissible tail bound, relative to the truncated value.
    pub tail_tol: f64,
    pub exec: Execution,
    extrapolated: bool,
}

impl SWeightParams {
    pub fn new(x: f64, tau: f64, tail_tol: f64) -> Result<Self> {
        if !(x > 1.0 && x.is_finite()) {
            return Err(LabError::InvalidArgument(format!("X = {x} must exceed 1")));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(LabError::InvalidArgument(format!("tau = {tau} outside (0, 1]")));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(LabError::InvalidArgument(format!("tail_tol = {tail_tol} outside (0, 1)")));
        }
        Ok(SWeightParams {
            x,
            tau,
            tail_tol,
            exec: Execution::default(),
            extrapolated: false,
        })
    }

    /// The same parameters at 2τ. For τ > 1/2 this leaves (0, 1]; the
    /// weights stay well defined and the result is flagged.
    pub fn doubled(&self) -> Self {
        SWeightParams {
            tau: 2.0 * self.tau,
            extrapolated: self.extrapolated || 2.0 * self.tau > 1.0,
            ..*self
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// True when τ lies outside (0, 1].
    pub fn is_extrapolated(&self) -> bool {
        self.extrapolated
    }

    fn exponent(&self) -> f64 {
        2.0 / self.tau
    }
}

/// A truncated series with a certified bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SValue {
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SSplit {
    /// n ≤ X − H.
    pub below: f64,
    /// X − H < n ≤ X + H.
    pub middle: f64,
    /// n > X + H, up to the sieve end.
    pub above: f64,
    pub tail_bound: f64,
}

impl SSplit {
    pub fn total(&self) -> f64 {
        self.below + self.middle + self.above
    }
}

// X^e · Σ_{n>N} Λ(n)² n^{-p} with Λ(n)² ≤ Λ(n)·log n and partial
// summation against ψ(x) < 1.03883x; `psi_n` is ψ(N) (or 0 when unknown).
// Powers are combined in log space since X^e overflows for small τ.
fn dirichlet_tail(n: f64, p: f64, psi_n: f64, log_scale: f64) -> f64 {
    let log_n = n.ln();
    let g = log_n * (log_scale - p * log_n).exp();
    let q = p - 1.0;
    let integral = (log_scale - q * log_n).exp() * (log_n / q + 1.0 / (q * q));
    (PSI_LINEAR_BOUND * (n * g + integral) - psi_n * g).max(0.0)
}

// The tolerance is relative to the truncated value.
fn weight_tail(params: &SWeightParams, divide_by_n: bool, table: &LambdaTable, value: f64) -> Result<f64> {
    let e = params.exponent();
    let p = if divide_by_n { 1.0 + e } else { e };
    let n_end = table.range_end() as f64;
    let log_scale = e * params.x.ln();
    let tol = params.tail_tol * value;
    let required = || {
        let mut m = n_end.max(params.x).max(16.0);
        while dirichlet_tail(m, p, 0.0, log_scale) >= tol && m < 1e30 {
            m *= 2.0;
        }
        m as u64
    };
    if n_end < params.x {
        return Err(LabError::InsufficientSieve {
            required_n: required(),
            tail_bound: f64::INFINITY,
            tol,
        });
    }
    let psi_end = table.psi_prefix(table.len());
    let tail = dirichlet_tail(n_end, p, psi_end, log_scale);
    if !(tail < tol) {
        return Err(LabError::InsufficientSieve {
            required_n: required(),
            tail_bound: tail,
            tol,
        });
    }
    Ok(tail)
}

#[inline]
fn term(n: f64, lambda: f64, x: f64, e: f64, divide_by_n: bool) -> f64 {
    let ratio = if n <= x { n / x } else { x / n };
    let w = ratio.powf(e);
    let base = lambda * lambda * w;
    if divide_by_n {
        base / n
    } else {
        base
    }
}

fn weighted(params: &SWeightParams, divide_by_n: bool, table: &LambdaTable, range: std::ops::Range<usize>) -> f64 {
    let ns = &table.ns()[range.clone()];
    let ls = &table.lambdas()[range];
    let e = params.exponent();
    let acc: Neumaier = reduce(ns.len(), params.exec, |r, acc: &mut Neumaier| {
        for i in r {
            acc.add(term(ns[i] as f64, ls[i], params.x, e, divide_by_n));
        }
    });
    acc.value()
}

/// S(X, τ) = Σ Λ(n)²/n · a(n, X, τ)².
pub fn s_sum(params: &SWeightParams, table: &LambdaTable) -> Result<SValue> {
    let value = weighted(params, true, table, 0..table.len());
    let tail_bound = weight_tail(params, true, table, value)?;
    Ok(SValue { value, tail_bound })
}

/// S̃(X, τ) = Σ Λ(n)² · a(n, X, τ)².
pub fn s_tilde(params: &SWeightParams, table: &LambdaTable) -> Result<SValue> {
    if params.exponent() <= 1.0 {
        return Err(LabError::InvalidArgument("S̃ diverges for tau ≥ 2".into()));
    }
    let value = weighted(params, false, table, 0..table.len());
    let tail_bound = weight_tail(params, false, table, value)?;
    Ok(SValue { value, tail_bound })
}

/// S over [1, X−H], (X−H, X+H] and (X+H, ∞).
pub fn s_split(params: &SWeightParams, h: f64, table: &LambdaTable) -> Result<SSplit> {
    if !(h >= 1.0 && h <= params.x) {
        return Err(LabError::InvalidArgument(format!("need 1 ≤ H ≤ X, got H = {h}")));
    }
    let i1 = table.count_up_to(params.x - h);
    let i2 = table.count_up_to(params.x + h);
    let below = weighted(params, true, table, 0..i1);
    let middle = weighted(params, true, table, i1..i2);
    let above = weighted(params, true, table, i2..table.len());
    let tail_bound = weight_tail(params, true, table, below + middle + above)?;
    Ok(SSplit {
        below,
        middle,
        above,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_lambda;

    #[test]
    fn leading_terms_at_x4() {
        let t = sieve_lambda(4).unwrap();
        let p = SWeightParams::new(4.0, 1.0, 0.99).unwrap();
        // Only the n ≤ 4 terms: the tail check is bypassed by summing directly.
        let partial = weighted(&p, true, &t, 0..t.len());
        let (l2, l3) = (2f64.ln(), 3f64.ln());
        let expect = l2 * l2 / 2.0 * 0.25 + l3 * l3 / 3.0 * (9.0 / 16.0) + l2 * l2 / 4.0;
        assert!((partial - expect).abs() < 1e-15);
        assert!((l2 * l2 / 2.0 * 0.25 - 0.0601).abs() < 1e-4);
        assert!((l3 * l3 / 3.0 * (9.0 / 16.0) - 0.2263).abs() < 1e-4);
        assert!((l2 * l2 / 4.0 - 0.1201).abs() < 1e-4);
        let tilde_first = term(2.0, l2, 4.0, 2.0, false);
        assert!((tilde_first - 0.12011).abs() < 1e-5);
    }

    #[test]
    fn tail_bound_brackets_longer_sieve() {
        let small = sieve_lambda(20_000).unwrap();
        let big = sieve_lambda(80_000).unwrap();
        for tau in [0.5, 1.0] {
            let p = SWeightParams::new(100.0, tau, 0.5).unwrap();
            let a = s_sum(&p, &small).unwrap();
            let b = s_sum(&p, &big).unwrap();
            assert!(b.value >= a.value);
            assert!(b.value - a.value <= a.tail_bound, "tau={tau}");
        }
    }

    #[test]
    fn short_sieve_reports_requirement() {
        let t = sieve_lambda(1000).unwrap();
        let p = SWeightParams::new(500.0, 1.0, 1e-6).unwrap();
        match s_sum(&p, &t) {
            Err(LabError::InsufficientSieve { required_n, .. }) => assert!(required_n > 1000),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn split_is_a_partition() {
        let t = sieve_lambda(200_000).unwrap();
        let p = SWeightParams::new(100.0, 0.5, 1e-3).unwrap();
        let whole = s_sum(&p, &t).unwrap().value;
        let parts = s_split(&p, 10.0, &t).unwrap();
        assert!((parts.total() - whole).abs() <= 1e-12 * whole);
        let full = s_split(&p, 100.0, &t).unwrap();
        assert_eq!(full.below, 0.0);
    }

    #[test]
    fn tilde_dominates_and_is_dominated() {
        let t = sieve_lambda(2_000_000).unwrap();
        for x in [1e2, 1e4] {
            for tau in [0.1, 0.5, 1.0] {
                let p = SWeightParams::new(x, tau, 0.5).unwrap();
                let s = s_sum(&p, &t).unwrap();
                let st = s_tilde(&p, &t).unwrap();
                let s2 = s_sum(&p.doubled(), &t).unwrap();
                assert!(st.value >= s.value);
                assert!(st.value <= x * s2.value, "X={x} tau={tau}");
            }
        }
    }
}
