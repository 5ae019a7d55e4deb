//! Asymptotic predictions for F(X, T, τ) and S(X, τ), and the diagnostics
//! for the regime in which they are claimed.

use std::f64::consts::PI;

use crate::error::{LabError, Result};

/// Two main terms and the scale of the leading error term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thm1Prediction {
    /// (T/π)·S/τ.
    pub main1: f64,
    /// T·log²T/(π·τ·X^{2/τ}).
    pub main2: f64,
    /// T·log T·√S/(τ·X^{1/τ}).
    pub err_scale: f64,
}

impl Thm1Prediction {
    pub fn total(&self) -> f64 {
        self.main1 + self.main2
    }
}

pub fn thm1_prediction(x: f64, t: f64, tau: f64, s: f64) -> Thm1Prediction {
    let log_t = t.ln();
    // X^{−1/τ} in log space: it underflows long before the products do.
    let x_inv = (-x.ln() / tau).exp();
    Thm1Prediction {
        main1: t / PI * s / tau,
        main2: t * log_t * log_t / (PI * tau) * x_inv * x_inv,
        err_scale: t * log_t * s.sqrt() / tau * x_inv,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// T·S(X,τ)/X.
    pub r12: f64,
    /// τ·S(X,τ)·T/log³T.
    pub r13: f64,
    /// T·S(X,τ)/(X·S(X,2τ)).
    pub r14a: f64,
    /// T·S(X,τ)/(τX).
    pub r14b: f64,
    /// T·S(X,τ)·X⁵.
    pub r14c: f64,
    /// S(X, 2τ) was taken with 2τ > 1.
    pub extrapolated: bool,
}

pub const DEFAULT_LAMBDA: f64 = 10.0;

impl ConditionReport {
    /// Both primary conditions hold with headroom `lambda`.
    pub fn satisfied(&self, lambda: f64) -> bool {
        self.r12 >= lambda && self.r13 >= lambda
    }

    /// The relaxed group together with the second primary condition.
    pub fn relaxed_satisfied(&self, lambda: f64) -> bool {
        self.r14a >= lambda && self.r14b >= lambda && self.r14c >= lambda && self.r13 >= lambda
    }
}

pub fn conditions(x: f64, t: f64, tau: f64, s: f64, s_2tau: f64) -> ConditionReport {
    let ts = t * s;
    ConditionReport {
        r12: ts / x,
        r13: tau * ts / t.ln().powi(3),
        r14a: ts / (x * s_2tau),
        r14b: ts / (tau * x),
        r14c: ts * x.powi(5),
        extrapolated: 2.0 * tau > 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureParams {
    pub m: f64,
    pub epsilon: f64,
    pub h: f64,
    pub k: f64,
}

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_M: f64 = 3.0;

impl ConjectureParams {
    pub fn new(x: f64, t: f64, m: f64, epsilon: f64) -> Result<Self> {
        if !(m > 1.0) {
            return Err(LabError::InvalidArgument(format!("M = {m} must exceed 1")));
        }
        if !(epsilon > 0.0) {
            return Err(LabError::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
        }
        Ok(ConjectureParams {
            m,
            epsilon,
            h: x.min(t),
            k: x.max(t),
        })
    }

    pub fn applicable(&self, tau: f64) -> bool {
        self.k <= self.h.powf(self.m) && tau >= self.h.powf(-1.0 + self.epsilon)
    }
}

/// (T/π)·log min(X, T), and whether (X, T, τ) is in the claimed range.
pub fn conjecture_prediction(t: f64, tau: f64, cp: &ConjectureParams) -> (f64, bool) {
    (t / PI * cp.h.ln(), cp.applicable(tau))
}

/// π·F/(T·log X), defined for T^ε ≤ X ≤ T/log T.
pub fn corollary_ratio(f_computed: f64, x: f64, t: f64, epsilon: f64) -> Result<f64> {
    let lo = t.powf(epsilon);
    let hi = t / t.ln();
    if !(x >= lo && x <= hi) {
        return Err(LabError::RangeViolation(format!(
            "X = {x} outside [{lo}, {hi}] for T = {t}"
        )));
    }
    Ok(PI * f_computed / (t * x.ln()))
}

pub fn s_asymptotic_ratio(s: f64, x: f64, tau: f64) -> f64 {
    s / (tau * x.ln())
}
