//! Prime-side arithmetic: the von Mangoldt table, ψ(x), the a-weights and
//! the sums built from them.

pub mod cache;
pub mod sums;

use rayon::prelude::*;

use crate::error::{LabError, Result};

pub use sums::{s_split, s_sum, s_tilde, SSplit, SValue, SWeightParams};

/// Largest sieve range accepted.
pub const MAX_SIEVE: u64 = 1_000_000_000;

/// Entries between consecutive ψ checkpoints.
pub const CHECKPOINT_STRIDE: usize = 64;

const SEGMENT_LEN: usize = 1 << 18;

/// Sparse von Mangoldt values on [1, N].
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable {
    range_end: u64,
    n: Vec<u32>,
    lambda: Vec<f64>,
    // checkpoints[j] = ψ over the first j·CHECKPOINT_STRIDE entries.
    checkpoints: Vec<f64>,
}

impl LambdaTable {
    /// Build from explicit entries (ascending prime powers with their Λ).
    pub fn from_entries(range_end: u64, n: Vec<u32>, lambda: Vec<f64>) -> Result<Self> {
        if n.len() != lambda.len() {
            return Err(LabError::MalformedDataset("entry and value counts differ".into()));
        }
        if n.windows(2).any(|w| w[1] <= w[0]) || n.last().is_some_and(|&m| m as u64 > range_end) {
            return Err(LabError::MalformedDataset("sieve entries not ascending within range".into()));
        }
        let checkpoints = build_checkpoints(&lambda);
        Ok(LambdaTable {
            range_end,
            n,
            lambda,
            checkpoints,
        })
    }

    pub fn range_end(&self) -> u64 {
        self.range_end
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    /// Prime powers in ascending order.
    pub fn ns(&self) -> &[u32] {
        &self.n
    }

    /// Λ at the entries of [`LambdaTable::ns`].
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.n.iter().zip(&self.lambda).map(|(&n, &l)| (n as u64, l))
    }

    /// Λ(n), zero off the prime powers.
    pub fn lambda_at(&self, n: u64) -> f64 {
        if n > u32::MAX as u64 {
            return 0.0;
        }
        match self.n.binary_search(&(n as u32)) {
            Ok(i) => self.lambda[i],
            Err(_) => 0.0,
        }
    }

    /// Number of entries with n ≤ x.
    pub fn count_up_to(&self, x: f64) -> usize {
        if x >= u32::MAX as f64 {
            return self.n.len();
        }
        let cut = x.floor();
        if cut < 0.0 {
            return 0;
        }
        let cut = cut as u32;
        self.n.partition_point(|&m| m <= cut)
    }

    /// ψ over the first `k` entries.
    pub fn psi_prefix(&self, k: usize) -> f64 {
        let block = k / CHECKPOINT_STRIDE;
        let start = block * CHECKPOINT_STRIDE;
        let mut partial = 0.0;
        for l in &self.lambda[start..k] {
            partial += l;
        }
        let value = self.checkpoints[block] + partial;
        match self.checkpoints.get(block + 1) {
            Some(&next) => value.min(next),
            None => value,
        }
    }

    /// ψ(x) = Σ_{n ≤ x} Λ(n), right-continuous.
    pub fn psi(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.range_end as f64).contains(&x) {
            return Err(LabError::RangeExceeded {
                value: x,
                limit: self.range_end as f64,
            });
        }
        Ok(self.psi_prefix(self.count_up_to(x)))
    }

    /// (ψ(X+h) − ψ(X))/h: the local prime density probed by hypothesis K(β).
    pub fn kbeta_ratio(&self, x: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(LabError::InvalidArgument(format!("interval length {h} must be positive")));
        }
        Ok((self.psi(x + h)? - self.psi(x)?) / h)
    }

    /// Z(U; k) = Σ_{n,m ≤ U, |n−m| = k} Λ(n)Λ(m).
    pub fn z_twin(&self, u: u64, k: u64) -> Result<f64> {
        if u > self.range_end {
            return Err(LabError::RangeExceeded {
                value: u as f64,
                limit: self.range_end as f64,
            });
        }
        if k == 0 || k > u {
            return Err(LabError::InvalidArgument(format!("need 1 ≤ k ≤ U, got k = {k}, U = {u}")));
        }
        let upper = self.count_up_to((u - k) as f64);
        let mut acc = crate::sum::Neumaier::new();
        let mut j = 0;
        for i in 0..upper {
            let target = self.n[i] as u64 + k;
            while j < self.n.len() && (self.n[j] as u64) < target {
                j += 1;
            }
            if j < self.n.len() && self.n[j] as u64 == target {
                acc.add(self.lambda[i] * self.lambda[j]);
            }
        }
        Ok(2.0 * acc.value())
    }
}

fn build_checkpoints(lambda: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(lambda.len() / CHECKPOINT_STRIDE + 1);
    let mut acc = crate::sum::Neumaier::new();
    out.push(0.0);
    for (i, l) in lambda.iter().enumerate() {
        acc.add(*l);
        if (i + 1) % CHECKPOINT_STRIDE == 0 {
            let prev = *out.last().unwrap_or(&0.0);
            out.push(acc.value().max(prev));
        }
    }
    out
}

/// Primes up to `limit` by a plain sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes in [lo, hi) by sieving with `base` (all primes ≤ √hi).
fn sieve_segment(lo: u64, hi: u64, base: &[u32]) -> Vec<u32> {
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        let p = p as u64;
        if p * p >= hi {
            break;
        }
        let first = (p * p).max(lo.div_ceil(p) * p);
        let mut m = (first - lo) as usize;
        while m < len {
            composite[m] = true;
            m += p as usize;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(i, c)| !**c && lo + *i as u64 >= 2)
        .map(|(i, _)| (lo + i as u64) as u32)
        .collect()
}

/// Segmented sieve of Λ over [1, N].
pub fn sieve_lambda(range_end: u64) -> Result<LambdaTable> {
    if range_end > MAX_SIEVE {
        return Err(LabError::ResourceLimit(format!(
            "sieve range {range_end} above the {MAX_SIEVE} guard"
        )));
    }
    if range_end < 2 {
        return Err(LabError::InvalidArgument(format!("sieve range {range_end} below 2")));
    }
    let root = isqrt(range_end);
    let base = small_primes(root);
    let segments = (range_end as usize + 1).div_ceil(SEGMENT_LEN);
    let primes: Vec<Vec<u32>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = (s * SEGMENT_LEN) as u64;
            let hi = (((s + 1) * SEGMENT_LEN) as u64).min(range_end + 1);
            sieve_segment(lo, hi, &base)
        })
        .collect();

    let mut powers: Vec<(u32, u32)> = Vec::new();
    for &p in &base {
        let mut q = p as u64 * p as u64;
        while q <= range_end {
            powers.push((q as u32, p));
            q *= p as u64;
        }
    }
    powers.sort_unstable();

    let total = primes.iter().map(Vec::len).sum::<usize>() + powers.len();
    let mut n = Vec::with_capacity(total);
    let mut lambda = Vec::with_capacity(total);
    let mut pw = powers.iter().peekable();
    for p in primes.into_iter().flatten() {
        while let Some(&&(q, base_p)) = pw.peek() {
            if q > p {
                break;
            }
            n.push(q);
            lambda.push((base_p as f64).ln());
            pw.next();
        }
        n.push(p);
        lambda.push((p as f64).ln());
    }
    for &(q, base_p) in pw {
        n.push(q);
        lambda.push((base_p as f64).ln());
    }
    LambdaTable::from_entries(range_end, n, lambda)
}

/// a(u, X, τ) = (u/X)^{1/τ} for u ≤ X and (X/u)^{1/τ} above.
pub fn a_weight(u: f64, x: f64, tau: f64) -> f64 {
    let ratio = if u <= x { u / x } else { x / u };
    ratio.powf(1.0 / tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_lambda(n: u64) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                let mut m = n;
                while m.is_multiple_of(p) {
                    m /= p;
                }
                return if m == 1 { (p as f64).ln() } else { 0.0 };
            }
            p += 1;
        }
        (n as f64).ln()
    }

    #[test]
    fn small_table_by_definition() {
        let t = sieve_lambda(10).unwrap();
        assert_eq!(t.ns(), &[2, 3, 4, 5, 7, 8, 9]);
        assert_eq!(t.lambda_at(4), 2f64.ln());
        assert_eq!(t.lambda_at(8), 2f64.ln());
        assert_eq!(t.lambda_at(9), 3f64.ln());
        assert_eq!(t.lambda_at(6), 0.0);
        let t2 = sieve_lambda(2).unwrap();
        assert_eq!(t2.ns(), &[2]);
    }

    #[test]
    fn psi_steps() {
        let t = sieve_lambda(10).unwrap();
        let psi10 = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((t.psi(10.0).unwrap() - psi10).abs() < 1e-14);
        assert!((psi10 - 7.83201).abs() < 1e-5);
        assert_eq!(t.psi(1.5).unwrap(), 0.0);
        let jump = t.psi(4.0).unwrap() - t.psi(3.99).unwrap();
        assert!((jump - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(t.psi(10.5), Err(LabError::RangeExceeded { .. })));
    }

    #[test]
    fn matches_trial_division() {
        let n = 100_000;
        let t = sieve_lambda(n).unwrap();
        let mut idx = 0;
        for m in 1..=n {
            let expect = trial_lambda(m);
            if expect > 0.0 {
                assert_eq!(t.ns()[idx] as u64, m);
                assert_eq!(t.lambdas()[idx], expect);
                idx += 1;
            }
        }
        assert_eq!(idx, t.len());
    }

    #[test]
    fn segments_join_cleanly() {
        // Range straddling several segments, with prime powers at the seams.
        let n = 3 * SEGMENT_LEN as u64 + 17;
        let t = sieve_lambda(n).unwrap();
        assert!(t.ns().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(t.lambda_at(1 << 18), 2f64.ln());
        assert_eq!(t.lambda_at(SEGMENT_LEN as u64 + 1), trial_lambda(SEGMENT_LEN as u64 + 1));
    }

    #[test]
    fn checkpoints_agree_with_running_sum() {
        let t = sieve_lambda(50_000).unwrap();
        let mut acc = crate::sum::Neumaier::new();
        for k in 0..=t.len() {
            let direct = acc.value();
            let via = t.psi_prefix(k);
            assert!((via - direct).abs() <= 1e-12 * direct.max(1.0), "k={k}");
            if k < t.len() {
                acc.add(t.lambdas()[k]);
            }
        }
    }

    #[test]
    fn psi_rh_sanity() {
        let t = sieve_lambda(1_000_000).unwrap();
        for x in [100.0, 1e4, 1e6] {
            let dev = (t.psi(x).unwrap() - x).abs();
            assert!(dev <= 2.0 * x.sqrt() * x.ln().powi(2), "x={x}");
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(sieve_lambda(MAX_SIEVE + 1), Err(LabError::ResourceLimit(_))));
        assert!(sieve_lambda(1).is_err());
    }

    #[test]
    fn a_weight_cases() {
        assert_eq!(a_weight(4.0, 4.0, 0.5), 1.0);
        assert_eq!(a_weight(2.0, 4.0, 0.5), 0.25);
        assert_eq!(a_weight(8.0, 4.0, 1.0), 0.5);
    }

    #[test]
    fn z_twin_by_enumeration() {
        let t = sieve_lambda(1000).unwrap();
        for (u, k) in [(10u64, 1u64), (10, 2), (100, 6), (1000, 30)] {
            let mut brute = 0.0;
            for n in 1..=u {
                for m in 1..=u {
                    if n.abs_diff(m) == k {
                        brute += trial_lambda(n) * trial_lambda(m);
                    }
                }
            }
            let z = t.z_twin(u, k).unwrap();
            assert!((z - brute).abs() <= 1e-12 * brute.max(1.0), "U={u} k={k}");
        }
        let (l2, l3, l5, l7) = (2f64.ln(), 3f64.ln(), 5f64.ln(), 7f64.ln());
        let by_hand = 2.0 * (l2 * l3 + l3 * l2 + l2 * l5 + l7 * l2 + l2 * l3);
        assert!((t.z_twin(10, 1).unwrap() - by_hand).abs() < 1e-13);
        assert!(t.z_twin(2000, 1).is_err());
    }

    #[test]
    fn kbeta_single_jump() {
        let t = sieve_lambda(100).unwrap();
        assert!((t.kbeta_ratio(2.5, 0.6).unwrap() - 3f64.ln() / 0.6).abs() < 1e-15);
        assert_eq!(t.kbeta_ratio(23.5, 1.4).unwrap(), 0.0);
    }
}
