//! Compensated accumulators and the deterministic block reduction used by
//! every hot loop in the crate.
//!
//! A parallel reduction splits the index range into fixed-size blocks,
//! accumulates each block with Neumaier compensation and merges the block
//! results in block order. The result therefore does not depend on the
//! number of worker threads, and agrees with a single serial pass to within
//! a few ulps of the compensated sum.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;

/// Neumaier (improved Kahan–Babuška) running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a sequence of values.
pub fn sum_compensated(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<Neumaier>().value()
}

/// Componentwise Neumaier sum of complex values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// A partial result that can be folded into another one of the same kind.
pub trait Accumulator: Default + Send {
    fn merge(&mut self, other: Self);
}

impl Accumulator for Neumaier {
    fn merge(&mut self, other: Self) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

impl Accumulator for ComplexNeumaier {
    fn merge(&mut self, other: Self) {
        self.re.merge(other.re);
        self.im.merge(other.im);
    }
}

impl<A: Accumulator, B: Accumulator> Accumulator for (A, B) {
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
    }
}

/// How a reduction is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// One pass over the whole range in index order.
    Serial,
    /// Fixed blocks evaluated on the rayon pool, merged in block order.
    #[default]
    Parallel,
}

/// Rows per block in [`reduce`].
pub const BLOCK_LEN: usize = 256;

/// Reduce `body` over `0..len`. `body` receives a sub-range and an
/// accumulator to fold that sub-range into.
pub fn reduce<A, F>(len: usize, exec: Execution, body: F) -> A
where
    A: Accumulator,
    F: Fn(Range<usize>, &mut A) + Sync,
{
    match exec {
        Execution::Serial => {
            let mut acc = A::default();
            body(0..len, &mut acc);
            acc
        }
        Execution::Parallel => {
            let blocks = len.div_ceil(BLOCK_LEN);
            let partials: Vec<A> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let start = b * BLOCK_LEN;
                    let end = (start + BLOCK_LEN).min(len);
                    let mut acc = A::default();
                    body(start..end, &mut acc);
                    acc
                })
                .collect();
            let mut total = A::default();
            for p in partials {
                total.merge(p);
            }
            total
        }
    }
}
