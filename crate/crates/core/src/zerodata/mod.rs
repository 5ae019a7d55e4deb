//! Zero-ordinate datasets: parsing, validation, windowing and synthetic
//! contrast models.
//!
//! Only positive ordinates are ever stored. A [`SignedZeroWindow`] stands for
//! the symmetric multiset {±γ : 0 < γ ≤ T}, and every consumer expands the
//! negative half analytically. Zeros are counted once each.

pub mod riemann_siegel;

use std::f64::consts::{E, PI};
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{LabError, Result};

pub const FIRST_ZERO: f64 = 14.134_725_141_734_694;

/// Where a dataset came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    RiemannFile,
    PoissonModel,
    PicketModel,
}

impl Origin {
    pub fn tag(self) -> &'static str {
        match self {
            Origin::RiemannFile => "riemann-file",
            Origin::PoissonModel => "poisson-model",
            Origin::PicketModel => "picket-model",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Origin> {
        [Origin::RiemannFile, Origin::PoissonModel, Origin::PicketModel]
            .into_iter()
            .find(|o| o.tag() == tag)
    }
}

/// Validated, strictly increasing positive ordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOrdinates {
    ordinates: Vec<f64>,
    height_max: f64,
    origin: Origin,
}

impl ZeroOrdinates {
    pub fn new(ordinates: Vec<f64>, height_max: f64, origin: Origin) -> Result<Self> {
        let Some(&last) = ordinates.last() else {
            return Err(LabError::MalformedDataset("no ordinates".into()));
        };
        if let Some(bad) = ordinates.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(LabError::MalformedDataset(format!(
                "ordinate {bad} is not a positive finite number"
            )));
        }
        if let Some(i) = ordinates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(LabError::MalformedDataset(format!(
                "ordinates not strictly increasing at entry {} ({} then {})",
                i + 2,
                ordinates[i],
                ordinates[i + 1]
            )));
        }
        if !(height_max <= last) {
            return Err(LabError::MalformedDataset(format!(
                "height_max {height_max} above last ordinate {last}"
            )));
        }
        if origin == Origin::RiemannFile && (ordinates[0] - FIRST_ZERO).abs() > 1e-5 {
            return Err(LabError::MalformedDataset(format!(
                "first ordinate {} is not the first zeta zero",
                ordinates[0]
            )));
        }
        Ok(ZeroOrdinates {
            ordinates,
            height_max,
            origin,
        })
    }

    /// Parse the plain-text format: one decimal ordinate per line, `#`
    /// comments and blank lines ignored. A `# origin: <tag>` comment marks a
    /// synthetic set; without one the file is taken as genuine zeros.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ordinates = Vec::new();
        let mut origin = Origin::RiemannFile;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(tag) = comment.trim().strip_prefix("origin:") {
                    origin = Origin::from_tag(tag.trim()).ok_or_else(|| LabError::Parse {
                        line: i + 1,
                        message: format!("unknown origin {:?}", tag.trim()),
                    })?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let value: f64 = line.parse().map_err(|_| LabError::Parse {
                line: i + 1,
                message: format!("not a decimal ordinate: {line:?}"),
            })?;
            ordinates.push(value);
        }
        let height_max = ordinates.last().copied().unwrap_or(0.0);
        Self::new(ordinates, height_max, origin)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text)
    }

    /// Plain-text serialization accepted by [`ZeroOrdinates::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.ordinates.len() * 16 + 64);
        let _ = writeln!(out, "# origin: {}", self.origin.tag());
        let _ = writeln!(out, "# count: {}", self.ordinates.len());
        for g in &self.ordinates {
            let _ = writeln!(out, "{g:.9}");
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| LabError::io(path, e))
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn height_max(&self) -> f64 {
        self.height_max
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// N_data(T) = #{γ ≤ T}.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= t)
    }

    /// N_data(T) minus the smooth Riemann–von Mangoldt count.
    pub fn rvm_deviation(&self, t: f64) -> Result<f64> {
        if !(2.0..=self.height_max).contains(&t) {
            return Err(LabError::HeightExceeded {
                requested: t,
                available: self.height_max,
            });
        }
        Ok(self.count_up_to(t) as f64 - smooth_count(t))
    }

    /// All ordinates in (0, T]. Never truncates silently: T above the usable
    /// height is an error.
    pub fn window(&self, t: f64) -> Result<SignedZeroWindow<'_>> {
        if t > self.height_max {
            return Err(LabError::HeightExceeded {
                requested: t,
                available: self.height_max,
            });
        }
        if !(t > 0.0) {
            return Err(LabError::InvalidArgument(format!("window height {t} must be positive")));
        }
        let n = self.count_up_to(t);
        Ok(SignedZeroWindow {
            positives: &self.ordinates[..n],
            height: t,
        })
    }
}

/// The symmetric zero set {±γ : 0 < γ ≤ T}, stored by its positive half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedZeroWindow<'a> {
    positives: &'a [f64],
    height: f64,
}

impl<'a> SignedZeroWindow<'a> {
    /// Window over an arbitrary ascending list (used for synthetic sets and
    /// hand-built cases).
    pub fn new(positives: &'a [f64], height: f64) -> Result<Self> {
        if positives.iter().any(|g| !(*g > 0.0 && *g <= height)) {
            return Err(LabError::InvalidArgument(format!(
                "window ordinates must lie in (0, {height}]"
            )));
        }
        if positives.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::InvalidArgument("window ordinates must be strictly increasing".into()));
        }
        Ok(SignedZeroWindow { positives, height })
    }

    pub fn positives(&self) -> &'a [f64] {
        self.positives
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Number of signed zeros, 2·#positives.
    pub fn signed_len(&self) -> usize {
        2 * self.positives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty()
    }

    /// Sub-window with T' ≤ T.
    pub fn rewindow(&self, t: f64) -> Result<SignedZeroWindow<'a>> {
        if t > self.height {
            return Err(LabError::HeightExceeded {
                requested: t,
                available: self.height,
            });
        }
        let n = self.positives.partition_point(|&g| g <= t);
        Ok(SignedZeroWindow {
            positives: &self.positives[..n],
            height: t,
        })
    }

    /// Materialized signed list, ascending. Reference path for tests.
    pub fn signed_list(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.positives.iter().rev().map(|g| -g).collect();
        out.extend_from_slice(self.positives);
        out
    }
}

/// (T/2π)·log(T/(2πe)) + 7/8.
pub fn smooth_count(t: f64) -> f64 {
    t / (2.0 * PI) * (t / (2.0 * PI * E)).ln() + 0.875
}

/// Zero density (1/2π)·log(t/2π).
pub fn zero_density(t: f64) -> f64 {
    (t / (2.0 * PI)).ln() / (2.0 * PI)
}

/// Explicit bound on |N(T) − smooth_count(T)| (Rosser-type constants,
/// loosened), valid for T ≥ e.
pub fn rvm_error_bound(t: f64) -> f64 {
    let t = t.max(E);
    0.137 * t.ln() + 0.443 * t.ln().max(1.0).ln() + 2.5
}

/// Solve smooth_count(t) = u for t > 2π.
pub fn inverse_smooth_count(u: f64) -> f64 {
    let mut t = 4.0 * PI * E;
    while smooth_count(t) < u {
        t *= 2.0;
    }
    for _ in 0..100 {
        let step = (smooth_count(t) - u) / zero_density(t);
        t -= step;
        if step.abs() <= 1e-14 * t {
            break;
        }
    }
    t
}

/// Synthetic contrast models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthModel {
    /// Ordinates at the solutions of smooth_count(t) = n, n = 1, 2, ...
    Picket,
    /// Inhomogeneous Poisson process with intensity (1/2π)·log(t/2π).
    Poisson,
}

impl std::str::FromStr for SynthModel {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picket" => Ok(SynthModel::Picket),
            "poisson" => Ok(SynthModel::Poisson),
            other => Err(LabError::InvalidArgument(format!("unknown model {other:?}"))),
        }
    }
}

const POISSON_START: f64 = 10.0;

/// Synthetic ordinates up to height `t_max` (≥ 20). The picket model ignores
/// `seed`.
pub fn synth_zeros(model: SynthModel, t_max: f64, seed: u64) -> Result<ZeroOrdinates> {
    if !(t_max >= 20.0) {
        return Err(LabError::RangeViolation(format!("synthesis height {t_max} below 20")));
    }
    let mut ordinates = Vec::with_capacity(smooth_count(t_max) as usize + 16);
    let origin = match model {
        SynthModel::Picket => {
            let mut n = 1u64;
            loop {
                let t = inverse_smooth_count(n as f64);
                if t > t_max {
                    break;
                }
                ordinates.push(t);
                n += 1;
            }
            Origin::PicketModel
        }
        SynthModel::Poisson => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut u = smooth_count(POISSON_START);
            loop {
                let gap: f64 = Exp1.sample(&mut rng);
                u += gap;
                let t = inverse_smooth_count(u);
                if t > t_max {
                    break;
                }
                if ordinates.last().is_some_and(|&last| t <= last) {
                    continue;
                }
                ordinates.push(t);
            }
            Origin::PoissonModel
        }
    };
    let height = *ordinates.last().ok_or_else(|| LabError::MalformedDataset("empty synthesis".into()))?;
    ZeroOrdinates::new(ordinates, height, origin)
}
