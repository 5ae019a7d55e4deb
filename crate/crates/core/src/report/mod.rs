//! Experiment orchestration: a TOML run configuration, one evaluator per
//! experiment family, and CSV/SVG emission.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::arith::{cache, s_sum, LambdaTable, SWeightParams};
use crate::asympt::{
    conditions, conjecture_prediction, corollary_ratio, thm1_prediction, ConjectureParams, DEFAULT_EPSILON,
    DEFAULT_LAMBDA, DEFAULT_M,
};
use crate::error::{LabError, Result};
use crate::explicit::{verify_lemma4, Lemma4Params};
use crate::paircorr::{f_tau, hbg_identity_check, residue_identity_check, tau_f_integral_check, PairCorrParams};
use crate::quad::QuadratureSpec;
use crate::shortint::{
    i_integral, i_reference, j_exact, j_rhs, kappa_of, lemma10_check, lemma9_check, ShortIntervalSpec,
};
use crate::sum::Execution;
use crate::zerodata::{synth_zeros, SynthModel, ZeroOrdinates};

mod csv_out;
mod svg;

pub use csv_out::{emit_csv, parse_csv, CSV_HEADER};
pub use svg::{emit_svg, PlotSpec};

/// Experiment families, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// The Lorentzian product integral against its residue closed form; the
    /// X and T columns hold γ and γ'.
    Residue,
    /// F(X, T, τ) against the two main terms of its asymptotic formula.
    Ftau,
    /// The same statistic on picket-model zeros.
    Contrast,
    /// F(X, T, τ) against (T/π)·log min(X, T).
    Conjecture,
    /// π·F/(T·log X).
    Corollary,
    /// τ·F against its integral representation.
    Tauf,
    /// F(X, T, τ) against the integral of F(·, T).
    Hbg,
    /// Explicit formula; the T column holds the evaluation point t.
    Lemma4,
    /// S(X, τ) against τ·log X.
    S,
    /// J(X, τ, θ) against its asymptotic.
    J,
    /// U against J; the T column holds Z.
    Lemma10,
    /// The two sides of the c(θ, ·) smoothing relation; the T column holds Z.
    Lemma9,
    /// I(X, τ, κ) with κ = ½log(1+θ); the T column holds the window height.
    Iint,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Residue => "residue",
            Family::Ftau => "ftau",
            Family::Contrast => "contrast",
            Family::Conjecture => "conjecture",
            Family::Corollary => "corollary",
            Family::Tauf => "tauf",
            Family::Hbg => "hbg",
            Family::Lemma4 => "lemma4",
            Family::S => "s",
            Family::J => "j",
            Family::Lemma10 => "lemma10",
            Family::Lemma9 => "lemma9",
            Family::Iint => "iint",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.tag() == tag)
    }

    pub const ALL: [Family; 13] = [
        Family::Residue,
        Family::Ftau,
        Family::Contrast,
        Family::Conjecture,
        Family::Corollary,
        Family::Tauf,
        Family::Hbg,
        Family::Lemma4,
        Family::S,
        Family::J,
        Family::Lemma10,
        Family::Lemma9,
        Family::Iint,
    ];

    fn needs_zeros(self) -> bool {
        !matches!(self, Family::Residue | Family::S | Family::J | Family::Contrast)
    }

    fn needs_table(self) -> bool {
        matches!(
            self,
            Family::Ftau | Family::Contrast | Family::Lemma4 | Family::S | Family::J | Family::Lemma10
        )
    }
}

/// One grid point, written `[X, T, tau]` or `[X, T, tau, theta]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "Vec<f64>")]
pub struct GridPoint {
    pub x: f64,
    pub t: f64,
    pub tau: f64,
    pub theta: Option<f64>,
}

impl TryFrom<Vec<f64>> for GridPoint {
    type Error = String;

    fn try_from(v: Vec<f64>) -> std::result::Result<Self, String> {
        match v.as_slice() {
            &[x, t, tau] => Ok(GridPoint { x, t, tau, theta: None }),
            &[x, t, tau, theta] => Ok(GridPoint {
                x,
                t,
                tau,
                theta: Some(theta),
            }),
            other => Err(format!("grid point needs 3 or 4 entries, got {}", other.len())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Monitored,
    Skipped,
    Fail,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Monitored => "monitored",
            Status::Skipped => "skipped",
            Status::Fail => "fail",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Status> {
        [Status::Pass, Status::Monitored, Status::Skipped, Status::Fail]
            .into_iter()
            .find(|s| s.tag() == tag)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub family: Family,
    pub point: GridPoint,
    pub computed: Option<f64>,
    pub reference: Option<f64>,
    pub ratio: Option<f64>,
    pub budget: Option<f64>,
    pub status: Status,
    /// Why a row was skipped or failed; not part of the CSV.
    pub note: String,
}

impl ReportRow {
    pub fn new(family: Family, point: GridPoint, computed: f64, reference: f64, budget: Option<f64>, status: Status) -> Self {
        ReportRow {
            family,
            point,
            computed: Some(computed),
            reference: Some(reference),
            ratio: (reference != 0.0).then(|| computed / reference),
            budget,
            status,
            note: String::new(),
        }
    }

    pub fn skipped(family: Family, point: GridPoint, note: impl Into<String>) -> Self {
        ReportRow {
            family,
            point,
            computed: None,
            reference: None,
            ratio: None,
            budget: None,
            status: Status::Skipped,
            note: note.into(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

fn default_sieve_n() -> u64 {
    10_000_000
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_m() -> f64 {
    DEFAULT_M
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

fn default_s_tail_tol() -> f64 {
    1e-3
}

fn default_lemma4_zero_height() -> f64 {
    5000.0
}

fn default_lemma4_prime_n() -> u64 {
    1_000_000
}

fn default_lemma9_window() -> f64 {
    5000.0
}

/// Everything but the inputs and the grids.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(default)]
    pub tolerances: QuadratureSpec,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_m")]
    pub m: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Pair-weight truncation for the F families; 0 is exact.
    #[serde(default)]
    pub pair_tol: f64,
    /// Relative tail tolerance of S(X, τ).
    #[serde(default = "default_s_tail_tol")]
    pub s_tail_tol: f64,
    #[serde(default = "default_lemma4_zero_height")]
    pub lemma4_zero_height: f64,
    #[serde(default = "default_lemma4_prime_n")]
    pub lemma4_prime_n: u64,
    #[serde(default = "default_lemma9_window")]
    pub lemma9_window: f64,
    #[serde(default)]
    pub exec: ExecChoice,
}

impl Default for Settings {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecChoice {
    Serial,
    #[default]
    Parallel,
}

impl From<ExecChoice> for Execution {
    fn from(c: ExecChoice) -> Self {
        match c {
            ExecChoice::Serial => Execution::Serial,
            ExecChoice::Parallel => Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub zero_path: Option<PathBuf>,
    pub sieve_cache_path: Option<PathBuf>,
    /// Sieve range used when the cache is missing or covers another range.
    #[serde(default = "default_sieve_n")]
    pub sieve_n: u64,
    #[serde(default)]
    pub settings: Settings,
    #[serde(default)]
    pub grids: BTreeMap<Family, Vec<GridPoint>>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::InvalidArgument(format!("config: {e}")))
    }

    /// Read a config; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.zero_path, &mut cfg.sieve_cache_path].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Datasets shared by the evaluators.
#[derive(Debug, Clone, Copy)]
pub struct Inputs<'a> {
    pub zeros: Option<&'a ZeroOrdinates>,
    pub table: Option<&'a LambdaTable>,
    pub settings: &'a Settings,
}

impl<'a> Inputs<'a> {
    fn zeros(&self) -> Result<&'a ZeroOrdinates> {
        self.zeros
            .ok_or_else(|| LabError::InvalidArgument("this family needs a zero dataset".into()))
    }

    fn table(&self) -> Result<&'a LambdaTable> {
        self.table
            .ok_or_else(|| LabError::InvalidArgument("this family needs a sieve table".into()))
    }

    fn exec(&self) -> Execution {
        self.settings.exec.into()
    }
}

fn theta_of(p: &GridPoint) -> Result<f64> {
    p.theta
        .ok_or_else(|| LabError::InvalidArgument("grid point needs theta".into()))
}

fn s_value(x: f64, tau: f64, inputs: &Inputs<'_>) -> Result<f64> {
    let params = SWeightParams::new(x, tau, inputs.settings.s_tail_tol)?.with_execution(inputs.exec());
    Ok(s_sum(&params, inputs.table()?)?.value)
}

fn f_value(zeros: &ZeroOrdinates, p: &GridPoint, inputs: &Inputs<'_>) -> Result<(f64, f64)> {
    let win = zeros.window(p.t)?;
    let params = PairCorrParams::new(p.x, p.t, p.tau, inputs.settings.pair_tol)?.with_execution(inputs.exec());
    let f = f_tau(&win, &params)?;
    Ok((f.value, f.truncation_bound))
}

fn thm1_row(family: Family, zeros: &ZeroOrdinates, p: &GridPoint, inputs: &Inputs<'_>) -> Result<ReportRow> {
    let (f, truncation) = f_value(zeros, p, inputs)?;
    let s = s_value(p.x, p.tau, inputs)?;
    let s2 = {
        let params = SWeightParams::new(p.x, p.tau, inputs.settings.s_tail_tol)?
            .doubled()
            .with_execution(inputs.exec());
        s_sum(&params, inputs.table()?)?.value
    };
    let pred = thm1_prediction(p.x, p.t, p.tau, s);
    let cond = conditions(p.x, p.t, p.tau, s, s2);
    let lambda = inputs.settings.lambda;
    let in_regime = cond.satisfied(lambda) || cond.relaxed_satisfied(lambda);
    let status = if in_regime { Status::Monitored } else { Status::Skipped };
    let row = ReportRow::new(family, *p, f, pred.total(), Some(truncation + pred.err_scale), status);
    Ok(if in_regime { row } else { row.with_note("outside the asymptotic regime") })
}

/// Evaluate one grid point. Precondition failures become skipped rows;
/// other errors propagate.
pub fn evaluate(family: Family, p: &GridPoint, inputs: &Inputs<'_>) -> Result<ReportRow> {
    match evaluate_inner(family, p, inputs) {
        Err(e @ (LabError::RangeViolation(_) | LabError::HeightExceeded { .. } | LabError::InsufficientHeight { .. })) => {
            Ok(ReportRow::skipped(family, *p, e.to_string()))
        }
        Err(e @ LabError::InsufficientSieve { .. }) => Ok(ReportRow::skipped(family, *p, e.to_string())),
        other => other,
    }
}

fn evaluate_inner(family: Family, p: &GridPoint, inputs: &Inputs<'_>) -> Result<ReportRow> {
    let settings = inputs.settings;
    let q = &settings.tolerances;
    match family {
        Family::Residue => {
            let (lhs, rhs) = residue_identity_check(p.x, p.t, p.tau, q)?;
            let status = pass_if((lhs.value - rhs).abs() <= lhs.budget());
            Ok(ReportRow::new(family, *p, lhs.value, rhs, Some(lhs.budget()), status))
        }
        Family::Ftau => thm1_row(family, inputs.zeros()?, p, inputs),
        Family::Contrast => {
            let model = synth_zeros(SynthModel::Picket, p.t + 10.0, 0)?;
            thm1_row(family, &model, p, inputs)
        }
        Family::Conjecture => {
            let (f, truncation) = f_value(inputs.zeros()?, p, inputs)?;
            let cp = ConjectureParams::new(p.x, p.t, settings.m, settings.epsilon)?;
            let (value, applicable) = conjecture_prediction(p.t, p.tau, &cp);
            let status = if applicable { Status::Monitored } else { Status::Skipped };
            let row = ReportRow::new(family, *p, f, value, Some(truncation), status);
            Ok(if applicable { row } else { row.with_note("outside the conjectured range") })
        }
        Family::Corollary => {
            let (f, truncation) = f_value(inputs.zeros()?, p, inputs)?;
            corollary_ratio(f, p.x, p.t, settings.epsilon)?;
            Ok(ReportRow::new(family, *p, f, p.t / PI * p.x.ln(), Some(truncation), Status::Monitored))
        }
        Family::Tauf => {
            let win = inputs.zeros()?.window(p.t)?;
            let c = tau_f_integral_check(&win, p.x, p.tau, q)?;
            let budget = c.lhs.budget() + 1e-12 * c.rhs.abs();
            let status = pass_if((c.lhs.value - c.rhs).abs() <= budget);
            Ok(ReportRow::new(family, *p, c.lhs.value, c.rhs, Some(budget), status))
        }
        Family::Hbg => {
            let c = hbg_identity_check(inputs.zeros()?, p.x, p.t, p.tau, q)?;
            let status = pass_if((c.lhs - c.rhs).abs() <= c.budget);
            let row = ReportRow::new(family, *p, c.lhs, c.rhs, Some(c.budget), status);
            Ok(if c.cancellation_flagged() {
                row.with_note(format!("{:.1} digits cancelled", c.cancellation_digits))
            } else {
                row
            })
        }
        Family::Lemma4 => {
            let zeros = inputs.zeros()?;
            let params = Lemma4Params::new(p.x, p.t, p.tau, settings.lemma4_zero_height, settings.lemma4_prime_n)?;
            let win = zeros.window(params.zero_height)?;
            let r = verify_lemma4(&params, &win, inputs.table()?)?;
            let status = pass_if(r.passes());
            Ok(ReportRow::new(family, *p, r.lhs.re, r.rhs.re, Some(r.budget), status))
        }
        Family::S => {
            let s = s_value(p.x, p.tau, inputs)?;
            Ok(ReportRow::new(family, *p, s, p.tau * p.x.ln(), None, Status::Monitored))
        }
        Family::J => {
            let spec = ShortIntervalSpec::new(p.x, p.tau, theta_of(p)?)?;
            let j = j_exact(&spec, inputs.table()?, inputs.exec())?;
            Ok(ReportRow::new(family, *p, j, j_rhs(&spec), None, Status::Monitored))
        }
        Family::Lemma10 => {
            let spec = ShortIntervalSpec::new(p.x, p.tau, theta_of(p)?)?;
            let win = inputs.zeros()?.window(p.t)?;
            let r = lemma10_check(&spec, inputs.table()?, &win, p.t, inputs.exec())?;
            Ok(ReportRow::new(family, *p, r.u, r.j, None, Status::Monitored))
        }
        Family::Lemma9 => {
            let win = inputs.zeros()?.window(settings.lemma9_window)?;
            let r = lemma9_check(theta_of(p)?, p.tau, p.x, p.t, &win, q)?;
            Ok(ReportRow::new(family, *p, r.lhs.value, r.rhs, Some(r.err_scale), Status::Monitored))
        }
        Family::Iint => {
            let kappa = kappa_of(theta_of(p)?);
            let win = inputs.zeros()?.window(p.t)?;
            let i = i_integral(&win, p.x, p.tau, kappa, q)?;
            Ok(ReportRow::new(family, *p, i.value, i_reference(kappa), Some(i.budget()), Status::Monitored))
        }
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Load the inputs a config needs and evaluate every grid point. Rows are
/// computed in parallel and returned in grid order.
pub fn run(config: &RunConfig) -> Result<Vec<ReportRow>> {
    let families: Vec<Family> = config.grids.iter().filter(|(_, g)| !g.is_empty()).map(|(f, _)| *f).collect();
    let zeros = if families.iter().any(|f| f.needs_zeros()) {
        let path = config
            .zero_path
            .as_ref()
            .ok_or_else(|| LabError::InvalidArgument("config needs zero_path".into()))?;
        Some(ZeroOrdinates::read(path)?)
    } else {
        None
    };
    let table = if families.iter().any(|f| f.needs_table()) {
        Some(match &config.sieve_cache_path {
            Some(path) => cache::load_or_sieve(path, config.sieve_n)?,
            None => crate::arith::sieve_lambda(config.sieve_n)?,
        })
    } else {
        None
    };
    let inputs = Inputs {
        zeros: zeros.as_ref(),
        table: table.as_ref(),
        settings: &config.settings,
    };
    let jobs: Vec<(Family, GridPoint)> = config
        .grids
        .iter()
        .flat_map(|(f, g)| g.iter().map(move |p| (*f, *p)))
        .collect();
    jobs.par_iter().map(|(f, p)| evaluate(*f, p, &inputs)).collect()
}

/// Write `<family>.csv` and `<family>.svg` for every family in the config,
/// including families with an empty grid.
pub fn write_outputs(config: &RunConfig, rows: &[ReportRow], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| LabError::io(out_dir, e))?;
    let mut written = Vec::new();
    for family in config.grids.keys() {
        let subset: Vec<ReportRow> = rows.iter().filter(|r| r.family == *family).cloned().collect();
        let csv_path = out_dir.join(format!("{}.csv", family.tag()));
        std::fs::write(&csv_path, emit_csv(&subset)).map_err(|e| LabError::io(&csv_path, e))?;
        let svg_path = out_dir.join(format!("{}.svg", family.tag()));
        let spec = PlotSpec::for_family(*family);
        std::fs::write(&svg_path, emit_svg(&subset, &spec)).map_err(|e| LabError::io(&svg_path, e))?;
        written.push(csv_path);
        written.push(svg_path);
    }
    Ok(written)
}
