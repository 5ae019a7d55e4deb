//! End-to-end acceptance run. Prints one verdict line per criterion, with the
//! measurements behind it indented underneath, and exits nonzero on any
//! failure.

mod fixture;

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pclab_core::arith::{s_sum, s_tilde, sieve_lambda, SWeightParams};
use pclab_core::asympt::thm1_prediction;
use pclab_core::explicit::{verify_lemma4, Lemma4Params};
use pclab_core::paircorr::{
    f_tau, f_tau_materialized, hbg_identity_check, residue_identity_check, tau_f_integral_check, PairCorrParams,
};
use pclab_core::shortint::{
    c_coeff, j_exact, j_rhs, lemma10_check, oracle, sv_integral, u_integral, ShortIntervalSpec, SVSpec, UParams,
};
use pclab_core::zerodata::{synth_zeros, SynthModel};
use pclab_core::{Execution, LambdaTable, QuadratureSpec, SignedZeroWindow, ZeroOrdinates};

// Tolerances and bands.
const RESIDUE_ABS: f64 = 1e-9;
const WINDOWED_REL: f64 = 1e-10;
const WINDOWED_PAIR_TOL: f64 = 1e-12;
const RECIPROCAL_REL: f64 = 1e-12;
const RANDOM_POINTS: usize = 50;
const TAUF_REL: f64 = 1e-6;
const HBG_BUDGET_REL: f64 = 1e-2;
const HBG_COLLAPSE_REL: f64 = 1e-12;
const LEMMA4_REL: f64 = 1e-3;
const LEMMA4_ZERO_HEIGHT: f64 = 5000.0;
const LEMMA4_PRIME_N: u64 = 1_000_000;
const ORACLE_REL: f64 = 1e-6;
const ORACLE_PANELS: usize = 100_000_000;
const SINGLE_ZERO_REL: f64 = 1e-10;
const TRIAL_DIVISION_N: u64 = 100_000;
const S_UNIT_BAND: (f64, f64) = (0.8, 1.2);
const S_TAU_BAND: (f64, f64) = (0.5, 1.5);
const PAIR_BAND: (f64, f64) = (0.75, 1.25);
const PICKET_EXCLUDED: (f64, f64) = (0.9, 1.1);
const BANDED_PAIR_TOL: f64 = 1e-6;
const CONJECTURE_BAND: (f64, f64) = (0.5, 1.5);
const J_BAND: (f64, f64) = (0.6, 1.4);
const LEMMA10_REL: f64 = 0.15;
const DETERMINISM_REL: f64 = 1e-12;

const SMALL_SIEVE: u64 = 10_000_000;
const LARGE_SIEVE: u64 = 100_000_000;

struct Inputs {
    zeros: ZeroOrdinates,
    small: LambdaTable,
    large: LambdaTable,
}

/// Measurements of one criterion.
#[derive(Default)]
struct Log {
    lines: Vec<(bool, String)>,
}

impl Log {
    fn check(&mut self, ok: bool, line: String) {
        self.lines.push((ok, line));
    }

    fn passed(&self) -> bool {
        self.lines.iter().all(|(ok, _)| *ok)
    }
}

fn within(v: f64, (lo, hi): (f64, f64)) -> bool {
    v.is_finite() && v >= lo && v <= hi
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn quadrature_engine(log: &mut Log) -> Result<()> {
    let q = QuadratureSpec::with_tolerances(1e-12, 1e-12);
    for tau in [0.1, 0.5, 1.0] {
        for (g, gp) in [(0.0, 0.0), (0.0, 1.0), (0.0, 10.0), (14.13, 21.02)] {
            let (lhs, rhs) = residue_identity_check(g, gp, tau, &q)?;
            let gap = (lhs.value - rhs).abs();
            log.check(gap <= RESIDUE_ABS, format!("tau={tau} ({g}, {gp}): gap {gap:.2e}"));
        }
    }
    Ok(())
}

fn exact_identities(inp: &Inputs, log: &mut Log) -> Result<()> {
    let z = &inp.zeros;

    // a. Windowed against the dense double sum on the first 2000 zeros.
    let top = z.ordinates()[1999];
    let win = z.window(top)?;
    for (x, tau) in [(10.0, 1.0), (1e3, 0.5), (1e5, 0.2)] {
        let fast = f_tau(&win, &PairCorrParams::new(x, top, tau, WINDOWED_PAIR_TOL)?)?;
        let slow = f_tau_materialized(&win, x, tau);
        let r = rel(fast.value, slow);
        log.check(r <= WINDOWED_REL, format!("a. X={x} tau={tau}: windowed vs dense rel {r:.2e}"));
    }

    // b. Reciprocity and the truncation floor at seeded random points.
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut worst = 0.0f64;
    let mut floor_ok = true;
    for _ in 0..RANDOM_POINTS {
        let x = rng.random_range(0.0f64..10.0).exp();
        let t = rng.random_range(100.0..5000.0);
        let tau = rng.random_range(0.05..1.0);
        let win = z.window(t)?;
        let up = f_tau(&win, &PairCorrParams::new(x, t, tau, BANDED_PAIR_TOL)?)?;
        let down = f_tau(&win, &PairCorrParams::new(1.0 / x, t, tau, BANDED_PAIR_TOL)?)?;
        worst = worst.max(rel(up.value, down.value));
        floor_ok &= up.value >= -up.truncation_bound && down.value >= -down.truncation_bound;
    }
    log.check(worst <= RECIPROCAL_REL, format!("b. F(X) vs F(1/X), worst rel {worst:.2e} over {RANDOM_POINTS} points"));
    log.check(floor_ok, format!("b. F >= -truncation_bound at every point: {floor_ok}"));

    // c. The integral representation of τF.
    let win = z.window(500.0)?;
    for tau in [1.0, 0.25] {
        let c = tau_f_integral_check(&win, 10.0, tau, &QuadratureSpec::default())?;
        let r = (c.lhs.value - c.rhs).abs() / c.rhs;
        log.check(r <= TAUF_REL, format!("c. (10, 500, {tau}): rel {r:.2e}"));
    }

    // d. F(X,T,τ) through the integral over F(·,T).
    let q = QuadratureSpec::default();
    let c = hbg_identity_check(z, 50.0, 2000.0, 0.8, &q)?;
    let gap = (c.lhs - c.rhs).abs();
    log.check(
        gap <= c.budget && c.budget / c.lhs.abs() <= HBG_BUDGET_REL,
        format!("d. (50, 2000, 0.8): gap {gap:.2e}, budget {:.2e}, budget/lhs {:.2e}", c.budget, c.budget / c.lhs.abs()),
    );
    let c = hbg_identity_check(z, 50.0, 2000.0, 1.0, &q)?;
    let r = rel(c.lhs, c.rhs);
    log.check(r <= HBG_COLLAPSE_REL, format!("d. tau=1 collapse rel {r:.2e}"));

    // e. The explicit formula.
    let win = z.window(LEMMA4_ZERO_HEIGHT)?;
    for tau in [0.4, 1.0] {
        for t in [2.0, 5.0, 10.0] {
            let p = Lemma4Params::new(50.0, t, tau, LEMMA4_ZERO_HEIGHT, LEMMA4_PRIME_N)?;
            let r = verify_lemma4(&p, &win, &inp.small)?;
            log.check(
                r.passes() && r.relative_gap() <= LEMMA4_REL,
                format!(
                    "e. X=50 t={t} tau={tau}: gap {:.2e}, budget {:.2e}, gap/|lhs| {:.2e}",
                    r.gap,
                    r.budget,
                    r.relative_gap()
                ),
            );
        }
    }
    Ok(())
}

// Λ(n) by factoring n.
fn trial_lambda(n: u64) -> f64 {
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
    if n >= 2 {
        (n as f64).ln()
    } else {
        0.0
    }
}

fn oracle_equivalence(inp: &Inputs, log: &mut Log) -> Result<()> {
    for (x, tau, theta) in [(10.0, 0.5, 0.3), (1e4, 0.5, 0.01)] {
        let spec = ShortIntervalSpec::new(x, tau, theta)?;
        let exact = j_exact(&spec, &inp.small, Execution::Parallel)?;
        let dense = oracle::j_midpoint(&spec, &inp.small, ORACLE_PANELS)?;
        let r = rel(exact, dense);
        log.check(r <= ORACLE_REL, format!("J({x}, {tau}, {theta}) vs midpoint oracle: rel {r:.2e}"));
    }
    let sv = SVSpec::new(1e4, 1e3, 50.0)?;
    let (exact, _) = sv_integral(&sv, &inp.small)?;
    let dense = oracle::sv_midpoint(&sv, &inp.small, ORACLE_PANELS)?;
    let r = rel(exact, dense);
    log.check(r <= ORACLE_REL, format!("SV(1e4, 1e3, 50) vs midpoint oracle: rel {r:.2e}"));

    // U for the first zero alone: c·conj(c)·(B² − A²) plus the oscillating pair.
    let g = [inp.zeros.ordinates()[0]];
    let win = SignedZeroWindow::new(&g, 20.0)?;
    for (x, tau, theta) in [(50.0, 0.5, 0.2), (1e4, 1.0, 0.01)] {
        let spec = ShortIntervalSpec::new(x, tau, theta)?;
        let u = u_integral(&win, &spec, &UParams { z: 20.0, exec: Execution::Serial })?;
        let c = c_coeff(theta, Complex64::new(0.5, g[0]));
        let (a, b) = (spec.x, spec.upper());
        let s = Complex64::new(2.0, 2.0 * g[0]);
        let k = ((s * b.ln()).exp() - (s * a.ln()).exp()) / s;
        let closed = c.norm_sqr() * (b * b - a * a) + 2.0 * (c * c * k).re;
        let r = rel(u, closed);
        log.check(r <= SINGLE_ZERO_REL, format!("U one zero at ({x}, {tau}, {theta}): rel {r:.2e}"));
    }

    let table = sieve_lambda(TRIAL_DIVISION_N)?;
    let mismatches = (1..=TRIAL_DIVISION_N)
        .filter(|&n| table.lambda_at(n) != trial_lambda(n))
        .count();
    log.check(mismatches == 0, format!("sieve vs trial division to {TRIAL_DIVISION_N}: {mismatches} mismatches"));
    Ok(())
}

fn prime_asymptotics(inp: &Inputs, log: &mut Log) -> Result<()> {
    let x = 1e6;
    for tau in [1.0, 0.5, 0.1, 0.05] {
        let s = s_sum(&SWeightParams::new(x, tau, 1e-3)?, &inp.large)?;
        let ratio = s.value / (tau * x.ln());
        let band = if tau == 1.0 { S_UNIT_BAND } else { S_TAU_BAND };
        log.check(
            within(ratio, band),
            format!("S(1e6, {tau})/(tau log X) = {ratio:.4} in [{}, {}]", band.0, band.1),
        );
    }
    let mut violations = Vec::new();
    let mut count = 0;
    for x in [1e2, 1e3, 1e4, 1e5, 1e6] {
        for tau in [0.05, 0.1, 0.25, 0.5] {
            let p = SWeightParams::new(x, tau, 1e-3)?;
            let st = s_tilde(&p, &inp.large)?;
            let s2 = s_sum(&p.doubled(), &inp.large)?;
            count += 1;
            // Truncated S̃ against a certified upper bound for X·S(X, 2τ).
            if st.value > x * (s2.value + s2.tail_bound) {
                violations.push(format!("({x}, {tau})"));
            }
        }
    }
    log.check(
        violations.is_empty(),
        format!("S~ <= X S(X, 2tau) on {count} points; violations: {violations:?}"),
    );
    Ok(())
}

fn thm1_ratio(zeros: &ZeroOrdinates, t: f64, x: f64, s: f64) -> Result<(f64, f64)> {
    let win = zeros.window(t)?;
    let f = f_tau(&win, &PairCorrParams::new(x, t, 1.0, BANDED_PAIR_TOL)?)?;
    let pred = thm1_prediction(x, t, 1.0, s);
    Ok((f.value / pred.total(), f.truncation_bound / pred.total()))
}

fn pair_asymptotics(inp: &Inputs, log: &mut Log) -> Result<()> {
    let t = inp.zeros.height_max();
    let x = t.sqrt();
    let s = s_sum(&SWeightParams::new(x, 1.0, 1e-3)?, &inp.small)?.value;
    let (ratio, slack) = thm1_ratio(&inp.zeros, t, x, s)?;
    log.check(
        within(ratio, PAIR_BAND),
        format!("real zeros T={t:.0} X={x:.1}: piF/prediction = {ratio:.4} (truncation {slack:.1e})"),
    );
    let picket = synth_zeros(SynthModel::Picket, t, 0)?;
    let tp = picket.height_max().min(t);
    let (ratio, _) = thm1_ratio(&picket, tp, x, s)?;
    log.check(
        !within(ratio, PICKET_EXCLUDED),
        format!("picket zeros: piF/prediction = {ratio:.4}, must lie outside [{}, {}]", PICKET_EXCLUDED.0, PICKET_EXCLUDED.1),
    );
    Ok(())
}

fn conjecture_probe(inp: &Inputs, log: &mut Log) -> Result<()> {
    let (x, t, tau) = (1e5, 5000.0, 0.9);
    let win = inp.zeros.window(t)?;
    let f = f_tau(&win, &PairCorrParams::new(x, t, tau, 0.0)?)?;
    let v = PI * f.value / (t * t.ln());
    log.check(
        within(v, CONJECTURE_BAND) && v > 0.0,
        format!("piF/(T log T) at (1e5, 5000, 0.9) = {v:.4}"),
    );
    Ok(())
}

fn short_intervals(inp: &Inputs, log: &mut Log) -> Result<()> {
    let spec = ShortIntervalSpec::new(1e6, 0.5, 1e-3)?;
    let ratio = j_exact(&spec, &inp.small, Execution::Parallel)? / j_rhs(&spec);
    log.check(within(ratio, J_BAND), format!("J/rhs at (1e6, 0.5, 1e-3) = {ratio:.4}"));
    let spec = ShortIntervalSpec::new(500.0, 0.5, 0.05)?;
    let z = 500.0 * 500f64.ln().powi(2);
    let win = inp.zeros.window(z)?;
    let r = lemma10_check(&spec, &inp.small, &win, z, Execution::Parallel)?;
    log.check(
        r.rel_gap <= LEMMA10_REL,
        format!("lemma 10 at (500, 0.5, 0.05), Z={z:.0}: J={:.6e} U={:.6e} rel {:.4}", r.j, r.u, r.rel_gap),
    );
    Ok(())
}

fn run_config() -> String {
    format!(
        r#"
zero_path = "{zeros}"
sieve_cache_path = "{sieve}"
sieve_n = {n}

[settings]
pair_tol = 1e-6

[grids]
ftau = [[50, 2000, 0.8], [274, 74000, 1]]
tauf = [[10, 500, 1], [10, 500, 0.25]]
hbg = [[50, 2000, 0.8]]
lemma4 = [[50, 5, 1], [50, 10, 0.4]]
s = [[1e6, 0, 0.5], [1e4, 0, 0.1]]
j = [[1e5, 0, 0.5, 1e-2]]
lemma10 = [[500, 19400, 0.5, 0.05]]
conjecture = [[1e5, 5000, 0.9]]
contrast = [[274, 74000, 1]]
"#,
        zeros = fixture::zeros_path().display(),
        sieve = fixture::sieve_path(SMALL_SIEVE).display(),
        n = SMALL_SIEVE,
    )
}

fn determinism(inp: &Inputs, log: &mut Log) -> Result<()> {
    let agree = |name: &str, a: f64, b: f64, log: &mut Log| {
        let r = rel(a, b);
        log.check(r <= DETERMINISM_REL, format!("{name}: serial vs parallel rel {r:.2e}"));
    };
    let z = &inp.zeros;
    let top = z.ordinates()[1999];
    let win = z.window(top)?;
    let p = PairCorrParams::new(1e3, top, 0.5, WINDOWED_PAIR_TOL)?;
    let a = f_tau(&win, &p.with_execution(Execution::Serial))?.value;
    let b = f_tau(&win, &p.with_execution(Execution::Parallel))?.value;
    agree("f_tau", a, b, log);

    let p = SWeightParams::new(1e6, 0.5, 1e-3)?;
    let a = s_sum(&p.with_execution(Execution::Serial), &inp.large)?.value;
    let b = s_sum(&p.with_execution(Execution::Parallel), &inp.large)?.value;
    agree("S(1e6, 0.5)", a, b, log);
    let a = s_tilde(&p.with_execution(Execution::Serial), &inp.large)?.value;
    let b = s_tilde(&p.with_execution(Execution::Parallel), &inp.large)?.value;
    agree("S~(1e6, 0.5)", a, b, log);

    let spec = ShortIntervalSpec::new(1e6, 0.5, 1e-3)?;
    let a = j_exact(&spec, &inp.small, Execution::Serial)?;
    let b = j_exact(&spec, &inp.small, Execution::Parallel)?;
    agree("j_exact", a, b, log);

    let spec = ShortIntervalSpec::new(500.0, 0.5, 0.05)?;
    let zh = 500.0 * 500f64.ln().powi(2);
    let win = z.window(zh)?;
    let a = u_integral(&win, &spec, &UParams { z: zh, exec: Execution::Serial })?;
    let b = u_integral(&win, &spec, &UParams { z: zh, exec: Execution::Parallel })?;
    agree("u_integral", a, b, log);

    let scratch = tempfile::tempdir()?;
    let config = scratch.path().join("run.toml");
    std::fs::write(&config, run_config())?;
    let mut outputs = Vec::new();
    for round in 0..2 {
        let out = scratch.path().join(format!("out{round}"));
        let status = Command::new(env!("CARGO_BIN_EXE_pclab"))
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out-dir")
            .arg(&out)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .context("spawning pclab")?;
        if !status.success() {
            bail!("pclab run exited with {status}");
        }
        let mut files: Vec<_> = std::fs::read_dir(&out)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
        files.sort();
        let contents: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|p| Ok((p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(p)?)))
            .collect::<std::io::Result<_>>()?;
        outputs.push(contents);
    }
    log.check(
        outputs[0] == outputs[1],
        format!("pclab run twice: {} files, byte-identical: {}", outputs[0].len(), outputs[0] == outputs[1]),
    );
    Ok(())
}

type Criterion = fn(&Inputs, &mut Log) -> Result<()>;

fn main() {
    let started = Instant::now();
    let inputs = match (|| -> Result<Inputs> {
        Ok(Inputs {
            zeros: fixture::zeros()?,
            small: fixture::sieve(SMALL_SIEVE)?,
            large: fixture::sieve(LARGE_SIEVE)?,
        })
    })() {
        Ok(i) => i,
        Err(e) => {
            eprintln!("acceptance fixtures unavailable: {e:#}");
            std::process::exit(2);
        }
    };
    println!(
        "fixtures: {} zeros to T={:.1}, sieves to {SMALL_SIEVE} and {LARGE_SIEVE} ({:.1?})",
        inputs.zeros.len(),
        inputs.zeros.height_max(),
        started.elapsed()
    );

    let criteria: [(&str, Criterion); 8] = [
        ("1 quadrature engine", |_, log| quadrature_engine(log)),
        ("2 exact identities", exact_identities),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 prime-side asymptotics", prime_asymptotics),
        ("5 pair-correlation asymptotics with contrast", pair_asymptotics),
        ("6 conjecture probe", conjecture_probe),
        ("7 short-interval asymptotics", short_intervals),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t0 = Instant::now();
        let mut log = Log::default();
        if let Err(e) = run(&inputs, &mut log) {
            log.check(false, format!("error: {e:#}"));
        }
        let verdict = if log.passed() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {name} ({:.1?})", t0.elapsed());
        for (ok, line) in &log.lines {
            println!("    {} {line}", if *ok { " " } else { "!" });
        }
        if !log.passed() {
            failed += 1;
        }
    }
    println!("{} of 8 criteria passed in {:.1?}", 8 - failed, started.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
