use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pclab_core::arith::{cache, s_sum, s_tilde, sieve_lambda, SWeightParams};
use pclab_core::paircorr::{f_tau, PairCorrParams};
use pclab_core::report::{self, emit_csv, evaluate, Family, GridPoint, Inputs, Settings};
use pclab_core::zerodata::{riemann_siegel, synth_zeros, SynthModel};
use pclab_core::{LambdaTable, Origin, QuadratureSpec, ReportRow, RunConfig, Status, ZeroOrdinates};

#[derive(Parser)]
#[command(name = "pclab", version, about = "Pair correlation of zeta zeros and primes in short intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zero datasets.
    #[command(subcommand)]
    Zeros(ZerosCmd),
    /// Sieve tables and the weighted prime sums.
    #[command(subcommand)]
    Arith(ArithCmd),
    /// Pair-correlation sums and their identities.
    #[command(subcommand)]
    Pc(PcCmd),
    /// The explicit formula at σ = 1/2 + 1/τ.
    #[command(subcommand)]
    Explicit(ExplicitCmd),
    /// Asymptotic comparisons over a grid.
    #[command(subcommand)]
    Asympt(AsymptCmd),
    /// Short-interval mean squares.
    #[command(subcommand)]
    Si(SiCmd),
    /// Run every family of a config and write <family>.csv and <family>.svg.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum ZerosCmd {
    /// Parse a zero file and report its Riemann–von Mangoldt deviation.
    Validate {
        path: PathBuf,
        /// Heights at which to print N(T) − smooth(T); by default the worst
        /// deviation over 1000 even steps is printed.
        #[arg(long, value_delimiter = ',')]
        rvm_grid: Vec<f64>,
    },
    /// Write synthetic ordinates.
    Synth {
        #[arg(long, default_value = "picket")]
        model: SynthModel,
        #[arg(long = "T", alias = "t-max")]
        t_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the first `count` zeros with the Riemann–Siegel formula.
    Compute {
        #[arg(long, value_parser = parse_count)]
        count: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ArithCmd {
    /// Sieve Λ(n) for n ≤ N and write the binary cache.
    Sieve {
        #[arg(long = "N", value_parser = parse_count)]
        n: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// S(X, τ), or S̃ with --tilde.
    S {
        #[arg(long = "X")]
        x: f64,
        #[arg(long)]
        tau: f64,
        /// Sieve cache; without one the table is sieved to --N in memory.
        #[arg(long)]
        sieve: Option<PathBuf>,
        #[arg(long = "N", value_parser = parse_count, default_value = "1e7")]
        n: u64,
        #[arg(long, default_value_t = 1e-3)]
        tail_tol: f64,
        #[arg(long)]
        tilde: bool,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long = "X")]
    x: f64,
    #[arg(long = "T")]
    t: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    zeros: PathBuf,
}

#[derive(Subcommand)]
enum PcCmd {
    /// F(X, T, τ); with --sieve, against the two-term asymptotic.
    Ftau {
        #[command(flatten)]
        pair: PairArgs,
        /// Drop pairs whose weight is below this.
        #[arg(long, default_value_t = 1e-6)]
        pair_tol: f64,
        /// Sum every pair.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        sieve: Option<PathBuf>,
    },
    /// F(X, T, τ) against its integral over F(·, T).
    Identity18 {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Quadrature of the product of two Lorentzians against its closed form.
    CheckResidue {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        gamma_p: f64,
        #[arg(long)]
        tau: f64,
    },
}

#[derive(Subcommand)]
enum ExplicitCmd {
    Verify {
        #[arg(long = "X")]
        x: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long)]
        sieve: PathBuf,
        #[arg(long, default_value_t = 5000.0)]
        zero_t: f64,
        #[arg(long, value_parser = parse_count)]
        prime_n: Option<u64>,
    },
}

#[derive(Subcommand)]
enum AsymptCmd {
    /// Evaluate every grid of a config; CSV on stdout.
    Sweep {
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[arg(long)]
        sieve: Option<PathBuf>,
        #[arg(long)]
        grid: PathBuf,
    },
}

#[derive(Subcommand)]
enum SiCmd {
    J {
        #[arg(long = "X")]
        x: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        sieve: PathBuf,
    },
    Lemma10 {
        #[arg(long = "X")]
        x: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long)]
        sieve: PathBuf,
        /// Zero height; defaults to X·log²X.
        #[arg(long = "Z")]
        z: Option<f64>,
    },
}

/// Integers written as `100000000` or `1e8`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("not a nonnegative integer: {s:?}"))
    }
}

fn load_zeros(path: &Path) -> Result<ZeroOrdinates> {
    ZeroOrdinates::read(path).with_context(|| format!("reading zeros from {}", path.display()))
}

fn load_table(path: &Path) -> Result<LambdaTable> {
    cache::load(path).with_context(|| format!("reading sieve cache {}", path.display()))
}

fn print_rows(rows: &[ReportRow]) {
    print!("{}", emit_csv(rows));
    for r in rows.iter().filter(|r| !r.note.is_empty()) {
        eprintln!("{} {:?}: {}", r.family.tag(), r.point, r.note);
    }
}

fn point(x: f64, t: f64, tau: f64, theta: Option<f64>) -> GridPoint {
    GridPoint { x, t, tau, theta }
}

fn one_row(
    family: Family,
    p: GridPoint,
    zeros: Option<&ZeroOrdinates>,
    table: Option<&LambdaTable>,
    settings: &Settings,
) -> Result<()> {
    let row = evaluate(family, &p, &Inputs { zeros, table, settings })?;
    print_rows(std::slice::from_ref(&row));
    if row.status == Status::Fail {
        bail!("{} check failed", family.tag());
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let defaults = Settings::default();
    match cli.command {
        Command::Zeros(cmd) => match cmd {
            ZerosCmd::Validate { path, rvm_grid } => {
                let z = load_zeros(&path)?;
                let top = z.height_max();
                println!("origin {}", z.origin().tag());
                println!("count {}", z.len());
                println!("height_max {top}");
                if rvm_grid.is_empty() {
                    let mut worst: f64 = 0.0;
                    let steps = 1000;
                    for i in 1..=steps {
                        let t = 2.0 + (top - 2.0) * i as f64 / steps as f64;
                        worst = worst.max(z.rvm_deviation(t)?.abs());
                    }
                    println!("max |N(T) - smooth(T)| on {steps} heights: {worst:.3}");
                } else {
                    for t in rvm_grid {
                        println!("deviation {t} {:.6}", z.rvm_deviation(t)?);
                    }
                }
            }
            ZerosCmd::Synth { model, t_max, seed, out } => {
                synth_zeros(model, t_max, seed)?.write(&out)?;
            }
            ZerosCmd::Compute { count, out } => {
                let g = riemann_siegel::compute_zeros(usize::try_from(count)?)?;
                let top = *g.last().context("no zeros requested")?;
                ZeroOrdinates::new(g, top, Origin::RiemannFile)?.write(&out)?;
            }
        },
        Command::Arith(cmd) => match cmd {
            ArithCmd::Sieve { n, out } => {
                let table = sieve_lambda(n)?;
                cache::save(&table, &out)?;
                println!("{} prime powers up to {n}", table.len());
            }
            ArithCmd::S {
                x,
                tau,
                sieve,
                n,
                tail_tol,
                tilde,
            } => {
                let table = match sieve {
                    Some(path) => load_table(&path)?,
                    None => sieve_lambda(n)?,
                };
                let params = SWeightParams::new(x, tau, tail_tol)?;
                let v = if tilde {
                    s_tilde(&params, &table)?
                } else {
                    s_sum(&params, &table)?
                };
                println!("value {:.16e}", v.value);
                println!("tail_bound {:.16e}", v.tail_bound);
                println!("ratio_to_tau_log_x {:.16e}", v.value / (tau * x.ln()));
            }
        },
        Command::Pc(cmd) => match cmd {
            PcCmd::Ftau {
                pair,
                pair_tol,
                exact,
                sieve,
            } => {
                let pair_tol = if exact { 0.0 } else { pair_tol };
                let zeros = load_zeros(&pair.zeros)?;
                let p = point(pair.x, pair.t, pair.tau, None);
                let settings = Settings { pair_tol, ..defaults };
                match sieve {
                    Some(path) => {
                        let table = load_table(&path)?;
                        one_row(Family::Ftau, p, Some(&zeros), Some(&table), &settings)?;
                    }
                    None => {
                        let win = zeros.window(pair.t)?;
                        let f = f_tau(&win, &PairCorrParams::new(pair.x, pair.t, pair.tau, pair_tol)?)?;
                        let row = ReportRow {
                            family: Family::Ftau,
                            point: p,
                            computed: Some(f.value),
                            reference: None,
                            ratio: None,
                            budget: Some(f.truncation_bound),
                            status: Status::Monitored,
                            note: String::new(),
                        };
                        print_rows(&[row]);
                    }
                }
            }
            PcCmd::Identity18 { pair } => {
                let zeros = load_zeros(&pair.zeros)?;
                one_row(Family::Hbg, point(pair.x, pair.t, pair.tau, None), Some(&zeros), None, &defaults)?;
            }
            PcCmd::CheckResidue { gamma, gamma_p, tau } => {
                let settings = Settings {
                    tolerances: QuadratureSpec::with_tolerances(1e-12, 1e-12),
                    ..defaults
                };
                one_row(Family::Residue, point(gamma, gamma_p, tau, None), None, None, &settings)?;
            }
        },
        Command::Explicit(ExplicitCmd::Verify {
            x,
            t,
            tau,
            zeros,
            sieve,
            zero_t,
            prime_n,
        }) => {
            let z = load_zeros(&zeros)?;
            let table = load_table(&sieve)?;
            let settings = Settings {
                lemma4_zero_height: zero_t,
                lemma4_prime_n: prime_n.unwrap_or(table.range_end()),
                ..defaults
            };
            one_row(Family::Lemma4, point(x, t, tau, None), Some(&z), Some(&table), &settings)?;
        }
        Command::Asympt(AsymptCmd::Sweep { zeros, sieve, grid }) => {
            let mut cfg = RunConfig::load(&grid)?;
            if zeros.is_some() {
                cfg.zero_path = zeros;
            }
            if sieve.is_some() {
                cfg.sieve_cache_path = sieve;
            }
            print_rows(&report::run(&cfg)?);
        }
        Command::Si(cmd) => match cmd {
            SiCmd::J { x, tau, theta, sieve } => {
                let table = load_table(&sieve)?;
                one_row(Family::J, point(x, 0.0, tau, Some(theta)), None, Some(&table), &defaults)?;
            }
            SiCmd::Lemma10 {
                x,
                tau,
                theta,
                zeros,
                sieve,
                z,
            } => {
                let zs = load_zeros(&zeros)?;
                let table = load_table(&sieve)?;
                let z = z.unwrap_or(x * x.ln().powi(2));
                one_row(Family::Lemma10, point(x, z, tau, Some(theta)), Some(&zs), Some(&table), &defaults)?;
            }
        },
        Command::Run { config, out_dir } => {
            let cfg = RunConfig::load(&config)?;
            let rows = report::run(&cfg)?;
            for path in report::write_outputs(&cfg, &rows, &out_dir)? {
                println!("{}", path.display());
            }
            for r in rows.iter().filter(|r| !r.note.is_empty()) {
                eprintln!("{} {:?}: {}", r.family.tag(), r.point, r.note);
            }
            let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
            if failed > 0 {
                bail!("{failed} rows failed");
            }
        }
    }
    Ok(())
}
