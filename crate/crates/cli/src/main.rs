//! `mthresh`: exact threshold analysis of monotone families from the command
//! line.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 for usage
//! or input errors, 3 when an instance exceeds an enumeration or LP limit.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::Zero;
use serde_json::json;

use monotone_thresholds::generators::{
    gen_all_k_subsets, gen_graph, gen_random, gen_single, gen_star, GraphSpec, Pattern,
};
use monotone_thresholds::lp;
use monotone_thresholds::measure::{self, EnumConfig};
use monotone_thresholds::moments;
use monotone_thresholds::rational::{self, parse_rational, to_f64};
use monotone_thresholds::structure;
use monotone_thresholds::suite::{builtin_suite, Instance};
use monotone_thresholds::verify::{self, Ledger, VerifyConfig};
use monotone_thresholds::{Error, Execution, MintermFamily, Rational};

#[derive(Parser)]
#[command(name = "mthresh", version, about = "Threshold analysis of monotone set families")]
struct Cli {
    /// Worker threads (default: one per hardware thread).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest ground set enumerated exactly.
    #[arg(long, global = true, default_value_t = measure::DEFAULT_ENUMERATION_LIMIT)]
    max_n: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FamilyArg {
    /// Family file: {"n": .., "minterms": [[..], ..]}.
    #[arg(long)]
    family: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Points {
    /// START:END:STEP, inclusive of END when it lies on the grid.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    p: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Measure, derivative, expected pivotal count and μ/p^k as CSV.
    Analyze {
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        points: Points,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First and second moments of the minterm count as CSV.
    Moments {
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        points: Points,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The point p_x where the measure equals x.
    Threshold {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        x: f64,
    },
    /// Relative threshold width (p_1/2 - p_eps) / p_1/2.
    Delta {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        eps: f64,
    },
    /// Fractional expectation LP at q, with both optimal weightings.
    Lp {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        q: String,
        #[arg(long)]
        dual_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tame subfamily or tame approximation at p/2.
    Decompose {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the measure.
    Sample {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a generated family file.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Host graph vertices for `graph`.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum)]
        pattern: Option<PatternArg>,
        /// Path length for `--pattern path`.
        #[arg(long)]
        r: Option<usize>,
        /// Custom pattern edges, e.g. "0-1,1-2".
        #[arg(long)]
        edges: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every check and write a ledger; or recheck a ledger file.
    Verify {
        #[arg(long, conflicts_with_all = ["suite", "recheck"])]
        family: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "recheck")]
        suite: Option<SuiteArg>,
        #[arg(long)]
        recheck: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte Carlo samples per check.
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Single,
    Star,
    AllK,
    Graph,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    Triangle,
    K4,
    K4Tail,
    Path,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Builtin,
}

enum Failure {
    Usage(String),
    Capacity(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => Failure::Capacity(format!("{e} (see `mthresh sample`)")),
            Error::LpCapacity { .. } => Failure::Capacity(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Capacity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let cfg = EnumConfig { max_n: cli.max_n, exec: Execution::Parallel };
    match cli.command {
        Command::Analyze { family, points, out } => analyze(&load(&family.family)?, &points, &cfg, out.as_deref()),
        Command::Moments { family, points, out } => moments_csv(&load(&family.family)?, &points, &cfg, out.as_deref()),
        Command::Threshold { family, x } => {
            let poly = measure::census_with(&load(&family.family)?, &cfg)?.polynomial;
            emit(None, &format!("{}\n", poly.threshold_point(x)?))
        }
        Command::Delta { family, eps } => {
            let poly = measure::census_with(&load(&family.family)?, &cfg)?.polynomial;
            emit(None, &format!("{}\n", measure::delta_from_polynomial(&poly, eps)?))
        }
        Command::Lp { family, q, dual_only, out } => {
            let outcome = lp::fractional_expectation(&load(&family.family)?, &parse_unit(&q)?)?;
            emit(out.as_deref(), &pretty(&outcome.to_json(dual_only)))
        }
        Command::Decompose { family, p, out } => {
            let fam = load(&family.family)?;
            check_capacity(&fam, &cfg)?;
            let d = structure::decompose(&fam, &parse_unit(&p)?)?;
            emit(out.as_deref(), &pretty(&d.to_json()))
        }
        Command::Sample { family, p, samples, seed } => {
            let est = measure::estimate_measure(&load(&family.family)?, p, samples, seed)?;
            let v = json!({
                "p": p, "samples": est.samples, "seed": seed, "hits": est.hits,
                "mean": est.mean, "std_error": est.std_error,
                "ci99_low": est.ci_low, "ci99_high": est.ci_high,
            });
            emit(None, &pretty(&v))
        }
        Command::Generate { kind, n, k, m, pattern, r, edges, count, seed, out } => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this kind")))
            };
            let fam = match kind {
                Kind::Single => gen_single(need(n, "n")?, need(k, "k")?)?,
                Kind::Star => gen_star(need(n, "n")?)?,
                Kind::AllK => gen_all_k_subsets(need(n, "n")?, need(k, "k")?)?,
                Kind::Random => gen_random(need(n, "n")?, need(k, "k")?, need(count, "count")?, seed)?,
                Kind::Graph => {
                    let pattern = match pattern.ok_or_else(|| Failure::Usage("--pattern is required".into()))? {
                        PatternArg::Triangle => Pattern::Triangle,
                        PatternArg::K4 => Pattern::K4,
                        PatternArg::K4Tail => Pattern::K4Tail,
                        PatternArg::Path => Pattern::Path(need(r, "r")?),
                        PatternArg::Custom => Pattern::Custom(parse_edges(
                            edges.as_deref().ok_or_else(|| Failure::Usage("--edges is required".into()))?,
                        )?),
                    };
                    gen_graph(&GraphSpec { m: need(m, "m")?, pattern })?
                }
            };
            emit(out.as_deref(), &fam.to_json())
        }
        Command::Verify { family, suite, recheck, out, samples } => {
            if let Some(path) = recheck {
                return recheck_ledger(&path);
            }
            let vcfg = VerifyConfig { monte_carlo_samples: samples, enumeration: cfg, ..VerifyConfig::default() };
            let (instances, graphs) = match (family, suite) {
                (Some(path), None) => {
                    let fam = load(&path)?;
                    check_capacity(&fam, &cfg)?;
                    let id = path.file_stem().map_or("family".into(), |s| s.to_string_lossy().into_owned());
                    (vec![Instance { id, family: fam }], false)
                }
                (None, Some(SuiteArg::Builtin)) => (builtin_suite()?, true),
                _ => return Err(Failure::Usage("give exactly one of --family, --suite or --recheck".into())),
            };
            let ledger = verify::verify_suite(&instances, &vcfg, graphs);
            emit(out.as_deref(), &pretty(&ledger.to_json()))?;
            report(&ledger)
        }
    }
}

fn report(ledger: &Ledger) -> CliResult {
    let failed: Vec<_> = ledger.failures().collect();
    eprintln!("{} records, {} failed", ledger.records.len(), failed.len());
    for (check, t) in ledger.tally() {
        if t.fail > 0 {
            eprintln!("  {check}: {} of {} failed", t.fail, t.pass + t.fail);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification("verification failed".into()))
    }
}

fn recheck_ledger(path: &Path) -> CliResult {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let ledger = Ledger::from_json(&text)?;
    let problems = ledger.recheck();
    for p in &problems {
        eprintln!("{p}");
    }
    if problems.is_empty() {
        eprintln!("{} records recheck cleanly", ledger.records.len());
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} problems in {}", problems.len(), path.display())))
    }
}

fn load(path: &Path) -> Result<MintermFamily, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let (fam, was_antichain) =
        MintermFamily::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if !was_antichain {
        eprintln!(
            "warning: {}: minterms were not an antichain; reduced to {} minimal sets",
            path.display(),
            fam.len()
        );
    }
    Ok(fam)
}

fn check_capacity(fam: &MintermFamily, cfg: &EnumConfig) -> CliResult {
    if fam.n() > cfg.max_n {
        return Err(Error::Capacity { n: fam.n(), limit: cfg.max_n }.into());
    }
    Ok(())
}

fn parse_unit(s: &str) -> Result<Rational, Failure> {
    let r = parse_rational(s)?;
    if !rational::is_probability(&r) {
        return Err(Failure::Usage(format!("{s} is not in [0, 1]")));
    }
    Ok(r)
}

fn points(p: &Points) -> Result<Vec<Rational>, Failure> {
    if let Some(p) = &p.p {
        return Ok(vec![parse_unit(p)?]);
    }
    let spec = p.grid.as_deref().unwrap_or_default();
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(Failure::Usage(format!("grid `{spec}` is not START:END:STEP")));
    };
    let (start, end, step) = (parse_unit(start)?, parse_unit(end)?, parse_rational(step)?);
    if step <= Rational::zero() || start > end {
        return Err(Failure::Usage(format!("grid `{spec}` is empty or has a nonpositive step")));
    }
    let mut out = Vec::new();
    let mut p = start;
    while p <= end {
        out.push(p.clone());
        p += &step;
    }
    Ok(out)
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>, Failure> {
    s.split(',')
        .map(|e| {
            let (a, b) = e
                .split_once('-')
                .ok_or_else(|| Failure::Usage(format!("edge `{e}` is not A-B")))?;
            let v = |x: &str| {
                x.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad vertex `{x}`")))
            };
            Ok((v(a)?, v(b)?))
        })
        .collect()
}

fn dec(r: &Rational) -> String {
    to_f64(r).to_string()
}

fn analyze(fam: &MintermFamily, pts: &Points, cfg: &EnumConfig, out: Option<&Path>) -> CliResult {
    let rows = measure::measure_rows(fam, &points(pts)?, cfg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "mu", "dmu_dp", "e_piv", "ratio_mu_over_pk"]).map_err(csv_err)?;
    for r in rows {
        let ratio = r.ratio_mu_over_pk.as_ref().map(dec).unwrap_or_default();
        w.write_record([dec(&r.p), dec(&r.mu), dec(&r.dmu_dp), dec(&r.e_piv), ratio]).map_err(csv_err)?;
    }
    emit_bytes(out, &w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?)
}

fn moments_csv(fam: &MintermFamily, pts: &Points, cfg: &EnumConfig, out: Option<&Path>) -> CliResult {
    let poly = (fam.n() <= cfg.max_n).then(|| measure::census_with(fam, cfg)).transpose()?.map(|c| c.polynomial);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "first", "second", "diagonal", "overlapping", "disjoint", "pz_bound", "mu_exact"])
        .map_err(csv_err)?;
    for p in points(pts)? {
        let m = moments::second_moment(fam, &p)?;
        let pz = m.pz_bound.as_ref().map(dec).unwrap_or_default();
        let mu = poly.as_ref().map(|poly| dec(&poly.eval(&p))).unwrap_or_default();
        w.write_record([
            dec(&p),
            dec(&m.first),
            dec(&m.second),
            dec(&m.diagonal),
            dec(&m.overlapping),
            dec(&m.disjoint),
            pz,
            mu,
        ])
        .map_err(csv_err)?;
    }
    emit_bytes(out, &w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?)
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    emit_bytes(out, text.as_bytes())
}

fn emit_bytes(out: Option<&Path>, bytes: &[u8]) -> CliResult {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
