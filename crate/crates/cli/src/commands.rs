use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use typexp_core::{
    chernoff_information, classical_bound, format_sig, kl_divergence, min_pairwise_chernoff,
    positivity_check, ratio_curve, robust_bound, run_experiment, run_experiment_with_threads,
    sason_lower_bound, variational_distance, write_ratio_csv, write_summaries_csv, HypothesisSet,
    RobustModel, RunSummary,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "TYPEXP_THREADS";
pub const DEFAULT_RATIO_N: u64 = 40;

#[derive(Debug, Parser)]
#[command(
    name = "typexp",
    version,
    about = "Type-based analysis of Bayesian multiple hypothesis tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Emit CSV instead of a table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise V, D, C and the Sason bound.
    Divergences {
        #[command(flatten)]
        common: Common,
        /// Inline distributions such as `0.1,0.8,0.1`, used instead of a config.
        vectors: Vec<String>,
    },
    /// Sorted per-type to worst-case exponent ratios.
    RatioCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Fixed-point nominals and the robust exponent summary.
    Quantize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Monte Carlo error probabilities.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Classical and robust error bounds across n.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        bits: Option<u32>,
    },
}

/// Worker cap from `TYPEXP_THREADS`; `None` uses every core.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Validation(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn load(common: &Common) -> CliResult<ExperimentConfig> {
    match &common.config {
        Some(path) => ExperimentConfig::load(path),
        None => Err(CliError::Validation("--config PATH is required".into())),
    }
}

fn io(path: Option<&Path>) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| match path {
        Some(p) => CliError::io(format!("cannot write {}", p.display()), e),
        None => CliError::io("cannot write to standard output", e),
    }
}

/// Runs `body` against `path`, or against `stdout` when there is no path.
fn emit(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> CliResult<()>,
) -> CliResult<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io(path))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(io(path))
        }
        None => body(stdout),
    }
}

pub fn run(cli: &Cli, threads: Option<usize>, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Divergences { common, vectors } => divergences(common, vectors, stdout),
        Command::RatioCurve { common, n } => ratio(common, *n, stdout),
        Command::Quantize { common, bits } => quantize(common, *bits, stdout),
        Command::Simulate { common, trials } => simulate(common, *trials, threads, stdout),
        Command::Bounds { common, n, bits } => bounds(common, *n, *bits, stdout),
    }
}

fn parse_vector(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("not a number: {s:?} in {text:?}")))
        })
        .collect()
}

pub fn divergences(common: &Common, vectors: &[String], stdout: &mut dyn Write) -> CliResult<()> {
    let config = if vectors.is_empty() {
        load(common)?
    } else {
        if common.config.is_some() {
            return Err(CliError::Validation(
                "give either --config or inline vectors".into(),
            ));
        }
        let rows = vectors
            .iter()
            .map(|v| parse_vector(v))
            .collect::<CliResult<Vec<_>>>()?;
        ExperimentConfig::from_vectors(rows)?
    };
    let dists = config.hypothesis_distributions()?;

    let mut rows = Vec::new();
    for i in 0..dists.len() {
        for j in i + 1..dists.len() {
            let (p, q) = (&dists[i], &dists[j]);
            let c = chernoff_information(p, q)?;
            rows.push((
                i + 1,
                j + 1,
                [
                    variational_distance(p, q)?,
                    kl_divergence(p, q)?,
                    kl_divergence(q, p)?,
                    c.value,
                    c.lambda,
                    sason_lower_bound(p, q)?,
                ],
            ));
        }
    }
    let min = min_pairwise_chernoff(&dists)?;
    let path = common.out.as_deref();
    emit(path, stdout, |w| {
        if common.csv {
            writeln!(w, "i,j,variational,kl_ij,kl_ji,chernoff,lambda,sason").map_err(io(path))?;
            for (i, j, v) in &rows {
                let cells: Vec<String> = v.iter().map(|&x| format_sig(x)).collect();
                writeln!(w, "{i},{j},{}", cells.join(",")).map_err(io(path))?;
            }
        } else {
            writeln!(
                w,
                "{:>3} {:>3} {:>10} {:>10} {:>10} {:>10} {:>8} {:>10}",
                "i", "j", "V", "D(Pi||Pj)", "D(Pj||Pi)", "C", "lambda", "Sason"
            )
            .map_err(io(path))?;
            for (i, j, v) in &rows {
                writeln!(
                    w,
                    "{i:>3} {j:>3} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>8.4} {:>10.6}",
                    v[0], v[1], v[2], v[3], v[4], v[5]
                )
                .map_err(io(path))?;
            }
            writeln!(
                w,
                "min C = {:.6} (pair {},{})",
                min.value,
                min.pair.0 + 1,
                min.pair.1 + 1
            )
            .map_err(io(path))?;
        }
        Ok(())
    })
}

pub fn ratio(common: &Common, n: Option<u64>, stdout: &mut dyn Write) -> CliResult<()> {
    let config = load(common)?;
    let n = n
        .or_else(|| config.n_values.as_ref().and_then(|v| v.first().copied()))
        .unwrap_or(DEFAULT_RATIO_N);
    if n == 0 {
        return Err(CliError::Validation("--n must be positive".into()));
    }
    let h = config.hypothesis_set()?;
    let points = ratio_curve(&h, n)?;
    emit(common.out.as_deref(), stdout, |w| {
        Ok(write_ratio_csv(&points, w)?)
    })
}

fn print_vector(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", cells.join(", "))
}

pub fn quantize(common: &Common, bits: Option<u32>, stdout: &mut dyn Write) -> CliResult<()> {
    let config = load(common)?;
    let bits = match bits.or(config.quantizer_bits) {
        Some(b) => b,
        None => {
            return Err(CliError::Validation(
                "--bits or quantizer_bits is required".into(),
            ))
        }
    };
    if config.nominals.is_some() {
        return Err(CliError::Validation(
            "quantize derives nominals; remove them from the config".into(),
        ));
    }
    let rm = config.robust_model(Some(bits))?.expect("bits given");
    let min = min_pairwise_chernoff(rm.representatives())?;
    let positivity = positivity_check(&rm)?;
    let path = common.out.as_deref();
    emit(path, stdout, |w| {
        if common.csv {
            writeln!(
                w,
                "bits,min_chernoff_representatives,log2_penalty,margin,positive"
            )
            .map_err(io(path))?;
            writeln!(
                w,
                "{bits},{},{},{},{}",
                format_sig(min.value),
                format_sig(rm.robustness_penalty()),
                format_sig(positivity.margin),
                positivity.holds
            )
            .map_err(io(path))?;
            return Ok(());
        }
        writeln!(w, "q = {bits} bits").map_err(io(path))?;
        for (j, (q, eps)) in rm.nominals().iter().zip(rm.epsilons()).enumerate() {
            writeln!(
                w,
                "Q{} = {}  eps = {}",
                j + 1,
                print_vector(q.probs()),
                format_sig(*eps)
            )
            .map_err(io(path))?;
        }
        writeln!(
            w,
            "min C(Pbar_i, Pbar_j) = {:.4} (pair {},{})",
            min.value,
            min.pair.0 + 1,
            min.pair.1 + 1
        )
        .map_err(io(path))?;
        writeln!(
            w,
            "log2(1 + |X| eps)    = {}",
            format_sig(rm.robustness_penalty())
        )
        .map_err(io(path))?;
        writeln!(
            w,
            "margin               = {}",
            format_sig(positivity.margin)
        )
        .map_err(io(path))?;
        writeln!(
            w,
            "positive exponent    = {}",
            if positivity.holds { "yes" } else { "no" }
        )
        .map_err(io(path))?;
        Ok(())
    })
}

fn write_table(summaries: &[RunSummary], w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        w,
        "{:<7} {:>6} {:>8} {:>8} {:>12} {:>12} {:>12}",
        "rule", "n", "trials", "errors", "pe_hat", "ci95", "bound"
    )?;
    for s in summaries {
        let bound = s
            .bound_value
            .map_or_else(|| "-".to_string(), |b| format!("{b:.4e}"));
        writeln!(
            w,
            "{:<7} {:>6} {:>8} {:>8} {:>12.4e} {:>12.4e} {:>12}",
            s.rule.name(),
            s.n,
            s.trials,
            s.errors,
            s.pe_hat,
            s.ci95_halfwidth,
            bound
        )?;
    }
    Ok(())
}

/// Runs the configured experiment and returns the CSV bytes.
pub fn simulate_csv(
    config: &ExperimentConfig,
    trials: Option<u64>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> CliResult<(Vec<RunSummary>, Vec<u8>)> {
    let plan = config.plan(trials, seed)?;
    let summaries = match threads {
        Some(t) => run_experiment_with_threads(&plan, t)?,
        None => run_experiment(&plan)?,
    };
    let mut csv = Vec::new();
    write_summaries_csv(&summaries, &mut csv)?;
    Ok((summaries, csv))
}

pub fn simulate(
    common: &Common,
    trials: Option<u64>,
    threads: Option<usize>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let config = load(common)?;
    let (summaries, csv) = simulate_csv(&config, trials, common.seed, threads)?;
    let out = common.out.clone().or_else(|| config.output.clone());
    match out {
        Some(path) => {
            std::fs::write(&path, &csv).map_err(io(Some(&path)))?;
            write_table(&summaries, stdout).map_err(io(None))?;
            writeln!(stdout, "wrote {}", path.display()).map_err(io(None))
        }
        None => stdout.write_all(&csv).map_err(io(None)),
    }
}

struct BoundRow {
    n: u64,
    classical: (f64, f64),
    robust: Option<(f64, f64)>,
}

fn bound_rows(
    h: &HypothesisSet<f64>,
    rm: Option<&RobustModel<f64>>,
    ns: &[u64],
) -> CliResult<Vec<BoundRow>> {
    ns.iter()
        .map(|&n| {
            let c = classical_bound(h, n)?;
            let robust = rm
                .map(|m| robust_bound(m, n).map(|b| (b.exponent, b.log2_bound)))
                .transpose()?;
            Ok(BoundRow {
                n,
                classical: (c.exponent, c.log2_bound),
                robust,
            })
        })
        .collect()
}

pub fn bounds(
    common: &Common,
    n: Option<u64>,
    bits: Option<u32>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let config = load(common)?;
    let ns = match n {
        Some(0) => return Err(CliError::Validation("--n must be positive".into())),
        Some(n) => vec![n],
        None => config.n_values(),
    };
    let h = config.hypothesis_set()?;
    let rm = config.robust_model(bits)?;
    let rows = bound_rows(&h, rm.as_ref(), &ns)?;
    let nan = (f64::NAN, f64::NAN);
    let path = common.out.as_deref();
    emit(path, stdout, |w| {
        if common.csv {
            writeln!(
                w,
                "n,classical_exponent,classical_log2_bound,robust_exponent,robust_log2_bound"
            )
            .map_err(io(path))?;
            for r in &rows {
                let (re, rl) = r.robust.unwrap_or(nan);
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    r.n,
                    format_sig(r.classical.0),
                    format_sig(r.classical.1),
                    format_sig(re),
                    format_sig(rl)
                )
                .map_err(io(path))?;
            }
        } else {
            writeln!(
                w,
                "{:>6} {:>12} {:>12} {:>12} {:>12}",
                "n", "classical", "log2 bound", "robust", "log2 bound"
            )
            .map_err(io(path))?;
            for r in &rows {
                let (re, rl) = r.robust.unwrap_or(nan);
                writeln!(
                    w,
                    "{:>6} {:>12.6} {:>12.4} {:>12.6} {:>12.4}",
                    r.n, r.classical.0, r.classical.1, re, rl
                )
                .map_err(io(path))?;
            }
        }
        Ok(())
    })
}
