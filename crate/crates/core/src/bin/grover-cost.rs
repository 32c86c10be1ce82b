use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grover_cost::bench::{
    compare_estimation, format_g, run_experiment, verify_grid, workers_from_env, write_compare_csv, write_rows,
    CompareConfig, ExperimentSpec, VerifyConfig, WORKERS_ENV,
};
use grover_cost::bounds::{self, CostModel, SearchRegime, DEFAULT_N_SAMPLES};
use grover_cost::maxsat::{generate_instance, write_instance};
use grover_cost::{Error, Result};

#[derive(Parser)]
#[command(
    name = "grover-cost",
    version,
    about = "Query-cost bounds, emulation and hill-climbing experiments for Grover-type search"
)]
struct Cli {
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form bound.
    Bounds {
        /// Queries to g per oracle call.
        #[arg(long, global = true, default_value_t = 1.0)]
        cq: f64,
        #[command(subcommand)]
        bound: Bound,
    },
    /// Compare emulated searches with their bounds.
    Verify(VerifyArgs),
    /// Run a hill-climbing campaign described by a JSON spec.
    Experiment(ExperimentArgs),
    /// Compare sampled and exact cost estimation of the simple climber.
    CompareEstimation(CompareArgs),
    /// Write a random weighted MAX-k-SAT instance.
    GenInstance(GenArgs),
}

#[derive(Args)]
struct ListArg {
    #[arg(long)]
    list: u64,
}

#[derive(Args)]
struct ListMarked {
    #[arg(long)]
    list: u64,
    #[arg(long)]
    marked: u64,
}

#[derive(Subcommand)]
enum Bound {
    /// Expected oracle queries of the unbounded search.
    FUpper(ListMarked),
    /// Expected oracle queries of the timed-out Grover runs.
    EGrover(ListMarked),
    /// Expected queries to g of the bounded search.
    EQsearch {
        #[command(flatten)]
        lm: ListMarked,
        #[arg(long, default_value_t = DEFAULT_N_SAMPLES)]
        samples: u64,
        #[arg(long)]
        eps: f64,
    },
    /// Worst-case queries to g of the bounded search.
    WQsearch {
        #[arg(long)]
        list: u64,
        #[arg(long, default_value_t = DEFAULT_N_SAMPLES)]
        samples: u64,
        #[arg(long)]
        eps: f64,
    },
    /// Worst-case queries of the exact-search variant.
    Zalka {
        #[arg(long)]
        list: u64,
        #[arg(long)]
        eps: f64,
    },
    /// `1/f` at which classical sampling and Grover cost the same, or `none`.
    Crossover(ListArg),
    /// Number of classical samples minimising the averaged cost.
    OptimalSamples(ListArg),
    /// Expected queries of unbounded maximum finding, exact sum.
    QmaxSum(ListArg),
    /// Loose closed form for maximum finding.
    QmaxLoose(ListArg),
    /// Tight closed form for maximum finding (needs |L| >= 17).
    QmaxTight(ListArg),
    /// Bounded-error maximum finding: expected, timeout and repetitions.
    Qmax {
        #[arg(long)]
        list: u64,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// List sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [16u64, 64, 256, 1024])]
    list: Vec<u64>,
    /// Marked counts, comma separated; 0 checks the worst case. Defaults to
    /// 1, L/8, L/4 and L per list size.
    #[arg(long, value_delimiter = ',')]
    marked: Option<Vec<u64>>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Failure probability of the bounded search in worst-case cells.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    eps: f64,
    #[arg(long, default_value_t = 2.0)]
    cq: f64,
    /// CSV report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment spec.
    spec: PathBuf,
    /// Row CSV path, overriding the spec; stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON path, overriding the spec.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = [100usize, 300, 1000, 3000])]
    n_values: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 3.0)]
    r: f64,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_N_SAMPLES)]
    samples: u64,
    /// Skip timing the full-scan engine.
    #[arg(long)]
    no_full_scan: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Clause density m/n.
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn g(x: f64) -> String {
    format_g(x, 6)
}

fn run_bound(bound: Bound, cq: f64) -> Result<Vec<String>> {
    let model = CostModel::with_cq(cq)?;
    Ok(match bound {
        Bound::FUpper(a) => vec![g(bounds::f_upper(a.list, a.marked)?)],
        Bound::EGrover(a) => vec![g(bounds::e_grover_upper(SearchRegime::new(a.list, a.marked)?, &model)?)],
        Bound::EQsearch { lm, samples, eps } => {
            let v = bounds::e_qsearch(SearchRegime::new(lm.list, lm.marked)?, samples, eps, &model)?;
            vec![g(v.queries)]
        }
        Bound::WQsearch { list, samples, eps } => vec![g(bounds::w_qsearch(list, samples, eps, &model)?.queries)],
        Bound::Zalka { list, eps } => vec![g(bounds::w_qsearch_zalka(list, eps, &model)?.queries)],
        Bound::Crossover(a) => {
            if a.list == 0 {
                return Err(Error::invalid("list", "must be >= 1"));
            }
            match bounds::crossover_fraction(a.list, &model) {
                Some(inv) => vec![g(inv)],
                None => vec!["none".into()],
            }
        }
        Bound::OptimalSamples(a) => vec![bounds::optimal_n_samples(a.list, &model).to_string()],
        Bound::QmaxSum(a) => vec![g(bounds::e_qmax_inf_sum(a.list, &model))],
        Bound::QmaxLoose(a) => vec![g(bounds::e_qmax_loose(a.list, &model))],
        Bound::QmaxTight(a) => vec![g(bounds::e_qmax_tight(a.list, &model)?)],
        Bound::Qmax { list, eps } => {
            let b = bounds::e_qmax(list, eps, &model)?;
            vec![
                format!("expected {}", g(b.expected.queries)),
                format!("timeout {}", g(b.timeout)),
                format!("repetitions {}", b.repetitions),
            ]
        }
    })
}

fn cmd_verify(args: VerifyArgs, workers: usize) -> Result<bool> {
    if args.samples < 10_000 {
        return Err(Error::invalid("samples", "need at least 10^4 samples per cell"));
    }
    let config = VerifyConfig {
        list_sizes: args.list,
        marked: args.marked,
        samples: args.samples,
        seed: args.seed,
        n_samples: DEFAULT_N_SAMPLES,
        epsilon: args.eps,
        model: CostModel::with_cq(args.cq)?,
    };
    let report = verify_grid(&config, workers)?;
    let mut out = output(args.out.as_deref())?;
    report.write_csv(&mut out)?;
    out.flush()?;
    let mut err = io::stderr().lock();
    for c in &report.cells {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        if c.marked == 0 {
            writeln!(
                err,
                "{status} L={} t=0 max={} worst_case<={}",
                c.list_size,
                g(c.max_observed),
                g(c.worst_case_bound.unwrap_or(f64::NAN))
            )?;
        } else {
            writeln!(
                err,
                "{status} L={} t={} mean={}±{} e_grover<={} tail={} (<={}) F={}{}",
                c.list_size,
                c.marked,
                g(c.mean),
                g(c.std_error),
                g(c.e_grover_bound.unwrap_or(f64::NAN)),
                g(c.tail_frequency),
                g(c.tail_bound),
                g(c.f_bound.unwrap_or(f64::NAN)),
                if c.pass_f { "" } else { " (mean above F)" }
            )?;
        }
    }
    Ok(report.all_passed())
}

fn cmd_experiment(args: ExperimentArgs, workers: usize) -> Result<()> {
    let text = std::fs::read_to_string(&args.spec)?;
    let spec = ExperimentSpec::from_json(&text)?;
    let result = run_experiment(&spec, workers)?;
    let csv_path = args.out.or_else(|| spec.output.clone());
    let mut out = output(csv_path.as_deref())?;
    write_rows(&result.rows, &mut out)?;
    out.flush()?;
    if let Some(path) = args.summary.or_else(|| spec.summary.clone()) {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &result.summary)?;
        writeln!(w)?;
        w.flush()?;
    }
    let mut err = io::stderr().lock();
    for s in &result.summary.speedups {
        writeln!(
            err,
            "{} {}: classical exponent {} quantum exponent {} ratio {}",
            s.variant,
            s.quantum_mode,
            g(s.classical_exponent),
            g(s.quantum_exponent),
            g(s.exponent_ratio)
        )?;
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs, workers: usize) -> Result<()> {
    let config = CompareConfig {
        n_values: args.n_values,
        k: args.k,
        r: args.r,
        seeds: args.seeds,
        base_seed: args.seed,
        epsilon_total: args.eps,
        n_samples: args.samples,
        time_full_scan: !args.no_full_scan,
        ..CompareConfig::default()
    };
    let rows = compare_estimation(&config, workers)?;
    let mut out = output(args.out.as_deref())?;
    write_compare_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let instance = generate_instance(args.n, args.k, args.r, args.seed)?;
    let mut out = output(args.out.as_deref())?;
    writeln!(
        out,
        "c random weighted MAX-{}-SAT, r = {}, seed = {}",
        args.k, args.r, args.seed
    )?;
    write_instance(&instance, &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers.unwrap_or_else(workers_from_env);
    let outcome = match cli.command {
        Command::Bounds { cq, bound } => run_bound(bound, cq).map(|lines| {
            for line in lines {
                println!("{line}");
            }
            true
        }),
        Command::Verify(args) => cmd_verify(args, workers),
        Command::Experiment(args) => cmd_experiment(args, workers).map(|_| true),
        Command::CompareEstimation(args) => cmd_compare(args, workers).map(|_| true),
        Command::GenInstance(args) => cmd_gen(args).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
