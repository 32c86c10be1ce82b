//! Experiment harness: seeded climber campaigns with CSV rows and a JSON
//! summary, emulator-versus-bound verification sweeps, and the comparison of
//! sampled against exact cost estimation.

mod compare;
mod format;
mod verify;

pub use compare::{compare_estimation, write_compare_csv, CompareConfig, CompareRow};
pub use format::format_g;
pub use verify::{verify_grid, VerifyCell, VerifyConfig, VerifyReport};

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{CostModel, DEFAULT_N_SAMPLES};
use crate::error::{Error, Result};
use crate::hillclimb::{
    fit_scaling_exponent, run_climber, ClimberConfig, ExactEngine, Mode, ScalingFit, ScalingPoint, Variant,
};
use crate::maxsat::generate_instance;
use crate::rng::derive_seed;
use crate::sampling::DEFAULT_DELTA;

/// Version of the experiment spec format understood by this build.
pub const SPEC_FORMAT_VERSION: u32 = 1;
/// Version of the result CSV column layout.
pub const CSV_SCHEMA_VERSION: u32 = 1;
/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "GROVER_COST_WORKERS";

/// `git describe` of the build, or the package version outside a checkout.
pub fn build_id() -> &'static str {
    env!("GROVER_COST_BUILD_ID")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RunKind {
    pub variant: Variant,
    pub mode: Mode,
}

fn default_format_version() -> u32 {
    SPEC_FORMAT_VERSION
}
fn default_seeds() -> u64 {
    10
}
fn default_epsilon() -> f64 {
    1e-5
}
fn default_n_samples() -> u64 {
    DEFAULT_N_SAMPLES
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_cq() -> f64 {
    2.0
}

/// Flat JSON description of a climber campaign. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    pub n_values: Vec<usize>,
    pub k: usize,
    pub r: f64,
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    #[serde(default)]
    pub base_seed: u64,
    pub runs: Vec<RunKind>,
    #[serde(default = "default_epsilon")]
    pub epsilon_total: f64,
    #[serde(default = "default_n_samples")]
    pub n_samples: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_cq")]
    pub c_q: f64,
    #[serde(default)]
    pub engine: ExactEngine,
    /// Fills the runtime column; makes the CSV timing-dependent.
    #[serde(default)]
    pub record_runtime: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub summary: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != SPEC_FORMAT_VERSION {
            return Err(Error::Spec(format!(
                "format_version {} is not supported (expected {SPEC_FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.n_values.is_empty() {
            return Err(Error::Spec("n_values must be nonempty".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Spec("seeds must be >= 1".into()));
        }
        if self.runs.is_empty() {
            return Err(Error::Spec("runs must be nonempty".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < self.k || n == 0) {
            return Err(Error::Spec(format!("n = {n} is smaller than k = {}", self.k)));
        }
        CostModel::with_cq(self.c_q)?;
        for run in &self.runs {
            self.climber(*run, 0).validate()?;
        }
        Ok(())
    }

    fn climber(&self, run: RunKind, seed: u64) -> ClimberConfig {
        let mut c = ClimberConfig::new(run.variant, run.mode, seed);
        c.epsilon_total = self.epsilon_total;
        c.n_samples = self.n_samples;
        c.delta = self.delta;
        c.engine = self.engine;
        c.model = CostModel {
            c_q: self.c_q,
            ..CostModel::default()
        };
        c
    }
}

/// Seeds of one `(n, replicate)` cell. Climbers of every mode share the
/// climber seed, so the exact modes walk identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSeeds {
    pub n: usize,
    pub replicate: u64,
    pub instance_seed: u64,
    pub climber_seed: u64,
}

pub fn cell_seeds(base_seed: u64, n: usize, replicate: u64) -> CellSeeds {
    CellSeeds {
        n,
        replicate,
        instance_seed: derive_seed(&[base_seed, n as u64, replicate, 0]),
        climber_seed: derive_seed(&[base_seed, n as u64, replicate, 1]),
    }
}

/// One climber run; column order is the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub seed: u64,
    pub variant: Variant,
    pub mode: Mode,
    pub total_classical_queries: f64,
    pub total_quantum_queries: f64,
    pub steps: u64,
    pub final_objective: f64,
    pub satisfied_fraction: f64,
    pub runtime_s: Option<f64>,
    pub soft_failures: u64,
    pub budget_exceeded: bool,
    pub peak_memory_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub variant: Variant,
    pub mode: Mode,
    /// `classical` or `quantum` query totals.
    pub side: String,
    pub points: Vec<ScalingPoint>,
    pub fit: Option<ScalingFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupSummary {
    pub variant: Variant,
    pub quantum_mode: Mode,
    pub classical_exponent: f64,
    pub quantum_exponent: f64,
    /// Classical exponent divided by quantum exponent.
    pub exponent_ratio: f64,
    /// Per-n mean quantum total divided by mean classical total.
    pub absolute_ratios: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub format_version: u32,
    pub csv_schema_version: u32,
    pub build_id: String,
    pub spec: ExperimentSpec,
    pub seeds: Vec<CellSeeds>,
    pub series: Vec<SeriesSummary>,
    pub speedups: Vec<SpeedupSummary>,
    /// Convention used where the source leaves instance generation open.
    pub assumptions: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: ExperimentSummary,
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available parallelism.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every configured climber on `seeds` random instances per `n`.
/// Rows come back in `(n, replicate, run)` order whatever the worker count.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentOutput> {
    spec.validate()?;
    let cells: Vec<CellSeeds> = spec
        .n_values
        .iter()
        .flat_map(|&n| (0..spec.seeds).map(move |i| cell_seeds(spec.base_seed, n, i)))
        .collect();
    let per_cell: Vec<Result<Vec<ResultRow>>> = pool(workers)?.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let instance = generate_instance(cell.n, spec.k, spec.r, cell.instance_seed)?;
                spec.runs
                    .iter()
                    .map(|run| {
                        let config = spec.climber(*run, cell.climber_seed);
                        let started = Instant::now();
                        let ledger = run_climber(&instance, &config)?;
                        let elapsed = started.elapsed().as_secs_f64();
                        Ok(ResultRow {
                            n: cell.n,
                            k: spec.k,
                            r: spec.r,
                            seed: cell.instance_seed,
                            variant: run.variant,
                            mode: run.mode,
                            total_classical_queries: ledger.total_classical,
                            total_quantum_queries: ledger.total_quantum,
                            steps: ledger.steps_taken,
                            final_objective: ledger.final_objective,
                            satisfied_fraction: ledger.satisfied_fraction(),
                            runtime_s: spec.record_runtime.then_some(elapsed),
                            soft_failures: ledger.soft_failures,
                            budget_exceeded: ledger.budget_exceeded,
                            peak_memory_entries: ledger.peak_memory_entries,
                        })
                    })
                    .collect()
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(cells.len() * spec.runs.len());
    for cell in per_cell {
        rows.extend(cell?);
    }
    let summary = summarize(spec, cells, &rows);
    Ok(ExperimentOutput { rows, summary })
}

fn summarize(spec: &ExperimentSpec, seeds: Vec<CellSeeds>, rows: &[ResultRow]) -> ExperimentSummary {
    let mut grouped: BTreeMap<(RunKind, bool), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        let kind = RunKind {
            variant: row.variant,
            mode: row.mode,
        };
        for quantum in [false, true] {
            if quantum && row.mode == Mode::Classical {
                continue;
            }
            let value = if quantum {
                row.total_quantum_queries
            } else {
                row.total_classical_queries
            };
            grouped
                .entry((kind, quantum))
                .or_default()
                .entry(row.n)
                .or_default()
                .push(value);
        }
    }
    let series: Vec<SeriesSummary> = grouped
        .iter()
        .map(|((kind, quantum), by_n)| {
            let points: Vec<ScalingPoint> = by_n
                .iter()
                .map(|(&n, vals)| {
                    let (mean, std) = mean_std(vals);
                    ScalingPoint { n: n as f64, mean, std }
                })
                .collect();
            SeriesSummary {
                variant: kind.variant,
                mode: kind.mode,
                side: if *quantum { "quantum" } else { "classical" }.into(),
                fit: fit_scaling_exponent(&points).ok(),
                points,
            }
        })
        .collect();

    let find = |variant: Variant, mode: Mode, side: &str| {
        series
            .iter()
            .find(|s| s.variant == variant && s.mode == mode && s.side == side)
    };
    let mut speedups = Vec::new();
    for variant in [Variant::Simple, Variant::Steep] {
        let Some(classical) = find(variant, Mode::Classical, "classical") else {
            continue;
        };
        for quantum_mode in [Mode::QuantumExact, Mode::QuantumSampled] {
            let Some(quantum) = find(variant, quantum_mode, "quantum") else {
                continue;
            };
            let (Some(cf), Some(qf)) = (classical.fit, quantum.fit) else {
                continue;
            };
            let absolute_ratios = classical
                .points
                .iter()
                .zip(&quantum.points)
                .map(|(c, q)| (c.n as usize, q.mean / c.mean))
                .collect();
            speedups.push(SpeedupSummary {
                variant,
                quantum_mode,
                classical_exponent: cf.exponent,
                quantum_exponent: qf.exponent,
                exponent_ratio: cf.exponent / qf.exponent,
                absolute_ratios,
            });
        }
    }
    ExperimentSummary {
        format_version: SPEC_FORMAT_VERSION,
        csv_schema_version: CSV_SCHEMA_VERSION,
        build_id: build_id().to_string(),
        spec: spec.clone(),
        seeds,
        series,
        speedups,
        assumptions: vec![
            "each literal negated independently with probability 1/2".into(),
            "k distinct variables per clause".into(),
        ],
    }
}

/// Serialises rows as RFC 4180 CSV with a header.
pub fn write_rows<W: std::io::Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_rows<R: std::io::Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
