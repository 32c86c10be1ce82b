//! Classical and emulated-quantum hill climbers for weighted MAX-k-SAT over
//! the single-flip neighbourhood.
//!
//! The walk itself is always classical. Quantum runs record what the quantum
//! subroutine would have cost at each step, either from the exact marked
//! count (`QuantumExact`) or from the number of rejection-sampled flips
//! (`QuantumSampled`). Every ledger also carries the classical counterpart's
//! cost along the same walk.

mod fit;

pub use fit::{fit_scaling_exponent, ScalingFit, ScalingPoint};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{e_qmax_inf_sum, e_qsearch, grover_runs, CostModel, SearchRegime, DEFAULT_N_SAMPLES};
use crate::error::{check_epsilon, Error, Result};
use crate::maxsat::{build_tracker, Assignment, ClauseState, MaxSatInstance};
use crate::rng::{stream, StreamRng};
use crate::sampling::{
    estimate_qsearch, subroutine_epsilon, Branch, EpsilonBudget, EstimateConfig, ListSampler, DEFAULT_DELTA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Simple,
    Steep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Classical,
    QuantumExact,
    QuantumSampled,
}

/// How exact modes find the improving flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactEngine {
    /// Incremental marked-set tracker.
    #[default]
    Incremental,
    /// Re-evaluates all `n` flips every step.
    FullScan,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Simple => "simple",
            Variant::Steep => "steep",
        })
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Classical => "classical",
            Mode::QuantumExact => "quantum_exact",
            Mode::QuantumSampled => "quantum_sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClimberConfig {
    pub variant: Variant,
    pub mode: Mode,
    pub epsilon_total: f64,
    /// Step budget `T` for the error split; `n` when unset.
    pub t_max_steps: Option<u64>,
    pub n_samples: u64,
    pub delta: f64,
    /// Sampled mode gives up after this many consecutive rejections; `10 n`
    /// when unset.
    pub l_max_override: Option<u64>,
    pub engine: ExactEngine,
    pub model: CostModel,
    pub seed: u64,
}

impl ClimberConfig {
    pub fn new(variant: Variant, mode: Mode, seed: u64) -> Self {
        ClimberConfig {
            variant,
            mode,
            epsilon_total: 1e-5,
            t_max_steps: None,
            n_samples: DEFAULT_N_SAMPLES,
            delta: DEFAULT_DELTA,
            l_max_override: None,
            engine: ExactEngine::Incremental,
            model: CostModel::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon_total)?;
        self.model.validate()?;
        if self.t_max_steps == Some(0) {
            return Err(Error::invalid("t_max_steps", "must be >= 1"));
        }
        if self.l_max_override == Some(0) {
            return Err(Error::invalid("l_max", "must be >= 1"));
        }
        if self.variant == Variant::Steep && self.mode == Mode::QuantumSampled {
            return Err(Error::invalid(
                "mode",
                "the steep climber needs every gain, so it has no sampled mode",
            ));
        }
        Ok(())
    }

    pub fn step_budget(&self, n: usize) -> u64 {
        self.t_max_steps.unwrap_or(n as u64).max(1)
    }

    pub fn step_epsilon(&self, n: usize) -> Result<f64> {
        subroutine_epsilon(EpsilonBudget {
            epsilon_total: self.epsilon_total,
            t_max_steps: self.step_budget(n),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// An improving flip was found and applied.
    Move,
    /// The search that established the local optimum.
    Confirm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub kind: StepKind,
    pub classical_queries: f64,
    pub quantum_queries: f64,
    /// Marked count in exact modes, draw count `l` in sampled mode.
    pub t_or_l: u64,
    /// Estimation branch, sampled mode only.
    pub branch: Option<Branch>,
    /// Objective before the step.
    pub objective: f64,
}

/// Per-step and cumulative query counts of one climber run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub per_step: Vec<StepRecord>,
    pub total_classical: f64,
    pub total_quantum: f64,
    pub steps_taken: u64,
    pub converged: bool,
    pub budget_exceeded: bool,
    /// Sampled runs that concluded "nothing marked" although a flip improved.
    pub soft_failures: u64,
    /// Extra queries to the objective when counting calls to it rather than
    /// to the marking functions: one per subroutine call.
    pub objective_query_offset: u64,
    pub epsilon_step: f64,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub total_weight: f64,
    /// Largest number of stored state entries, a memory proxy.
    pub peak_memory_entries: usize,
}

impl QueryLedger {
    fn new(epsilon_step: f64, initial_objective: f64, total_weight: f64) -> Self {
        QueryLedger {
            per_step: Vec::new(),
            total_classical: 0.0,
            total_quantum: 0.0,
            steps_taken: 0,
            converged: false,
            budget_exceeded: false,
            soft_failures: 0,
            objective_query_offset: 0,
            epsilon_step,
            initial_objective,
            final_objective: initial_objective,
            total_weight,
            peak_memory_entries: 0,
        }
    }

    fn record(
        &mut self,
        kind: StepKind,
        classical: f64,
        quantum: f64,
        t_or_l: u64,
        branch: Option<Branch>,
        objective: f64,
    ) {
        let step = self.steps_taken;
        self.per_step.push(StepRecord {
            step,
            kind,
            classical_queries: classical,
            quantum_queries: quantum,
            t_or_l,
            branch,
            objective,
        });
        self.total_classical += classical;
        self.total_quantum += quantum;
        self.objective_query_offset += 1;
        if kind == StepKind::Move {
            self.steps_taken += 1;
        }
    }

    /// `phi(x*) / W`.
    pub fn satisfied_fraction(&self) -> f64 {
        if self.total_weight > 0.0 {
            self.final_objective / self.total_weight
        } else {
            1.0
        }
    }

    /// Total for the requested side: the quantum estimate, or the classical
    /// counterpart.
    pub fn total(&self, quantum: bool) -> f64 {
        if quantum {
            self.total_quantum
        } else {
            self.total_classical
        }
    }
}

/// Expected samples without replacement to hit one of `marked` improving
/// neighbours among `neighbourhood`: `(|N| + 1) / (t + 1)`, or `|N|` to
/// confirm that there is none.
pub fn classical_simple_step_cost(neighbourhood: u64, marked: u64) -> Result<f64> {
    if marked > neighbourhood {
        return Err(Error::invalid(
            "marked",
            format!("{marked} exceeds neighbourhood size {neighbourhood}"),
        ));
    }
    if marked == 0 {
        return Ok(neighbourhood as f64);
    }
    Ok((neighbourhood + 1) as f64 / (marked + 1) as f64)
}

/// Either engine behind the exact modes.
enum Exact<'a> {
    Tracker(crate::maxsat::MarkedSetTracker<'a>),
    Scan {
        state: ClauseState<'a>,
        marked: Vec<u32>,
        gains: Vec<f64>,
    },
}

impl<'a> Exact<'a> {
    fn new(instance: &'a MaxSatInstance, start: Assignment, engine: ExactEngine) -> Result<Self> {
        Ok(match engine {
            ExactEngine::Incremental => Exact::Tracker(build_tracker(instance, start)?),
            ExactEngine::FullScan => {
                let state = ClauseState::new(instance, start)?;
                let mut e = Exact::Scan {
                    state,
                    marked: Vec::new(),
                    gains: Vec::new(),
                };
                e.rescan();
                e
            }
        })
    }

    fn rescan(&mut self) {
        if let Exact::Scan { state, marked, gains } = self {
            let n = state.instance().n();
            gains.clear();
            gains.extend((0..n).map(|v| state.gain(v)));
            marked.clear();
            marked.extend((0..n as u32).filter(|&v| gains[v as usize] > 0.0));
        }
    }

    fn marked(&self) -> &[u32] {
        match self {
            Exact::Tracker(t) => t.marked(),
            Exact::Scan { marked, .. } => marked,
        }
    }

    fn gain(&self, var: usize) -> f64 {
        match self {
            Exact::Tracker(t) => t.gains()[var],
            Exact::Scan { gains, .. } => gains[var],
        }
    }

    fn objective(&self) -> f64 {
        match self {
            Exact::Tracker(t) => t.objective(),
            Exact::Scan { state, .. } => state.objective(),
        }
    }

    fn memory_entries(&self) -> usize {
        match self {
            Exact::Tracker(t) => t.memory_entries(),
            Exact::Scan { state, .. } => state.memory_entries(),
        }
    }

    fn flip(&mut self, var: usize) -> Result<()> {
        match self {
            Exact::Tracker(t) => {
                t.apply_flip(var)?;
            }
            Exact::Scan { state, .. } => {
                state.flip(var)?;
                self.rescan();
            }
        }
        Ok(())
    }

    fn pick_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let marked = self.marked();
        if marked.is_empty() {
            return None;
        }
        Some(marked[rng.random_range(0..marked.len())] as usize)
    }

    fn pick_best(&self) -> Option<usize> {
        self.marked()
            .iter()
            .map(|&v| v as usize)
            .max_by(|&a, &b| self.gain(a).total_cmp(&self.gain(b)).then(b.cmp(&a)))
    }
}

fn start_rng(config: &ClimberConfig) -> StreamRng {
    stream(config.seed, 1)
}

fn check_variant(config: &ClimberConfig, want: Variant) -> Result<()> {
    config.validate()?;
    if config.variant != want {
        return Err(Error::invalid(
            "variant",
            format!("expected a {want} climber configuration, got {}", config.variant),
        ));
    }
    Ok(())
}

/// Simple hill climber from a uniformly random start.
pub fn run_simple(instance: &MaxSatInstance, config: &ClimberConfig) -> Result<QueryLedger> {
    check_variant(config, Variant::Simple)?;
    let mut rng = start_rng(config);
    let start = Assignment::random(instance.n(), &mut rng);
    run_simple_from(instance, config, start, &mut rng)
}

/// Simple hill climber from a given start; `rng` drives flip selection.
pub fn run_simple_from<R: Rng>(
    instance: &MaxSatInstance,
    config: &ClimberConfig,
    start: Assignment,
    rng: &mut R,
) -> Result<QueryLedger> {
    check_variant(config, Variant::Simple)?;
    if config.mode == Mode::QuantumSampled {
        return run_simple_sampled(instance, config, start, rng);
    }
    let n = instance.n();
    let eps = config.step_epsilon(n)?;
    let budget = config.step_budget(n);
    let quantum = config.mode == Mode::QuantumExact;
    let mut exact = Exact::new(instance, start, config.engine)?;
    let mut ledger = QueryLedger::new(eps, exact.objective(), instance.total_weight());
    loop {
        ledger.peak_memory_entries = ledger.peak_memory_entries.max(exact.memory_entries());
        let t = exact.marked().len() as u64;
        let classical = classical_simple_step_cost(n as u64, t)?;
        let q = if quantum {
            let regime = SearchRegime::new(n as u64, t)?;
            e_qsearch(regime, config.n_samples, eps, &config.model)?.queries
        } else {
            0.0
        };
        match exact.pick_uniform(rng) {
            None => {
                ledger.record(StepKind::Confirm, classical, q, 0, None, exact.objective());
                ledger.converged = true;
                break;
            }
            Some(var) => {
                ledger.record(StepKind::Move, classical, q, t, None, exact.objective());
                exact.flip(var)?;
            }
        }
    }
    ledger.budget_exceeded = ledger.steps_taken > budget;
    ledger.final_objective = exact.objective();
    Ok(ledger)
}

fn run_simple_sampled<R: Rng>(
    instance: &MaxSatInstance,
    config: &ClimberConfig,
    start: Assignment,
    rng: &mut R,
) -> Result<QueryLedger> {
    let n = instance.n();
    let eps = config.step_epsilon(n)?;
    let budget = config.step_budget(n);
    let mut estimate = EstimateConfig::new(config.n_samples, config.delta, eps)?;
    estimate = estimate.with_l_max(config.l_max_override.unwrap_or(10 * n as u64));
    let mut state = ClauseState::new(instance, start)?;
    let mut ledger = QueryLedger::new(eps, state.objective(), instance.total_weight());
    ledger.peak_memory_entries = state.memory_entries();
    loop {
        let outcome = {
            let view = &state;
            let mut sampler = ListSampler::new(n as u64, |v| view.improves(v as usize), &mut *rng)?;
            estimate_qsearch(&mut sampler, n as u64, &estimate, &config.model)?
        };
        let classical = outcome.draws as f64;
        match outcome.found_item {
            None => {
                ledger.record(
                    StepKind::Confirm,
                    classical,
                    outcome.estimated_queries,
                    outcome.l,
                    Some(outcome.branch),
                    state.objective(),
                );
                if (0..n).any(|v| state.improves(v)) {
                    ledger.soft_failures += 1;
                }
                ledger.converged = true;
                break;
            }
            Some(var) => {
                ledger.record(
                    StepKind::Move,
                    classical,
                    outcome.estimated_queries,
                    outcome.l,
                    Some(outcome.branch),
                    state.objective(),
                );
                state.flip(var as usize)?;
            }
        }
    }
    ledger.budget_exceeded = ledger.steps_taken > budget;
    ledger.final_objective = state.objective();
    Ok(ledger)
}

/// Per-call charge of bounded-error maximum finding over `n` neighbours.
pub fn qmax_step_cost(n: u64, epsilon: f64, model: &CostModel) -> Result<f64> {
    Ok(3.0 * grover_runs(epsilon)? as f64 * e_qmax_inf_sum(n, model))
}

/// Steepest-ascent hill climber from a uniformly random start.
pub fn run_steep(instance: &MaxSatInstance, config: &ClimberConfig) -> Result<QueryLedger> {
    check_variant(config, Variant::Steep)?;
    let mut rng = start_rng(config);
    let start = Assignment::random(instance.n(), &mut rng);
    run_steep_from(instance, config, start)
}

/// Steepest-ascent hill climber from a given start; deterministic.
pub fn run_steep_from(instance: &MaxSatInstance, config: &ClimberConfig, start: Assignment) -> Result<QueryLedger> {
    check_variant(config, Variant::Steep)?;
    let n = instance.n();
    let eps = config.step_epsilon(n)?;
    let budget = config.step_budget(n);
    let q = match config.mode {
        Mode::QuantumExact => qmax_step_cost(n as u64, eps, &config.model)?,
        _ => 0.0,
    };
    let mut exact = Exact::new(instance, start, config.engine)?;
    let mut ledger = QueryLedger::new(eps, exact.objective(), instance.total_weight());
    loop {
        ledger.peak_memory_entries = ledger.peak_memory_entries.max(exact.memory_entries());
        let t = exact.marked().len() as u64;
        match exact.pick_best() {
            None => {
                ledger.record(StepKind::Confirm, n as f64, q, 0, None, exact.objective());
                ledger.converged = true;
                break;
            }
            Some(var) => {
                ledger.record(StepKind::Move, n as f64, q, t, None, exact.objective());
                exact.flip(var)?;
            }
        }
    }
    ledger.budget_exceeded = ledger.steps_taken > budget;
    ledger.final_objective = exact.objective();
    Ok(ledger)
}

/// Dispatches on the configured variant.
pub fn run_climber(instance: &MaxSatInstance, config: &ClimberConfig) -> Result<QueryLedger> {
    match config.variant {
        Variant::Simple => run_simple(instance, config),
        Variant::Steep => run_steep(instance, config),
    }
}
