//! Query-count emulation of the randomised Grover searches.
//!
//! Only the number of marked items matters for the cost process, so the
//! searches run on `(|L|, t)` pairs. A cycle with `j` iterations succeeds
//! with probability `sin^2((2j + 1) theta)` and costs `j + 1` oracle queries
//! (the iterations plus the check).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{grover_runs, CostModel, LAMBDA};
use crate::error::{Error, Result};

/// Rotation angle of the Grover iterate, `sin^2(theta) = t / |L|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverAngle {
    pub theta: f64,
}

impl GroverAngle {
    pub fn new(list_size: u64, marked: u64) -> Result<Self> {
        if list_size == 0 || marked > list_size {
            return Err(Error::invalid(
                "marked",
                format!("need 0 <= t <= |L| with |L| >= 1, got t = {marked}, |L| = {list_size}"),
            ));
        }
        let theta = (marked as f64 / list_size as f64).sqrt().asin();
        Ok(GroverAngle { theta })
    }
}

/// Cost record of one emulated execution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    /// Classical draws, one query to `g` each.
    pub classical_queries: u64,
    /// Oracle calls, `c_q` queries to `g` each.
    pub oracle_queries: u64,
    pub cycles: u64,
    /// Timed-out runs started (bounded search) or searches performed (maximum finding).
    pub runs: u64,
    pub success: bool,
}

impl RunTrace {
    pub fn g_queries(&self, c_q: f64) -> f64 {
        self.classical_queries as f64 + c_q * self.oracle_queries as f64
    }
}

pub fn cycle_success_probability(angle: GroverAngle, j: u64) -> f64 {
    let s = ((2 * j + 1) as f64 * angle.theta).sin();
    s * s
}

/// Success probability of a cycle with `j` uniform on `0..m`:
/// `1/2 - sin(4 m theta) / (4 m sin(2 theta))`.
pub fn averaged_success_probability(angle: GroverAngle, m: u64) -> f64 {
    let m = m as f64;
    let s2 = (2.0 * angle.theta).sin();
    if s2.abs() < 1e-12 {
        // theta = 0 never hits; theta = pi/2 hits for every j.
        return if angle.theta > 1.0 { 1.0 } else { 0.0 };
    }
    0.5 - (4.0 * m * angle.theta).sin() / (4.0 * m * s2)
}

/// State of the iteration cap across cycles of one run.
struct Schedule {
    m: f64,
    cap: f64,
}

impl Schedule {
    fn new(list_size: u64) -> Self {
        Schedule {
            m: LAMBDA,
            cap: (list_size as f64).sqrt(),
        }
    }

    /// Uniform `j` among the non-negative integers below `m`.
    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.m.ceil() as u64)
    }

    fn grow(&mut self) {
        self.m = (LAMBDA * self.m).min(self.cap);
    }
}

fn cycle_hits<R: Rng + ?Sized>(angle: GroverAngle, j: u64, rng: &mut R) -> bool {
    rng.random::<f64>() < cycle_success_probability(angle, j)
}

/// Unbounded search; always finds a marked item eventually.
pub fn emulate_qsearch_inf<R: Rng + ?Sized>(list_size: u64, marked: u64, rng: &mut R) -> Result<RunTrace> {
    if marked == 0 {
        return Err(Error::invalid(
            "marked",
            "unbounded search never halts without marked items",
        ));
    }
    let angle = GroverAngle::new(list_size, marked)?;
    let mut schedule = Schedule::new(list_size);
    let mut trace = RunTrace {
        runs: 1,
        ..RunTrace::default()
    };
    loop {
        let j = schedule.pick(rng);
        trace.cycles += 1;
        trace.oracle_queries += j + 1;
        if cycle_hits(angle, j, rng) {
            trace.success = true;
            return Ok(trace);
        }
        schedule.grow();
    }
}

/// One Grover run: cycles continue while `Q_sum + j <= q_max`. Returns the
/// oracle queries spent and whether a marked item was found.
pub fn emulate_grover_run<R: Rng + ?Sized>(
    angle: GroverAngle,
    list_size: u64,
    q_max: f64,
    rng: &mut R,
) -> (u64, u64, bool) {
    let mut schedule = Schedule::new(list_size);
    let mut q_sum = 0u64;
    let mut cycles = 0u64;
    let mut j = schedule.pick(rng);
    while (q_sum + j) as f64 <= q_max {
        cycles += 1;
        if cycle_hits(angle, j, rng) {
            return (q_sum + j + 1, cycles, true);
        }
        q_sum += j + 1;
        schedule.grow();
        j = schedule.pick(rng);
    }
    (q_sum, cycles, false)
}

/// Bounded-error search: up to `n_samples` classical draws, then
/// `ceil(log_3(1/epsilon))` timed-out Grover runs.
pub fn emulate_qsearch<R: Rng + ?Sized>(
    list_size: u64,
    marked: u64,
    n_samples: u64,
    epsilon: f64,
    rng: &mut R,
    model: &CostModel,
) -> Result<RunTrace> {
    let angle = GroverAngle::new(list_size, marked)?;
    let n_runs = grover_runs(epsilon)?;
    let fraction = marked as f64 / list_size as f64;
    let mut trace = RunTrace::default();
    for _ in 0..n_samples {
        trace.classical_queries += 1;
        if rng.random::<f64>() < fraction {
            trace.success = true;
            return Ok(trace);
        }
    }
    let q_max = model.alpha * (list_size as f64).sqrt();
    for _ in 0..n_runs {
        trace.runs += 1;
        let (queries, cycles, found) = emulate_grover_run(angle, list_size, q_max, rng);
        trace.oracle_queries += queries;
        trace.cycles += cycles;
        if found {
            trace.success = true;
            return Ok(trace);
        }
    }
    Ok(trace)
}

/// Rank structure of a value list: values sorted in decreasing order and,
/// per sorted position, the number of strictly larger values.
struct Ranks {
    greater: Vec<u64>,
}

impl Ranks {
    fn new(values: &[f64]) -> Self {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut greater = Vec::with_capacity(sorted.len());
        for (i, v) in sorted.iter().enumerate() {
            if i > 0 && sorted[i - 1] == *v {
                let prev = greater[i - 1];
                greater.push(prev);
            } else {
                greater.push(i as u64);
            }
        }
        Ranks { greater }
    }
}

/// Unbounded maximum finding. Starts at a uniformly random item and keeps
/// searching the strictly larger items, moving to a uniformly random one of
/// them, until none is left. The final idle search is not counted.
pub fn emulate_qmax_inf<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> Result<RunTrace> {
    if values.is_empty() {
        return Err(Error::invalid("values", "must be nonempty"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("values", "NaN has no rank"));
    }
    let ranks = Ranks::new(values);
    let list_size = values.len() as u64;
    let mut position = rng.random_range(0..values.len());
    let mut trace = RunTrace {
        success: true,
        ..RunTrace::default()
    };
    loop {
        let t = ranks.greater[position];
        if t == 0 {
            return Ok(trace);
        }
        let search = emulate_qsearch_inf(list_size, t, rng)?;
        trace.oracle_queries += search.oracle_queries;
        trace.cycles += search.cycles;
        trace.runs += 1;
        position = rng.random_range(0..t as usize);
    }
}

/// Maximum finding on `|L|` distinct values; only the ranks matter.
pub fn emulate_qmax_inf_distinct<R: Rng + ?Sized>(list_size: u64, rng: &mut R) -> Result<RunTrace> {
    if list_size == 0 {
        return Err(Error::invalid("list_size", "must be >= 1"));
    }
    let mut trace = RunTrace {
        success: true,
        ..RunTrace::default()
    };
    let mut t = rng.random_range(0..list_size);
    while t > 0 {
        let search = emulate_qsearch_inf(list_size, t, rng)?;
        trace.oracle_queries += search.oracle_queries;
        trace.cycles += search.cycles;
        trace.runs += 1;
        t = rng.random_range(0..t);
    }
    Ok(trace)
}
