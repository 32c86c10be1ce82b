//! Upper-bounding the search cost without knowing the marked count.
//!
//! The marked fraction `f` is probed by drawing items with replacement until
//! the first hit, `l ~ Geo(f)`. Plugging `l` into a concave bound underestimates
//! it in expectation; the estimators here carry multiplicative corrections
//! (`4/pi` under square roots, `e^gamma` under logarithms) so that their mean
//! over `l` dominates the bound instead.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::bounds::{grover_runs, CostModel, ALPHA, LAMBDA};
use crate::error::{check_epsilon, Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default tolerance for falsely concluding that nothing is marked.
pub const DEFAULT_DELTA: f64 = 0.01;

/// Outcome of one geometric experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Draw {
    /// Draws made, including the hit. Equals the cap when nothing was found.
    pub count: u64,
    pub hit: bool,
    pub item: Option<u64>,
}

/// Draw uniformly with replacement until a marked item shows up, making at
/// most `cap` draws.
pub trait GeometricSampler {
    fn draw(&mut self, cap: u64) -> Draw;
}

/// Samples indices of an explicit list through a membership predicate.
pub struct ListSampler<P, R> {
    list_size: u64,
    predicate: P,
    rng: R,
}

impl<P: FnMut(u64) -> bool, R: Rng> ListSampler<P, R> {
    pub fn new(list_size: u64, predicate: P, rng: R) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::invalid("list_size", "must be >= 1"));
        }
        Ok(ListSampler {
            list_size,
            predicate,
            rng,
        })
    }

    pub fn into_rng(self) -> R {
        self.rng
    }
}

impl<P: FnMut(u64) -> bool, R: Rng> GeometricSampler for ListSampler<P, R> {
    fn draw(&mut self, cap: u64) -> Draw {
        for count in 1..=cap {
            let item = self.rng.random_range(0..self.list_size);
            if (self.predicate)(item) {
                return Draw {
                    count,
                    hit: true,
                    item: Some(item),
                };
            }
        }
        Draw {
            count: cap,
            hit: false,
            item: None,
        }
    }
}

/// Samples `l` directly from `Geo(f)`; for Monte-Carlo work where the item
/// identity does not matter.
pub struct FractionSampler<R> {
    geometric: Option<Geometric>,
    rng: R,
}

impl<R: Rng> FractionSampler<R> {
    pub fn new(fraction: f64, rng: R) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::invalid(
                "fraction",
                format!("must lie in [0, 1], got {fraction}"),
            ));
        }
        let geometric = if fraction > 0.0 {
            Some(Geometric::new(fraction).map_err(|e| Error::invalid("fraction", e.to_string()))?)
        } else {
            None
        };
        Ok(FractionSampler { geometric, rng })
    }

    /// Single draw without a cap, `l >= 1`.
    pub fn sample_unbounded(&mut self) -> Option<u64> {
        self.geometric
            .as_ref()
            .map(|g| g.sample(&mut self.rng).saturating_add(1))
    }
}

impl<R: Rng> GeometricSampler for FractionSampler<R> {
    fn draw(&mut self, cap: u64) -> Draw {
        match self.sample_unbounded() {
            Some(l) if l <= cap => Draw {
                count: l,
                hit: true,
                item: None,
            },
            _ => Draw {
                count: cap,
                hit: false,
                item: None,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub n_samples: u64,
    pub delta: f64,
    pub epsilon: f64,
    /// Replaces `ceil(|L|/delta)` when set.
    pub l_max_override: Option<u64>,
}

impl EstimateConfig {
    pub fn new(n_samples: u64, delta: f64, epsilon: f64) -> Result<Self> {
        let config = EstimateConfig {
            n_samples,
            delta,
            epsilon,
            l_max_override: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_l_max(mut self, l_max: u64) -> Self {
        self.l_max_override = Some(l_max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(
                "delta",
                format!("must lie in (0, 1), got {}", self.delta),
            ));
        }
        if self.l_max_override == Some(0) {
            return Err(Error::invalid("l_max", "must be >= 1"));
        }
        Ok(())
    }

    pub fn l_max(&self, list_size: u64) -> u64 {
        self.l_max_override
            .unwrap_or_else(|| (list_size as f64 / self.delta).ceil() as u64)
            .max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    ClassicalHit,
    GroverEstimate,
    AssumedEmpty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutcome {
    /// `l_max + 1` on the assumed-empty branch.
    pub l: u64,
    pub branch: Branch,
    pub estimated_queries: f64,
    pub found_item: Option<u64>,
    /// Actual draws made while sampling.
    pub draws: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonBudget {
    pub epsilon_total: f64,
    pub t_max_steps: u64,
}

/// `d_1`: `E[sqrt(d_1 l)] >= sqrt(E[l])` for every geometric `l`.
pub fn sqrt_bias_factor() -> f64 {
    4.0 / PI
}

/// `d_2`: `E[ln(d_2 l)] >= ln(E[l])` for every geometric `l`.
pub fn log_bias_factor() -> f64 {
    EULER_GAMMA.exp()
}

/// Estimator of the Grover oracle queries from one geometric draw `l`,
/// dominating the expected-cost bound on average.
pub fn grover_query_estimator(l: u64, list_size: u64) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("l", "must be >= 1"));
    }
    if list_size == 0 {
        return Err(Error::invalid("list_size", "must be >= 1"));
    }
    let root_l = (list_size as f64).sqrt();
    let l = l as f64;
    Ok(-1.1272
        + 1.7850 / root_l
        + 1.2991 / root_l * l
        + (5.1962 - 2.5064 / root_l) * 2.0 * l.sqrt() / PI.sqrt()
        + 1.25 * (log_bias_factor() * l).ln() / LAMBDA.ln())
}

/// Plug-in estimator without the bias corrections: `1/t` replaced by `l/|L|`
/// in the expected Grover cost. Underestimates for small fractions.
pub fn naive_grover_estimator(l: u64, list_size: u64, model: &CostModel) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("l", "must be >= 1"));
    }
    let list = list_size as f64;
    Ok(crate::bounds::e_grover_upper_continuous(list, list / l as f64, model))
}

/// `H(l) = min(l, N) + [l > N] c_q E_est(l)`: classical draws plus the Grover
/// estimate when sampling would have given up.
pub fn h_estimator(l: u64, list_size: u64, n_samples: u64, model: &CostModel) -> Result<f64> {
    if l == 0 {
        return Err(Error::invalid("l", "must be >= 1"));
    }
    let classical = l.min(n_samples) as f64;
    if l <= n_samples {
        return Ok(classical);
    }
    Ok(classical + model.c_q * grover_query_estimator(l, list_size)?)
}

/// One round of the estimation procedure: draw `l`, then pick the classical,
/// Grover or assumed-empty branch.
pub fn estimate_qsearch<S: GeometricSampler + ?Sized>(
    sampler: &mut S,
    list_size: u64,
    config: &EstimateConfig,
    model: &CostModel,
) -> Result<EstimateOutcome> {
    config.validate()?;
    let l_max = config.l_max(list_size);
    let draw = sampler.draw(l_max);
    let n = config.n_samples;
    if !draw.hit {
        let runs = grover_runs(config.epsilon)? as f64;
        return Ok(EstimateOutcome {
            l: l_max + 1,
            branch: Branch::AssumedEmpty,
            estimated_queries: n as f64 + ALPHA * model.c_q * runs * (list_size as f64).sqrt(),
            found_item: None,
            draws: draw.count,
        });
    }
    let l = draw.count;
    let (branch, estimated_queries) = if l <= n {
        (Branch::ClassicalHit, l as f64)
    } else {
        (Branch::GroverEstimate, h_estimator(l, list_size, n, model)?)
    };
    Ok(EstimateOutcome {
        l,
        branch,
        estimated_queries,
        found_item: draw.item,
        draws: draw.count,
    })
}

/// Averages the estimate over several independent draws. The mean still
/// dominates in expectation, but the tail guarantees of a single draw are
/// not claimed for it. The reported item and branch come from the first draw.
pub fn estimate_qsearch_averaged<S: GeometricSampler + ?Sized>(
    sampler: &mut S,
    list_size: u64,
    config: &EstimateConfig,
    model: &CostModel,
    repeats: u32,
) -> Result<EstimateOutcome> {
    if repeats == 0 {
        return Err(Error::invalid("repeats", "must be >= 1"));
    }
    let mut first = estimate_qsearch(sampler, list_size, config, model)?;
    let mut total = first.estimated_queries;
    for _ in 1..repeats {
        let next = estimate_qsearch(sampler, list_size, config, model)?;
        total += next.estimated_queries;
        first.draws += next.draws;
    }
    first.estimated_queries = total / repeats as f64;
    Ok(first)
}

/// Per-call failure probability so that `T` calls jointly fail with
/// probability at most `epsilon_total`: `1 - (1 - eps)^(1/T)`.
pub fn subroutine_epsilon(budget: EpsilonBudget) -> Result<f64> {
    check_epsilon(budget.epsilon_total)?;
    if budget.t_max_steps == 0 {
        return Err(Error::invalid("t_max_steps", "must be >= 1"));
    }
    let per_step = (-budget.epsilon_total).ln_1p() / budget.t_max_steps as f64;
    Ok(-per_step.exp_m1())
}
