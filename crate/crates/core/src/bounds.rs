//! Closed-form query-count bounds for bounded-error Grover search with an
//! unknown number of marked items (`QSearch`), its worst-case variant with a
//! quadratically better error dependence, and quantum maximum finding (`QMax`).
//!
//! All counts are queries to the classical marking function `g` unless the
//! function name says otherwise; a coherent oracle call costs `c_q` such
//! queries. Every function here is pure.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{check_epsilon, Error, Result};
use crate::special::dilog;

/// Timeout coefficient of a single Grover run (`Q_max = alpha * sqrt(|L|)`).
pub const ALPHA: f64 = 9.2;
/// Growth factor of the iteration cap between Grover cycles.
pub const LAMBDA: f64 = 6.0 / 5.0;
/// Expected oracle queries of the unbounded search once `t >= |L|/4`.
pub const LARGE_FRACTION_QUERIES: f64 = 2.0344;
/// Classical samples drawn before switching to Grover in the experiments.
pub const DEFAULT_N_SAMPLES: u64 = 130;

/// Global constants shared by every bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Queries to `g` per coherent oracle call (compute + uncompute).
    pub c_q: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub n_samples_default: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            c_q: 2.0,
            alpha: ALPHA,
            lambda: LAMBDA,
            n_samples_default: DEFAULT_N_SAMPLES,
        }
    }
}

impl CostModel {
    /// Default model with a different oracle weight.
    pub fn with_cq(c_q: f64) -> Result<Self> {
        let model = CostModel {
            c_q,
            ..CostModel::default()
        };
        model.validate()?;
        Ok(model)
    }

    /// Smallest timeout coefficient for which a single run fails with
    /// probability at most `1/3`, as a function of the growth factor.
    pub fn alpha_min(lambda: f64) -> f64 {
        9.0 * 3f64.sqrt() / 2.0 + 25.0 / (36.0 * E * lambda.ln())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_q.is_finite() && self.c_q >= 1.0) {
            return Err(Error::invalid("c_q", format!("must be >= 1, got {}", self.c_q)));
        }
        if !(self.lambda > 1.0 && self.lambda < 4.0 / 3.0) {
            return Err(Error::invalid(
                "lambda",
                format!("must lie in (1, 4/3), got {}", self.lambda),
            ));
        }
        let min = Self::alpha_min(self.lambda);
        if !(self.alpha.is_finite() && self.alpha >= min) {
            return Err(Error::invalid(
                "alpha",
                format!("must be >= {min:.4} for lambda = {}, got {}", self.lambda, self.alpha),
            ));
        }
        Ok(())
    }
}

/// A list of `list_size` items of which `marked` satisfy the predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRegime {
    pub list_size: u64,
    pub marked: u64,
}

impl SearchRegime {
    pub fn new(list_size: u64, marked: u64) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::invalid("list_size", "must be >= 1"));
        }
        if marked > list_size {
            return Err(Error::invalid(
                "marked",
                format!("{marked} exceeds list size {list_size}"),
            ));
        }
        Ok(SearchRegime { list_size, marked })
    }

    pub fn fraction(&self) -> f64 {
        self.marked as f64 / self.list_size as f64
    }

    /// Grover angle with `sin^2(theta) = t/|L|`.
    pub fn theta(&self) -> f64 {
        self.fraction().sqrt().asin()
    }

    /// Iteration cap beyond which every cycle succeeds with probability at
    /// least 1/4: `|L| / (2 sqrt((|L|-t) t))`.
    pub fn critical_m(&self) -> f64 {
        let l = self.list_size as f64;
        let t = self.marked as f64;
        l / (2.0 * ((l - t) * t).sqrt())
    }

    fn large_fraction(&self) -> bool {
        4 * self.marked >= self.list_size
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Expected,
    WorstCase,
}

/// A query count together with the sense in which it bounds the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub queries: f64,
    pub kind: BoundKind,
}

impl BoundValue {
    fn expected(queries: f64) -> Self {
        BoundValue {
            queries,
            kind: BoundKind::Expected,
        }
    }

    fn worst(queries: f64) -> Self {
        BoundValue {
            queries,
            kind: BoundKind::WorstCase,
        }
    }
}

/// `ceil(x)` that ignores sub-ulp overshoot from the ratio of logarithms.
fn ceil_tol(x: f64) -> f64 {
    (x - 1e-12 * x.abs().max(1.0)).ceil()
}

/// Number of Grover runs needed for failure probability `epsilon`:
/// `ceil(log_3(1/epsilon))`.
pub fn grover_runs(epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    Ok(ceil_tol((1.0 / epsilon).ln() / 3f64.ln()) as u64)
}

/// Upper bound on the expected oracle queries of the unbounded search, with a
/// real-valued marked count. Requires `1 <= t <= |L|`.
pub fn f_upper_continuous(list_size: f64, marked: f64) -> f64 {
    if marked >= list_size / 4.0 {
        return LARGE_FRACTION_QUERIES;
    }
    let root = ((list_size - marked) * marked).sqrt();
    let critical = list_size / (2.0 * root);
    2.25 * list_size / root + ceil_tol(critical.ln() / LAMBDA.ln()) - 3.0
}

/// `F(|L|, t)`: expected oracle queries of the unbounded search on a list with
/// `t >= 1` marked items.
pub fn f_upper(list_size: u64, marked: u64) -> Result<f64> {
    let regime = SearchRegime::new(list_size, marked)?;
    if marked == 0 {
        return Err(Error::invalid(
            "marked",
            "no finite expected cost without marked items; use the worst-case bound",
        ));
    }
    if regime.large_fraction() {
        return Ok(LARGE_FRACTION_QUERIES);
    }
    Ok(f_upper_continuous(list_size as f64, marked as f64))
}

fn grover_multiplier(f: f64, list_size: f64, model: &CostModel) -> f64 {
    1.0 + 1.0 / (1.0 - f / (model.alpha * list_size.sqrt()))
}

/// Expected oracle queries of the timed-out Grover part, all runs combined.
pub fn e_grover_upper(regime: SearchRegime, model: &CostModel) -> Result<f64> {
    let f = f_upper(regime.list_size, regime.marked)?;
    Ok(f * grover_multiplier(f, regime.list_size as f64, model))
}

/// Real-valued counterpart of [`e_grover_upper`] used by the crossover search.
pub fn e_grover_upper_continuous(list_size: f64, marked: f64, model: &CostModel) -> f64 {
    let f = f_upper_continuous(list_size, marked);
    f * grover_multiplier(f, list_size, model)
}

/// Expected queries to `g` of the full search: up to `n_samples` classical
/// draws followed by Grover runs. Independent of `epsilon` when `t >= 1`;
/// with no marked items this equals [`w_qsearch`].
pub fn e_qsearch(regime: SearchRegime, n_samples: u64, epsilon: f64, model: &CostModel) -> Result<BoundValue> {
    check_epsilon(epsilon)?;
    if regime.marked == 0 {
        return w_qsearch(regime.list_size, n_samples, epsilon, model);
    }
    let f = regime.fraction();
    let miss = miss_probability(f, n_samples);
    let classical = (1.0 - miss) / f;
    let quantum = if miss == 0.0 {
        0.0
    } else {
        miss * model.c_q * e_grover_upper(regime, model)?
    };
    Ok(BoundValue::expected(classical + quantum))
}

/// `(1 - f)^n`, the probability that `n` classical draws all miss.
fn miss_probability(f: f64, n: u64) -> f64 {
    if f >= 1.0 {
        if n == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        ((n as f64) * (-f).ln_1p()).exp()
    }
}

/// Worst-case queries to `g`: all classical samples plus every run timing out.
pub fn w_qsearch(list_size: u64, n_samples: u64, epsilon: f64, model: &CostModel) -> Result<BoundValue> {
    let runs = grover_runs(epsilon)? as f64;
    Ok(BoundValue::worst(
        n_samples as f64 + model.alpha * model.c_q * runs * (list_size as f64).sqrt(),
    ))
}

/// Number of small marked counts ruled out by exact search in the worst-case
/// variant: `ceil(ln(1/epsilon) / (2 ln(4/3)))`.
pub fn zalka_t0(epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    let t0 = ceil_tol((1.0 / epsilon).ln() / (2.0 * (4.0f64 / 3.0).ln()));
    Ok(t0.max(1.0) as u64)
}

/// Worst-case queries of the search variant that first runs exact Grover
/// searches for `t = 1..t0`, then `2 t0` randomised runs.
pub fn w_qsearch_zalka(list_size: u64, epsilon: f64, model: &CostModel) -> Result<BoundValue> {
    let t0 = zalka_t0(epsilon)? as f64;
    let queries = model.c_q * (5.0 * t0 + PI * (list_size as f64).sqrt() * t0.sqrt());
    Ok(BoundValue::worst(queries))
}

/// `1/f0` at which classical sampling (expected `1/f` draws) and the Grover
/// part (`c_q * E_Grover`, in queries to `g`) cost the same.
///
/// Returns `None` when the Grover part never wins on this list, i.e. there is
/// no sign change of `1/f - c_q E_Grover(|L|, f|L|)` on `[1/|L|, 1]`.
pub fn crossover_fraction(list_size: u64, model: &CostModel) -> Option<f64> {
    if list_size == 0 {
        return None;
    }
    let l = list_size as f64;
    let gap = |f: f64| 1.0 / f - model.c_q * e_grover_upper_continuous(l, f * l, model);
    let (mut lo, mut hi) = (1.0 / l, 1.0);
    let (g_lo, g_hi) = (gap(lo), gap(hi));
    if g_lo.is_nan() || g_hi.is_nan() || g_lo <= 0.0 || g_hi > 0.0 {
        return None;
    }
    // Invariant: gap(lo) > 0 >= gap(hi).
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(2.0 / (lo + hi))
}

/// Classical sample budget minimising the expected search cost averaged over a
/// uniformly distributed marked count `t in 1..=|L|`. Ties go to the smaller
/// budget; the search covers `0..=|L|`.
pub fn optimal_n_samples(list_size: u64, model: &CostModel) -> u64 {
    if list_size == 0 {
        return 0;
    }
    let l = list_size as f64;
    let terms: Vec<(f64, f64, f64)> = (1..=list_size)
        .map(|t| {
            let f = t as f64 / l;
            let regime = SearchRegime { list_size, marked: t };
            let grover = model.c_q * e_grover_upper(regime, model).expect("t >= 1");
            (1.0 / f, 1.0 - f, grover)
        })
        .collect();
    let mut miss = vec![1.0; terms.len()];
    let mut best = (0, f64::INFINITY);
    for n in 0..=list_size {
        let total: f64 = terms
            .iter()
            .zip(&miss)
            .map(|(&(inv_f, _, grover), &q)| inv_f * (1.0 - q) + q * grover)
            .sum();
        let avg = total / l;
        if avg < best.1 {
            best = (n, avg);
        }
        for (q, &(_, keep, _)) in miss.iter_mut().zip(&terms) {
            *q *= keep;
        }
    }
    best.0
}

/// Expected queries of unbounded maximum finding, summed exactly:
/// `c_q * sum_{t=1}^{|L|-1} F(|L|, t) / (t + 1)`.
pub fn e_qmax_inf_sum(list_size: u64, model: &CostModel) -> f64 {
    if list_size < 2 {
        return 0.0;
    }
    let sum: f64 = (1..list_size)
        .map(|t| f_upper(list_size, t).expect("1 <= t < |L|") / (t as f64 + 1.0))
        .sum();
    model.c_q * sum
}

/// Loose closed-form bound `c_q (6.3505 sqrt|L| + 2.8203)`.
pub fn e_qmax_loose(list_size: u64, model: &CostModel) -> f64 {
    model.c_q * (6.3505 * (list_size as f64).sqrt() + 2.8203)
}

/// Leading coefficient `3 sqrt(3) (1 + pi) / 4` of the sharper closed form.
pub fn qmax_tight_leading_coefficient() -> f64 {
    3.0 * 3f64.sqrt() * (1.0 + PI) / 4.0
}

/// Sharper closed form, including the dilogarithm term. Defined only for
/// `ceil(|L|/4) - 1 >= 4`, i.e. `|L| >= 17`.
pub fn e_qmax_tight(list_size: u64, model: &CostModel) -> Result<f64> {
    let quarter_ceil = list_size.div_ceil(4);
    if quarter_ceil < 5 {
        return Err(Error::invalid(
            "list_size",
            format!("closed form needs ceil(|L|/4) - 1 >= 4, got |L| = {list_size}"),
        ));
    }
    let l = list_size as f64;
    let ln_lambda = LAMBDA.ln();
    let quarter_log = (l / 4.0).ln();
    let value = qmax_tight_leading_coefficient() * l.sqrt()
        + quarter_log / (2.0 * ln_lambda) * ((l / 3.0).ln() + (l / 4.0 + 1.0).ln())
        - 2.0 * quarter_log
        + 5.3482
        + dilog(1.0 - quarter_ceil as f64) / (2.0 * ln_lambda);
    Ok(model.c_q * value)
}

/// Bounded-error maximum finding: expected cost and the Markov timeout of a
/// single boosted repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QMaxBound {
    pub expected: BoundValue,
    /// `3 * E[QMax_inf]`; a single repetition exceeds it with probability <= 1/3.
    pub timeout: f64,
    pub repetitions: u64,
}

/// `ceil(log_3(1/epsilon)) * 3 * E[QMax_inf](|L|)`.
pub fn e_qmax(list_size: u64, epsilon: f64, model: &CostModel) -> Result<QMaxBound> {
    let repetitions = grover_runs(epsilon)?;
    let timeout = 3.0 * e_qmax_inf_sum(list_size, model);
    Ok(QMaxBound {
        expected: BoundValue::expected(repetitions as f64 * timeout),
        timeout,
        repetitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> CostModel {
        CostModel::with_cq(1.0).unwrap()
    }

    fn regime(l: u64, t: u64) -> SearchRegime {
        SearchRegime::new(l, t).unwrap()
    }

    #[test]
    fn default_model_is_valid() {
        CostModel::default().validate().unwrap();
        let min = CostModel::alpha_min(LAMBDA);
        assert!((min - 9.1954).abs() < 1e-4, "{min}");
        assert!(CostModel {
            alpha: 9.1,
            ..CostModel::default()
        }
        .validate()
        .is_err());
        assert!(CostModel {
            c_q: 0.5,
            ..CostModel::default()
        }
        .validate()
        .is_err());
        assert!(CostModel {
            lambda: 1.4,
            ..CostModel::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn f_upper_values() {
        assert_eq!(f_upper(4, 1).unwrap(), 2.0344);
        let f = f_upper(1024, 1).unwrap();
        // 2.25 * 1024 / sqrt(1023) + ceil(log_1.2(16.008)) - 3
        let want = 2.25 * 1024.0 / 1023f64.sqrt() + 16.0 - 3.0;
        assert!((f - want).abs() < 1e-12);
        assert!((f - 85.04).abs() < 0.01, "{f}");
        assert!(f <= ALPHA * 32.0 / 3.0);
        assert!(f_upper(10, 0).is_err());
        assert!(f_upper(10, 11).is_err());
    }

    #[test]
    fn e_grover_upper_values() {
        let v = e_grover_upper(regime(4, 4), &unit()).unwrap();
        let want = 2.0344 * (1.0 + 1.0 / (1.0 - 2.0344 / (9.2 * 2.0)));
        assert!((v - want).abs() < 1e-12);
        assert!((v - 4.321).abs() < 1e-3, "{v}");
        let big = e_grover_upper(regime(1 << 40, 1 << 40), &unit()).unwrap();
        assert!((big - 4.0688).abs() < 1e-4);
        assert!(e_grover_upper(regime(10, 0), &unit()).is_err());
    }

    #[test]
    fn e_qsearch_limits() {
        let m = CostModel::default();
        assert_eq!(e_qsearch(regime(100, 100), 1, 0.01, &m).unwrap().queries, 1.0);
        let empty = e_qsearch(regime(100, 0), 130, 1e-5, &m).unwrap();
        assert_eq!(empty, w_qsearch(100, 130, 1e-5, &m).unwrap());
        assert_eq!(empty.kind, BoundKind::WorstCase);
        let no_classical = e_qsearch(regime(1024, 1), 0, 0.1, &m).unwrap().queries;
        assert_eq!(no_classical, 2.0 * e_grover_upper(regime(1024, 1), &m).unwrap());
        assert!(e_qsearch(regime(10, 1), 5, 1.0, &m).is_err());
        assert!(e_qsearch(regime(10, 1), 5, 0.0, &m).is_err());
    }

    #[test]
    fn e_qsearch_independent_of_epsilon() {
        let m = CostModel::default();
        for &(l, t, n) in &[(100, 3, 10), (5000, 1, 130), (64, 64, 0)] {
            let a = e_qsearch(regime(l, t), n, 0.5, &m).unwrap();
            let b = e_qsearch(regime(l, t), n, 1e-6, &m).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn e_qsearch_classical_limit() {
        let m = CostModel::default();
        let v = e_qsearch(regime(1000, 7), 1_000_000, 0.1, &m).unwrap().queries;
        assert!((v - 1000.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn w_qsearch_values() {
        let v = w_qsearch(10_000, 130, 1e-5, &CostModel::default()).unwrap().queries;
        assert!((v - 20_370.0).abs() < 1e-9, "{v}");
        let one = w_qsearch(1, 0, 1.0 / 3.0, &unit()).unwrap().queries;
        assert!((one - 9.2).abs() < 1e-12);
        assert!(w_qsearch(1, 0, 1.5, &unit()).is_err());
    }

    #[test]
    fn grover_runs_ceilings() {
        assert_eq!(grover_runs(1.0 / 3.0).unwrap(), 1);
        assert_eq!(grover_runs(1.0 / 9.0).unwrap(), 2);
        assert_eq!(grover_runs(1e-3).unwrap(), 7);
        assert_eq!(grover_runs(1e-5).unwrap(), 11);
    }

    #[test]
    fn zalka_values() {
        let v = w_qsearch_zalka(100, 1.0 / 3.0, &unit()).unwrap().queries;
        assert!((v - (10.0 + PI * 10.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((v - 54.43).abs() < 0.01);
        let near_one = w_qsearch_zalka(100, 0.999_999, &unit()).unwrap().queries;
        assert!((near_one - (5.0 + PI * 10.0)).abs() < 1e-12);
    }

    #[test]
    fn zalka_error_dependence_is_quadratically_better() {
        let m = CostModel::default();
        let ratios: Vec<f64> = [1e-2, 1e-8, 1e-32, 1e-128, 1e-300]
            .iter()
            .map(|&e| w_qsearch_zalka(1000, e, &m).unwrap().queries / w_qsearch(1000, 0, e, &m).unwrap().queries)
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        assert!(*ratios.last().unwrap() < 0.1);
    }

    #[test]
    fn crossover_small_and_large_lists() {
        let m = CostModel::default();
        assert_eq!(crossover_fraction(100, &m), None);
        assert_eq!(crossover_fraction(1, &m), None);
        let big = crossover_fraction(1_000_000, &m).unwrap();
        assert!((big / 131.665 - 1.0).abs() < 0.02, "{big}");
    }

    #[test]
    fn optimal_n_samples_small_lists() {
        let m = CostModel::default();
        assert_eq!(optimal_n_samples(1, &m), 1);
        assert_eq!(optimal_n_samples(200, &m), 200);
        let n = optimal_n_samples(1000, &m);
        assert!(n > 50 && n < 500, "{n}");
    }

    #[test]
    fn qmax_sum_values() {
        assert!((e_qmax_inf_sum(2, &unit()) - 1.0172).abs() < 1e-12);
        assert_eq!(e_qmax_inf_sum(1, &unit()), 0.0);
        let s = e_qmax_inf_sum(1000, &unit());
        assert!(s <= 6.3505 * 1000f64.sqrt() + 2.8203);
    }

    #[test]
    fn qmax_loose_values() {
        assert!((e_qmax_loose(100, &unit()) - 66.3253).abs() < 1e-9);
        assert!((e_qmax_loose(100, &CostModel::default()) - 132.6506).abs() < 1e-9);
    }

    #[test]
    fn qmax_tight_domain_and_coefficient() {
        assert!((qmax_tight_leading_coefficient() - 5.3801).abs() < 1e-4);
        assert!(e_qmax_tight(16, &unit()).is_err());
        assert!(e_qmax_tight(17, &unit()).is_ok());
    }

    #[test]
    fn qmax_boosting() {
        let m = CostModel::default();
        let third = e_qmax(50, 1.0 / 3.0, &m).unwrap();
        assert_eq!(third.expected.queries, 3.0 * e_qmax_inf_sum(50, &m));
        assert_eq!(third.timeout, third.expected.queries);
        let milli = e_qmax(50, 1e-3, &m).unwrap();
        assert_eq!(milli.repetitions, 7);
        let want = 21.0 * e_qmax_inf_sum(50, &m);
        assert!((milli.expected.queries - want).abs() < 1e-12 * want);
        assert_eq!(e_qmax(1, 0.1, &m).unwrap().expected.queries, 0.0);
    }
}
