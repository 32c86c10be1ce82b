//! Weighted MAX-k-SAT instances and single-flip neighbourhoods.
//!
//! Variables are 0-based here; the text format uses signed 1-based literals.
//! An assignment is a sign vector `x~ in {-1, +1}^n` and a clause row holds
//! `+1` for a plain literal and `-1` for a negated one. A clause is violated
//! exactly when every literal is, i.e. when `(A x~)_i = -k`.

mod io;
mod tracker;

pub use io::{read_instance, write_instance};
pub use tracker::{build_tracker, ClauseState, MarkedSetTracker};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

/// For each variable, the clauses it occurs in and the sign it carries there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarClauseIndex {
    offsets: Vec<usize>,
    clauses: Vec<u32>,
    signs: Vec<i8>,
}

impl VarClauseIndex {
    fn build(n: usize, k: usize, vars: &[u32], signs: &[i8]) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &v in vars {
            degree[v as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut clauses = vec![0u32; vars.len()];
        let mut occ_signs = vec![0i8; vars.len()];
        for (slot, (&v, &s)) in vars.iter().zip(signs).enumerate() {
            let at = fill[v as usize];
            clauses[at] = (slot / k) as u32;
            occ_signs[at] = s;
            fill[v as usize] += 1;
        }
        VarClauseIndex {
            offsets,
            clauses,
            signs: occ_signs,
        }
    }

    /// Clause indices containing `var`, in increasing order.
    pub fn clauses_of(&self, var: usize) -> &[u32] {
        &self.clauses[self.offsets[var]..self.offsets[var + 1]]
    }

    /// Signs of `var` in each of [`Self::clauses_of`].
    pub fn signs_of(&self, var: usize) -> &[i8] {
        &self.signs[self.offsets[var]..self.offsets[var + 1]]
    }

    pub fn degree(&self, var: usize) -> usize {
        self.offsets[var + 1] - self.offsets[var]
    }

    /// Stored entries, the memory proxy of the index.
    pub fn entries(&self) -> usize {
        self.offsets.len() + self.clauses.len() + self.signs.len()
    }
}

/// Immutable weighted MAX-k-SAT instance: a sparse `m x n` clause matrix over
/// `{-1, 0, 1}` with exactly `k` nonzeros per row, and clause weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxSatInstance {
    n: usize,
    k: usize,
    vars: Vec<u32>,
    signs: Vec<i8>,
    weights: Vec<f64>,
    index: VarClauseIndex,
}

impl MaxSatInstance {
    /// Builds an instance from rows of signed 1-based literals.
    pub fn from_literals(n: usize, k: usize, rows: &[Vec<i64>], weights: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::invalid("n, k", "must both be >= 1"));
        }
        if rows.len() != weights.len() {
            return Err(Error::Dimension {
                expected: rows.len(),
                actual: weights.len(),
            });
        }
        let mut vars = Vec::with_capacity(rows.len() * k);
        let mut signs = Vec::with_capacity(rows.len() * k);
        for (c, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(
                    "clause",
                    format!("clause {c} has {} literals, expected {k}", row.len()),
                ));
            }
            for &lit in row {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > n {
                    return Err(Error::invalid(
                        "clause",
                        format!("clause {c}: literal {lit} outside 1..={n}"),
                    ));
                }
                vars.push((var - 1) as u32);
                signs.push(if lit > 0 { 1 } else { -1 });
            }
        }
        Self::from_parts(n, k, vars, signs, weights)
    }

    fn from_parts(n: usize, k: usize, vars: Vec<u32>, signs: Vec<i8>, weights: Vec<f64>) -> Result<Self> {
        for (c, row) in vars.chunks(k).enumerate() {
            for (a, &v) in row.iter().enumerate() {
                if row[..a].contains(&v) {
                    return Err(Error::invalid(
                        "clause",
                        format!("clause {c} repeats variable {}", v + 1),
                    ));
                }
            }
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::invalid("weights", format!("must be finite and >= 0, got {w}")));
        }
        let index = VarClauseIndex::build(n, k, &vars, &signs);
        Ok(MaxSatInstance {
            n,
            k,
            vars,
            signs,
            weights,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn index(&self) -> &VarClauseIndex {
        &self.index
    }

    /// Variables of clause `c`, 0-based.
    pub fn clause_vars(&self, c: usize) -> &[u32] {
        &self.vars[c * self.k..(c + 1) * self.k]
    }

    /// Row `c` of the clause matrix restricted to its nonzeros.
    pub fn clause_signs(&self, c: usize) -> &[i8] {
        &self.signs[c * self.k..(c + 1) * self.k]
    }

    /// Clause `c` as signed 1-based literals.
    pub fn clause_literals(&self, c: usize) -> Vec<i64> {
        self.clause_vars(c)
            .iter()
            .zip(self.clause_signs(c))
            .map(|(&v, &s)| (v as i64 + 1) * s as i64)
            .collect()
    }

    /// `(A x~)_c`, in `[-k, k]`.
    pub fn clause_product(&self, c: usize, assignment: &Assignment) -> i64 {
        self.clause_vars(c)
            .iter()
            .zip(self.clause_signs(c))
            .map(|(&v, &s)| (s * assignment.signs[v as usize]) as i64)
            .sum()
    }

    fn check_dims(&self, assignment: &Assignment) -> Result<()> {
        if assignment.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: assignment.len(),
            });
        }
        Ok(())
    }
}

/// Sign vector over `{-1, +1}`; `+1` means true.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    signs: Vec<i8>,
}

impl Assignment {
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if let Some(s) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::invalid("signs", format!("entries must be +1 or -1, got {s}")));
        }
        Ok(Assignment { signs })
    }

    pub fn from_bools(values: &[bool]) -> Self {
        Assignment {
            signs: values.iter().map(|&b| if b { 1 } else { -1 }).collect(),
        }
    }

    pub fn all(n: usize, value: bool) -> Self {
        Assignment {
            signs: vec![if value { 1 } else { -1 }; n],
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Assignment {
            signs: (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn sign(&self, var: usize) -> i8 {
        self.signs[var]
    }

    pub fn value(&self, var: usize) -> bool {
        self.signs[var] > 0
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn flip(&mut self, var: usize) {
        self.signs[var] = -self.signs[var];
    }

    pub fn flipped(&self, var: usize) -> Self {
        let mut next = self.clone();
        next.flip(var);
        next
    }
}

/// `phi~(x~) = W^T ceil((A x~ + k) / (2k))`.
pub fn objective(instance: &MaxSatInstance, assignment: &Assignment) -> Result<f64> {
    instance.check_dims(assignment)?;
    let k = instance.k as i64;
    Ok((0..instance.m())
        .map(|c| {
            let lifted = instance.clause_product(c, assignment) + k;
            instance.weights[c] * (lifted as u64).div_ceil(2 * k as u64) as f64
        })
        .sum())
}

/// Neighbourhood size `sum_{i=1}^{d} C(n, i)`; the climbers only use `d = 1`.
pub fn neighbourhood_size(n: u64, d: u64) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for i in 1..=d.min(n) {
        binom = binom * (n - i + 1) as u128 / i as u128;
        total += binom;
    }
    total
}

/// Random instance description; see [`generate_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub k: usize,
    /// Clause-to-variable ratio, `m = ceil(r n)`.
    pub r: f64,
    pub seed: u64,
}

/// `ceil(r n)`, ignoring floating overshoot such as `0.1 * 30`.
pub fn clause_count(n: usize, r: f64) -> usize {
    let x = r * n as f64;
    (x - 1e-9 * x.max(1.0)).ceil().max(0.0) as usize
}

/// `m = ceil(r n)` clauses over `k` distinct variables each, every literal
/// negated with probability 1/2, weights uniform on `[0, 1)`.
pub fn generate_instance(n: usize, k: usize, r: f64, seed: u64) -> Result<MaxSatInstance> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("n, k", "must both be >= 1"));
    }
    if k > n {
        return Err(Error::invalid(
            "k",
            format!("{k} literals need at least {k} variables, got {n}"),
        ));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("r", format!("must be positive, got {r}")));
    }
    let m = clause_count(n, r);
    let mut rng: StreamRng = stream(seed, 0);
    let mut vars = Vec::with_capacity(m * k);
    let mut signs = Vec::with_capacity(m * k);
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        for v in index::sample(&mut rng, n, k) {
            vars.push(v as u32);
            signs.push(if rng.random::<bool>() { -1 } else { 1 });
        }
        weights.push(rng.random::<f64>());
    }
    MaxSatInstance::from_parts(n, k, vars, signs, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Clause-by-clause truth evaluation, independent of the matrix form.
    fn semantic(instance: &MaxSatInstance, a: &Assignment) -> f64 {
        (0..instance.m())
            .filter(|&c| {
                instance
                    .clause_literals(c)
                    .iter()
                    .any(|&lit| a.value(lit.unsigned_abs() as usize - 1) == (lit > 0))
            })
            .map(|c| instance.weights()[c])
            .sum()
    }

    fn or2() -> MaxSatInstance {
        MaxSatInstance::from_literals(2, 2, &[vec![1, 2]], vec![1.0]).unwrap()
    }

    #[test]
    fn two_literal_clause() {
        let inst = or2();
        assert_eq!(
            objective(&inst, &Assignment::from_signs(vec![-1, -1]).unwrap()).unwrap(),
            0.0
        );
        assert_eq!(
            objective(&inst, &Assignment::from_signs(vec![1, -1]).unwrap()).unwrap(),
            1.0
        );
        assert!(objective(&inst, &Assignment::all(3, true)).is_err());
    }

    #[test]
    fn matches_semantic_evaluation() {
        let inst = generate_instance(40, 3, 4.2, 11).unwrap();
        let mut rng = stream(99, 0);
        for _ in 0..1000 {
            let a = Assignment::random(40, &mut rng);
            let v = objective(&inst, &a).unwrap();
            assert!((v - semantic(&inst, &a)).abs() < 1e-12);
            assert!(v >= 0.0 && v <= inst.total_weight() + 1e-12);
        }
    }

    #[test]
    fn generator_shape() {
        let inst = generate_instance(10, 2, 3.0, 5).unwrap();
        assert_eq!(inst.m(), 30);
        for c in 0..30 {
            let vars = inst.clause_vars(c);
            assert_eq!(vars.len(), 2);
            assert_ne!(vars[0], vars[1]);
        }
        assert!(inst.weights().iter().all(|w| (0.0..1.0).contains(w)));
        assert_eq!(inst, generate_instance(10, 2, 3.0, 5).unwrap());
        assert_ne!(inst, generate_instance(10, 2, 3.0, 6).unwrap());
        assert!(generate_instance(2, 3, 1.0, 0).is_err());
        assert_eq!(clause_count(30, 0.1), 3);
        assert_eq!(clause_count(7, 1.5), 11);
    }

    #[test]
    fn negation_frequency() {
        let inst = generate_instance(1000, 2, 50.0, 1).unwrap();
        let lits = (inst.m() * inst.k()) as f64;
        let neg = (0..inst.m())
            .flat_map(|c| inst.clause_signs(c).to_vec())
            .filter(|&s| s < 0)
            .count() as f64;
        let sigma = (lits * 0.25).sqrt();
        assert!((neg - lits / 2.0).abs() < 3.0 * sigma, "{neg} of {lits}");
    }

    #[test]
    fn index_consistent() {
        let inst = generate_instance(30, 3, 3.0, 8).unwrap();
        for v in 0..30 {
            for (&c, &s) in inst.index().clauses_of(v).iter().zip(inst.index().signs_of(v)) {
                let at = inst
                    .clause_vars(c as usize)
                    .iter()
                    .position(|&u| u as usize == v)
                    .unwrap();
                assert_eq!(inst.clause_signs(c as usize)[at], s);
            }
        }
        let total: usize = (0..30).map(|v| inst.index().degree(v)).sum();
        assert_eq!(total, inst.m() * 3);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(MaxSatInstance::from_literals(3, 2, &[vec![1, 1]], vec![1.0]).is_err());
        assert!(MaxSatInstance::from_literals(3, 2, &[vec![1, 4]], vec![1.0]).is_err());
        assert!(MaxSatInstance::from_literals(3, 2, &[vec![1, 0]], vec![1.0]).is_err());
        assert!(MaxSatInstance::from_literals(3, 2, &[vec![1]], vec![1.0]).is_err());
        assert!(MaxSatInstance::from_literals(3, 2, &[vec![1, 2]], vec![-1.0]).is_err());
        assert!(MaxSatInstance::from_literals(3, 2, &[vec![1, 2]], vec![]).is_err());
    }

    #[test]
    fn neighbourhoods() {
        assert_eq!(neighbourhood_size(100, 1), 100);
        assert_eq!(neighbourhood_size(10, 2), 55);
        assert_eq!(neighbourhood_size(3, 5), 7);
    }
}
