use rand::Rng;

use super::{objective, Assignment, MaxSatInstance};
use crate::error::{Error, Result};

/// Assignment plus per-clause true-literal counts. Flip gains are computed on
/// demand from the variable's clause list.
#[derive(Debug, Clone)]
pub struct ClauseState<'a> {
    instance: &'a MaxSatInstance,
    assignment: Assignment,
    true_count: Vec<u32>,
    objective: f64,
}

impl<'a> ClauseState<'a> {
    pub fn new(instance: &'a MaxSatInstance, assignment: Assignment) -> Result<Self> {
        let objective = objective(instance, &assignment)?;
        let k = instance.k() as i64;
        let true_count = (0..instance.m())
            .map(|c| ((instance.clause_product(c, &assignment) + k) / 2) as u32)
            .collect();
        Ok(ClauseState {
            instance,
            assignment,
            true_count,
            objective,
        })
    }

    pub fn instance(&self) -> &'a MaxSatInstance {
        self.instance
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn true_counts(&self) -> &[u32] {
        &self.true_count
    }

    /// Change in objective if `var` were flipped.
    pub fn gain(&self, var: usize) -> f64 {
        let index = self.instance.index();
        let x = self.assignment.sign(var);
        let weights = self.instance.weights();
        let mut gain = 0.0;
        for (&c, &s) in index.clauses_of(var).iter().zip(index.signs_of(var)) {
            let count = self.true_count[c as usize];
            if s == x {
                if count == 1 {
                    gain -= weights[c as usize];
                }
            } else if count == 0 {
                gain += weights[c as usize];
            }
        }
        gain
    }

    pub fn improves(&self, var: usize) -> bool {
        self.gain(var) > 0.0
    }

    /// Flips `var` and returns the gain that was applied to the objective.
    pub fn flip(&mut self, var: usize) -> Result<f64> {
        let n = self.instance.n();
        if var >= n {
            return Err(Error::IndexOutOfRange { index: var, n });
        }
        let gain = self.gain(var);
        let index = self.instance.index();
        let x = self.assignment.sign(var);
        for (&c, &s) in index.clauses_of(var).iter().zip(index.signs_of(var)) {
            if s == x {
                self.true_count[c as usize] -= 1;
            } else {
                self.true_count[c as usize] += 1;
            }
        }
        self.assignment.flip(var);
        self.objective += gain;
        Ok(gain)
    }

    /// Stored entries beyond the instance itself.
    pub fn memory_entries(&self) -> usize {
        self.assignment.len() + self.true_count.len() + 1
    }
}

/// Exact set of improving single flips, maintained incrementally.
#[derive(Debug, Clone)]
pub struct MarkedSetTracker<'a> {
    state: ClauseState<'a>,
    gains: Vec<f64>,
    marked: Vec<u32>,
    /// Slot of each variable in `marked`, `u32::MAX` when absent.
    position: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

/// Evaluates all `n` single flips of `assignment` and records the improving ones.
pub fn build_tracker(instance: &MaxSatInstance, assignment: Assignment) -> Result<MarkedSetTracker<'_>> {
    let state = ClauseState::new(instance, assignment)?;
    let n = instance.n();
    let mut tracker = MarkedSetTracker {
        gains: (0..n).map(|v| state.gain(v)).collect(),
        state,
        marked: Vec::new(),
        position: vec![ABSENT; n],
    };
    for v in 0..n {
        tracker.sync(v);
    }
    Ok(tracker)
}

impl<'a> MarkedSetTracker<'a> {
    fn sync(&mut self, var: usize) {
        let want = self.gains[var] > 0.0;
        let slot = self.position[var];
        if want && slot == ABSENT {
            self.position[var] = self.marked.len() as u32;
            self.marked.push(var as u32);
        } else if !want && slot != ABSENT {
            let last = self.marked.pop().expect("slot implies nonempty");
            if last as usize != var {
                self.marked[slot as usize] = last;
                self.position[last as usize] = slot;
            }
            self.position[var] = ABSENT;
        }
    }

    /// Flips `var` and refreshes the gains of every variable sharing a clause
    /// with it. Returns the number of gain recomputations.
    pub fn apply_flip(&mut self, var: usize) -> Result<usize> {
        self.state.flip(var)?;
        let instance = self.state.instance();
        let mut touched = 0;
        for &c in instance.index().clauses_of(var) {
            for &u in instance.clause_vars(c as usize) {
                let u = u as usize;
                self.gains[u] = self.state.gain(u);
                self.sync(u);
                touched += 1;
            }
        }
        Ok(touched)
    }

    pub fn state(&self) -> &ClauseState<'a> {
        &self.state
    }

    pub fn current(&self) -> &Assignment {
        self.state.assignment()
    }

    pub fn objective(&self) -> f64 {
        self.state.objective()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Improving variables, in no particular order.
    pub fn marked(&self) -> &[u32] {
        &self.marked
    }

    pub fn marked_count(&self) -> usize {
        self.marked.len()
    }

    pub fn is_marked(&self, var: usize) -> bool {
        self.position[var] != ABSENT
    }

    /// Improving variables in increasing order.
    pub fn marked_sorted(&self) -> Vec<u32> {
        let mut v = self.marked.clone();
        v.sort_unstable();
        v
    }

    pub fn pick_marked<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.marked.is_empty() {
            return None;
        }
        Some(self.marked[rng.random_range(0..self.marked.len())] as usize)
    }

    /// Largest gain among the improving flips, lowest index on ties.
    pub fn best_marked(&self) -> Option<usize> {
        self.marked
            .iter()
            .map(|&v| v as usize)
            .max_by(|&a, &b| self.gains[a].total_cmp(&self.gains[b]).then(b.cmp(&a)))
    }

    /// Stored entries beyond the instance itself.
    pub fn memory_entries(&self) -> usize {
        self.state.memory_entries() + self.gains.len() + self.position.len() + self.marked.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxsat::generate_instance;
    use crate::rng::stream;

    fn assert_same(a: &MarkedSetTracker, b: &MarkedSetTracker) {
        assert_eq!(a.current(), b.current());
        assert_eq!(a.state().true_counts(), b.state().true_counts());
        assert_eq!(a.gains(), b.gains());
        assert_eq!(a.marked_sorted(), b.marked_sorted());
        assert!((a.objective() - b.objective()).abs() < 1e-9);
    }

    #[test]
    fn single_unit_clause() {
        let inst = MaxSatInstance::from_literals(1, 1, &[vec![1]], vec![0.75]).unwrap();
        let t = build_tracker(&inst, Assignment::all(1, false)).unwrap();
        assert_eq!(t.marked(), &[0]);
        assert_eq!(t.gains()[0], 0.75);
    }

    #[test]
    fn local_maximum_has_nothing_marked() {
        // (x1 | x2) & (!x1 | !x2): at x = (T, F) every flip breaks a clause.
        let inst = MaxSatInstance::from_literals(2, 2, &[vec![1, 2], vec![-1, -2]], vec![1.0, 1.0]).unwrap();
        let t = build_tracker(&inst, Assignment::from_bools(&[true, false])).unwrap();
        assert_eq!(t.objective(), 2.0);
        assert!(t.marked().is_empty());
    }

    #[test]
    fn double_flip_restores() {
        let inst = generate_instance(30, 3, 4.0, 2).unwrap();
        let mut rng = stream(3, 0);
        let mut t = build_tracker(&inst, Assignment::random(30, &mut rng)).unwrap();
        let before = t.clone();
        t.apply_flip(7).unwrap();
        t.apply_flip(7).unwrap();
        assert_same(&t, &before);
    }

    #[test]
    fn matches_scratch_after_each_flip() {
        let mut rng = stream(4, 0);
        for seed in 0..5 {
            let inst = generate_instance(40, 2, 3.0, seed).unwrap();
            let mut t = build_tracker(&inst, Assignment::random(40, &mut rng)).unwrap();
            for _ in 0..300 {
                let v = rng.random_range(0..40);
                let touched = t.apply_flip(v).unwrap();
                assert!(touched <= inst.k() * inst.index().degree(v));
                let fresh = build_tracker(&inst, t.current().clone()).unwrap();
                assert_same(&t, &fresh);
                for u in 0..40 {
                    let gain =
                        objective(&inst, &t.current().flipped(u)).unwrap() - objective(&inst, t.current()).unwrap();
                    assert_eq!(t.is_marked(u), gain > 0.0);
                }
            }
        }
    }

    #[test]
    fn best_marked_tie_break() {
        let inst = MaxSatInstance::from_literals(3, 1, &[vec![3], vec![2], vec![1]], vec![0.5, 0.5, 0.25]).unwrap();
        let t = build_tracker(&inst, Assignment::all(3, false)).unwrap();
        assert_eq!(t.marked_count(), 3);
        assert_eq!(t.best_marked(), Some(1));
    }

    #[test]
    fn out_of_range_flip() {
        let inst = generate_instance(5, 2, 1.0, 0).unwrap();
        let mut t = build_tracker(&inst, Assignment::all(5, true)).unwrap();
        assert!(matches!(
            t.apply_flip(5),
            Err(Error::IndexOutOfRange { index: 5, n: 5 })
        ));
    }
}
