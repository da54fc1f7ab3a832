//! Exact explicit-state CTL model checking by fixpoint labeling.
//!
//! EX/EU/EG are computed directly on bitsets; the remaining connectives go
//! through the standard dualities. The verdict convention is NuSMV's: a
//! formula holds iff every initial state satisfies it.

use std::time::Instant;

use crate::bitset::StateSet;
use crate::ctl::CtlFormula;
use crate::kripke::KripkeStructure;

/// Outcome of one exact check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub holds: bool,
    pub sat_states: StateSet,
    /// Wall-clock time of the labeling computation only.
    pub elapsed_ns: u64,
}

struct Labeler<'a> {
    k: &'a KripkeStructure,
    succ: Vec<Vec<usize>>,
    n: usize,
}

impl<'a> Labeler<'a> {
    fn new(k: &'a KripkeStructure) -> Self {
        Labeler {
            k,
            succ: k.successors(),
            n: k.n_states(),
        }
    }

    /// States with at least one successor inside `set`.
    fn pre_image(&self, set: &StateSet) -> StateSet {
        let mut out = StateSet::empty(self.n);
        for s in 0..self.n {
            if self.succ[s].iter().any(|&t| set.contains(t)) {
                out.insert(s);
            }
        }
        out
    }

    /// Least fixpoint for E[a U b]: seed with b-states, keep adding
    /// a-states that can step into the set.
    fn until(&self, a: &StateSet, b: &StateSet) -> StateSet {
        let mut set = b.clone();
        let mut iterations = 0usize;
        loop {
            let mut step = self.pre_image(&set);
            step.intersect_with(a);
            step.union_with(&set);
            if step == set {
                break;
            }
            debug_assert!(set.is_subset_of(&step));
            set = step;
            iterations += 1;
            debug_assert!(iterations <= self.n);
        }
        set
    }

    /// Greatest fixpoint for EG a: seed with a-states, keep removing
    /// states with no successor inside the set.
    fn globally(&self, a: &StateSet) -> StateSet {
        let mut set = a.clone();
        let mut iterations = 0usize;
        loop {
            let mut step = self.pre_image(&set);
            step.intersect_with(&set);
            if step == set {
                break;
            }
            debug_assert!(step.is_subset_of(&set));
            set = step;
            iterations += 1;
            debug_assert!(iterations <= self.n);
        }
        set
    }

    fn atom(&self, name: &str) -> StateSet {
        let mut set = StateSet::empty(self.n);
        if let Some(p) = self.k.prop_index(name) {
            for s in 0..self.n {
                if self.k.has_prop(s, p) {
                    set.insert(s);
                }
            }
        }
        // unknown atom: false everywhere
        set
    }

    fn sat(&self, phi: &CtlFormula) -> StateSet {
        use CtlFormula::*;
        match phi {
            True => StateSet::full(self.n),
            False => StateSet::empty(self.n),
            Atom(name) => self.atom(name),
            Not(a) => self.sat(a).complement(),
            And(a, b) => {
                let mut sa = self.sat(a);
                sa.intersect_with(&self.sat(b));
                sa
            }
            Or(a, b) => {
                let mut sa = self.sat(a);
                sa.union_with(&self.sat(b));
                sa
            }
            Implies(a, b) => {
                let mut sa = self.sat(a).complement();
                sa.union_with(&self.sat(b));
                sa
            }
            EX(a) => self.pre_image(&self.sat(a)),
            EU(a, b) => self.until(&self.sat(a), &self.sat(b)),
            EG(a) => self.globally(&self.sat(a)),
            // EF a = E[true U a]
            EF(a) => self.until(&StateSet::full(self.n), &self.sat(a)),
            // AX a = !EX !a
            AX(a) => self.pre_image(&self.sat(a).complement()).complement(),
            // AF a = !EG !a
            AF(a) => self.globally(&self.sat(a).complement()).complement(),
            // AG a = !EF !a
            AG(a) => self
                .until(&StateSet::full(self.n), &self.sat(a).complement())
                .complement(),
            // A[a U b] = !(E[!b U (!a & !b)] | EG !b)
            AU(a, b) => {
                let not_a = self.sat(a).complement();
                let not_b = self.sat(b).complement();
                let mut both = not_a;
                both.intersect_with(&not_b);
                let mut bad = self.until(&not_b, &both);
                bad.union_with(&self.globally(&not_b));
                bad.complement()
            }
        }
    }
}

/// Exact satisfying-state set {s | K,s |= phi}.
pub fn label_states(k: &KripkeStructure, phi: &CtlFormula) -> StateSet {
    Labeler::new(k).sat(phi)
}

/// Runs the labeling under a monotonic clock and derives the verdict.
pub fn check(k: &KripkeStructure, phi: &CtlFormula) -> SatResult {
    let start = Instant::now();
    let sat_states = label_states(k, phi);
    let elapsed_ns = start.elapsed().as_nanos() as u64;
    let holds = k.initial().iter().all(|&s| sat_states.contains(s));
    SatResult {
        holds,
        sat_states,
        elapsed_ns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl;
    use crate::kripke;

    fn single_p() -> KripkeStructure {
        kripke::parse("states 1; init 0; props p; trans 0->0; label 0: p;").unwrap()
    }

    fn chain() -> KripkeStructure {
        kripke::parse("states 2; init 0; props p q; trans 0->1 1->1; label 0: p; label 1: q;")
            .unwrap()
    }

    fn sat_ids(k: &KripkeStructure, f: &str) -> Vec<usize> {
        label_states(k, &ctl::parse(f).unwrap()).iter().collect()
    }

    #[test]
    fn single_state_ag() {
        assert_eq!(sat_ids(&single_p(), "AG p"), vec![0]);
    }

    #[test]
    fn single_state_ex_not() {
        assert_eq!(sat_ids(&single_p(), "EX ! p"), Vec::<usize>::new());
    }

    #[test]
    fn chain_until() {
        assert_eq!(sat_ids(&chain(), "E [ p U q ]"), vec![0, 1]);
    }

    #[test]
    fn chain_all_until() {
        let r = check(&chain(), &ctl::parse("A [ p U q ]").unwrap());
        assert!(r.holds);
    }

    #[test]
    fn verdicts() {
        let k = single_p();
        assert!(check(&k, &ctl::parse("AG p").unwrap()).holds);
        assert!(!check(&k, &ctl::parse("AF ! p").unwrap()).holds);
    }

    #[test]
    fn unknown_atom_false_everywhere() {
        let k = single_p();
        assert_eq!(sat_ids(&k, "zzz"), Vec::<usize>::new());
        assert_eq!(sat_ids(&k, "! zzz"), vec![0]);
    }

    #[test]
    fn eg_true_everywhere_on_total_structure() {
        let k = kripke::generate(&kripke::GenConfig {
            n_states: 7,
            n_props: 2,
            edge_prob: 0.3,
            label_prob: 0.5,
            rng_seed: 11,
        })
        .unwrap();
        assert_eq!(sat_ids(&k, "EG true").len(), 7);
    }

    #[test]
    fn verdict_requires_all_initial_states() {
        let k = kripke::parse(
            "states 2; init 0,1; props p; trans 0->0 1->1; label 0: p; label 1:;",
        )
        .unwrap();
        // p holds at state 0 only, so the structure does not satisfy p
        assert!(!check(&k, &ctl::parse("p").unwrap()).holds);
        assert!(check(&k, &ctl::parse("p | ! p").unwrap()).holds);
    }
}
