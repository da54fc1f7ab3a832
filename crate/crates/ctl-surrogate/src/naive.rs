//! Brute-force CTL oracle for cross-validating the fixpoint checker.
//!
//! Works by direct path enumeration on small structures and shares no set
//! or fixpoint code with the labeling implementation. Derived connectives
//! are expanded syntactically before evaluation, so both implementations
//! agree on the same primitive semantics (EX, EU, EG) through entirely
//! different machinery.

use thiserror::Error;

use crate::ctl::CtlFormula;
use crate::kripke::KripkeStructure;

pub const MAX_STATES: usize = 8;
pub const MAX_DEPTH: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle supports at most {MAX_STATES} states, got {0}")]
    TooManyStates(usize),
    #[error("oracle supports formula depth at most {MAX_DEPTH}, got {0}")]
    TooDeep(usize),
    #[error("state id {0} out of range")]
    BadState(usize),
}

/// Core fragment after syntactic expansion, flattened into an arena.
enum Core {
    True,
    False,
    Atom(Option<usize>),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Ex(usize),
    Eu(usize, usize),
    Eg(usize),
}

struct Arena {
    nodes: Vec<Core>,
}

impl Arena {
    fn push(&mut self, node: Core) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn expand(&mut self, phi: &CtlFormula, k: &KripkeStructure) -> usize {
        use CtlFormula::*;
        match phi {
            True => self.push(Core::True),
            False => self.push(Core::False),
            Atom(name) => {
                let idx = k.prop_index(name);
                self.push(Core::Atom(idx))
            }
            Not(a) => {
                let a = self.expand(a, k);
                self.push(Core::Not(a))
            }
            And(a, b) => {
                let a = self.expand(a, k);
                let b = self.expand(b, k);
                self.push(Core::And(a, b))
            }
            Or(a, b) => {
                let a = self.expand(a, k);
                let b = self.expand(b, k);
                self.push(Core::Or(a, b))
            }
            Implies(a, b) => {
                let a = self.expand(a, k);
                let na = self.push(Core::Not(a));
                let b = self.expand(b, k);
                self.push(Core::Or(na, b))
            }
            EX(a) => {
                let a = self.expand(a, k);
                self.push(Core::Ex(a))
            }
            EU(a, b) => {
                let a = self.expand(a, k);
                let b = self.expand(b, k);
                self.push(Core::Eu(a, b))
            }
            EG(a) => {
                let a = self.expand(a, k);
                self.push(Core::Eg(a))
            }
            EF(a) => {
                let t = self.push(Core::True);
                let a = self.expand(a, k);
                self.push(Core::Eu(t, a))
            }
            AX(a) => {
                let a = self.expand(a, k);
                let na = self.push(Core::Not(a));
                let ex = self.push(Core::Ex(na));
                self.push(Core::Not(ex))
            }
            AF(a) => {
                let a = self.expand(a, k);
                let na = self.push(Core::Not(a));
                let eg = self.push(Core::Eg(na));
                self.push(Core::Not(eg))
            }
            AG(a) => {
                let t = self.push(Core::True);
                let a = self.expand(a, k);
                let na = self.push(Core::Not(a));
                let ef = self.push(Core::Eu(t, na));
                self.push(Core::Not(ef))
            }
            // A[a U b] = !( E[!b U (!a & !b)] | EG !b )
            AU(a, b) => {
                let a = self.expand(a, k);
                let b = self.expand(b, k);
                let na = self.push(Core::Not(a));
                let nb = self.push(Core::Not(b));
                let both = self.push(Core::And(na, nb));
                let eu = self.push(Core::Eu(nb, both));
                let eg = self.push(Core::Eg(nb));
                let bad = self.push(Core::Or(eu, eg));
                self.push(Core::Not(bad))
            }
        }
    }
}

struct Evaluator<'a> {
    k: &'a KripkeStructure,
    arena: Arena,
    succ: Vec<Vec<usize>>,
    memo: Vec<Vec<Option<bool>>>,
}

impl<'a> Evaluator<'a> {
    fn eval(&mut self, node: usize, state: usize) -> bool {
        if let Some(v) = self.memo[node][state] {
            return v;
        }
        let v = match self.arena.nodes[node] {
            Core::True => true,
            Core::False => false,
            Core::Atom(None) => false,
            Core::Atom(Some(p)) => self.k.has_prop(state, p),
            Core::Not(a) => !self.eval(a, state),
            Core::And(a, b) => self.eval(a, state) && self.eval(b, state),
            Core::Or(a, b) => self.eval(a, state) || self.eval(b, state),
            Core::Ex(a) => {
                let succ = self.succ[state].clone();
                succ.into_iter().any(|t| self.eval(a, t))
            }
            Core::Eu(a, b) => self.search_until(a, b, state, 0),
            Core::Eg(a) => {
                let mut visited = Vec::new();
                self.search_lasso(a, state, &mut visited)
            }
        };
        self.memo[node][state] = Some(v);
        v
    }

    /// Enumerates paths of at most n_states steps looking for a b-state
    /// reached through a-states.
    fn search_until(&mut self, a: usize, b: usize, state: usize, steps: usize) -> bool {
        if self.eval(b, state) {
            return true;
        }
        if !self.eval(a, state) || steps >= self.k.n_states() {
            return false;
        }
        let succ = self.succ[state].clone();
        succ.into_iter()
            .any(|t| self.search_until(a, b, t, steps + 1))
    }

    /// Looks for a lasso (path closing a cycle) lying entirely in a-states.
    fn search_lasso(&mut self, a: usize, state: usize, visited: &mut Vec<usize>) -> bool {
        if !self.eval(a, state) {
            return false;
        }
        if visited.contains(&state) {
            return true;
        }
        visited.push(state);
        let succ = self.succ[state].clone();
        for t in succ {
            if self.search_lasso(a, t, visited) {
                visited.pop();
                return true;
            }
        }
        visited.pop();
        false
    }
}

/// Decides K, state |= phi by bounded path enumeration.
pub fn check_naive(
    k: &KripkeStructure,
    phi: &CtlFormula,
    state: usize,
) -> Result<bool, OracleError> {
    if k.n_states() > MAX_STATES {
        return Err(OracleError::TooManyStates(k.n_states()));
    }
    let depth = phi.depth();
    if depth > MAX_DEPTH {
        return Err(OracleError::TooDeep(depth));
    }
    if state >= k.n_states() {
        return Err(OracleError::BadState(state));
    }
    let mut arena = Arena { nodes: Vec::new() };
    let root = arena.expand(phi, k);
    let n_nodes = arena.nodes.len();
    let mut ev = Evaluator {
        k,
        arena,
        succ: k.successors(),
        memo: vec![vec![None; k.n_states()]; n_nodes],
    };
    Ok(ev.eval(root, state))
}
