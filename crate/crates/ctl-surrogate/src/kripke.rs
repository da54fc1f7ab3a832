//! Finite Kripke structures: representation, seeded random generation,
//! text format parse/serialize, and SMV export.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ctl::CtlFormula;
use crate::rng::Rng;

#[derive(Debug, Error, PartialEq)]
pub enum KripkeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("state {0} has no outgoing transition")]
    NonTotal(usize),
    #[error("state id {id} out of range for {n} states")]
    StateOutOfRange { id: usize, n: usize },
    #[error("initial state set is empty")]
    EmptyInitial,
    #[error("no states")]
    NoStates,
    #[error("proposition list is empty or contains duplicates")]
    BadProps,
    #[error("proposition name `{0}` is not a lowercase identifier")]
    BadPropName(String),
    #[error("unknown proposition `{0}` in label clause")]
    UnknownProp(String),
    #[error("state {0} has no label clause")]
    MissingLabel(usize),
    #[error("state {0} has more than one label clause")]
    DuplicateLabel(usize),
    #[error("invalid generator config: {0}")]
    Config(String),
}

/// Total transition system with labeled states and a non-empty initial set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    n_states: usize,
    initial: BTreeSet<usize>,
    transitions: BTreeSet<(usize, usize)>,
    props: Vec<String>,
    /// One prop-index set per state.
    labeling: Vec<BTreeSet<usize>>,
}

fn is_lower_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl KripkeStructure {
    pub fn new(
        n_states: usize,
        initial: BTreeSet<usize>,
        transitions: BTreeSet<(usize, usize)>,
        props: Vec<String>,
        labeling: Vec<BTreeSet<usize>>,
    ) -> Result<Self, KripkeError> {
        if n_states == 0 {
            return Err(KripkeError::NoStates);
        }
        if initial.is_empty() {
            return Err(KripkeError::EmptyInitial);
        }
        if props.is_empty() || props.iter().collect::<BTreeSet<_>>().len() != props.len() {
            return Err(KripkeError::BadProps);
        }
        if let Some(p) = props.iter().find(|p| !is_lower_ident(p)) {
            return Err(KripkeError::BadPropName(p.clone()));
        }
        let check_id = |id: usize| {
            if id < n_states {
                Ok(())
            } else {
                Err(KripkeError::StateOutOfRange { id, n: n_states })
            }
        };
        for &id in &initial {
            check_id(id)?;
        }
        for &(s, t) in &transitions {
            check_id(s)?;
            check_id(t)?;
        }
        if labeling.len() != n_states {
            let missing = labeling.len().min(n_states);
            return Err(KripkeError::MissingLabel(missing));
        }
        for set in &labeling {
            if let Some(&p) = set.iter().find(|&&p| p >= props.len()) {
                return Err(KripkeError::UnknownProp(format!("#{p}")));
            }
        }
        for s in 0..n_states {
            if !transitions.iter().any(|&(a, _)| a == s) {
                return Err(KripkeError::NonTotal(s));
            }
        }
        Ok(KripkeStructure {
            n_states,
            initial,
            transitions,
            props,
            labeling,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn transitions(&self) -> &BTreeSet<(usize, usize)> {
        &self.transitions
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    pub fn label(&self, state: usize) -> &BTreeSet<usize> {
        &self.labeling[state]
    }

    pub fn has_prop(&self, state: usize, prop: usize) -> bool {
        self.labeling[state].contains(&prop)
    }

    /// Successor lists indexed by state.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.n_states];
        for &(s, t) in &self.transitions {
            succ[s].push(t);
        }
        succ
    }
}

/// Parameters for the random structure generator.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenConfig {
    pub n_states: usize,
    pub n_props: usize,
    pub edge_prob: f64,
    pub label_prob: f64,
    pub rng_seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), KripkeError> {
        if self.n_states == 0 {
            return Err(KripkeError::Config("n_states must be >= 1".into()));
        }
        if self.n_props == 0 {
            return Err(KripkeError::Config("n_props must be >= 1".into()));
        }
        if !(self.edge_prob > 0.0 && self.edge_prob <= 1.0) {
            return Err(KripkeError::Config(format!(
                "edge_prob must be in (0, 1], got {}",
                self.edge_prob
            )));
        }
        if !(0.0..=1.0).contains(&self.label_prob) {
            return Err(KripkeError::Config(format!(
                "label_prob must be in [0, 1], got {}",
                self.label_prob
            )));
        }
        Ok(())
    }
}

/// Draws a random structure. Each ordered pair (s, t) becomes a transition
/// with probability `edge_prob`; a state left without successors gets a
/// self-loop. Initial set is always {0}; props are named p0..p(k-1).
pub fn generate(cfg: &GenConfig) -> Result<KripkeStructure, KripkeError> {
    cfg.validate()?;
    let mut rng = Rng::new(cfg.rng_seed);
    let mut transitions = BTreeSet::new();
    for s in 0..cfg.n_states {
        let mut any = false;
        for t in 0..cfg.n_states {
            if rng.next_f64() < cfg.edge_prob {
                transitions.insert((s, t));
                any = true;
            }
        }
        if !any {
            transitions.insert((s, s));
        }
    }
    let mut labeling = Vec::with_capacity(cfg.n_states);
    for _ in 0..cfg.n_states {
        let mut set = BTreeSet::new();
        for p in 0..cfg.n_props {
            if rng.next_f64() < cfg.label_prob {
                set.insert(p);
            }
        }
        labeling.push(set);
    }
    let props = (0..cfg.n_props).map(|i| format!("p{i}")).collect();
    KripkeStructure::new(
        cfg.n_states,
        BTreeSet::from([0]),
        transitions,
        props,
        labeling,
    )
}

/// Canonical text form: sections in fixed order, states ascending,
/// transitions lexicographic, one label clause per state.
pub fn serialize(k: &KripkeStructure) -> String {
    let mut out = String::new();
    write!(out, "states {};", k.n_states).unwrap();
    let init: Vec<String> = k.initial.iter().map(|s| s.to_string()).collect();
    write!(out, " init {};", init.join(",")).unwrap();
    write!(out, " props {};", k.props.join(" ")).unwrap();
    let trans: Vec<String> = k
        .transitions
        .iter()
        .map(|(s, t)| format!("{s}->{t}"))
        .collect();
    write!(out, " trans {};", trans.join(" ")).unwrap();
    for s in 0..k.n_states {
        let names: Vec<&str> = k.labeling[s].iter().map(|&p| k.props[p].as_str()).collect();
        if names.is_empty() {
            write!(out, " label {s}:;").unwrap();
        } else {
            write!(out, " label {s}: {};", names.join(" ")).unwrap();
        }
    }
    out
}

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> KripkeError {
        KripkeError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), KripkeError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{lit}`")))
        }
    }

    fn number(&mut self) -> Result<usize, KripkeError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn ident(&mut self) -> Result<String, KripkeError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len()
            && (self.text[self.pos].is_ascii_lowercase()
                || self.text[self.pos].is_ascii_digit()
                || self.text[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start || !self.text[start].is_ascii_lowercase() {
            return Err(self.err("expected a lowercase identifier"));
        }
        Ok(String::from_utf8(self.text[start..self.pos].to_vec()).unwrap())
    }

    fn at_ident(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_lowercase())
    }

    fn at_digit(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit())
    }
}

/// Parses the text format produced by [`serialize`]. Whitespace between
/// tokens is free-form; section order is fixed.
pub fn parse(text: &str) -> Result<KripkeStructure, KripkeError> {
    let mut c = Cursor::new(text);
    c.expect("states")?;
    let n_states = c.number()?;
    c.expect(";")?;

    c.expect("init")?;
    let mut initial = BTreeSet::new();
    initial.insert(c.number()?);
    while c.peek() == Some(b',') {
        c.expect(",")?;
        initial.insert(c.number()?);
    }
    c.expect(";")?;

    c.expect("props")?;
    let mut props = Vec::new();
    props.push(c.ident()?);
    while c.at_ident() {
        // `label` cannot start a prop here: props end at `;`
        props.push(c.ident()?);
    }
    c.expect(";")?;

    c.expect("trans")?;
    let mut transitions = BTreeSet::new();
    loop {
        let s = c.number()?;
        c.expect("->")?;
        let t = c.number()?;
        transitions.insert((s, t));
        if !c.at_digit() {
            break;
        }
    }
    c.expect(";")?;

    let mut labeling: Vec<Option<BTreeSet<usize>>> = vec![None; n_states.max(1)];
    while c.peek().is_some() {
        c.expect("label")?;
        let s = c.number()?;
        c.expect(":")?;
        let mut set = BTreeSet::new();
        while c.at_ident() {
            let name = c.ident()?;
            let idx = props
                .iter()
                .position(|p| *p == name)
                .ok_or(KripkeError::UnknownProp(name))?;
            set.insert(idx);
        }
        c.expect(";")?;
        if s >= n_states {
            return Err(KripkeError::StateOutOfRange { id: s, n: n_states });
        }
        if labeling[s].is_some() {
            return Err(KripkeError::DuplicateLabel(s));
        }
        labeling[s] = Some(set);
    }
    let mut label_sets = Vec::with_capacity(n_states);
    for (s, entry) in labeling.into_iter().enumerate() {
        label_sets.push(entry.ok_or(KripkeError::MissingLabel(s))?);
    }
    KripkeStructure::new(n_states, initial, transitions, props, label_sets)
}

/// Renders an SMV module: a single `state` variable, an init assignment,
/// the transition relation as a TRANS disjunction, one DEFINE per prop,
/// and the property as a CTLSPEC.
pub fn export_smv(k: &KripkeStructure, phi: &CtlFormula) -> String {
    let mut out = String::new();
    out.push_str("MODULE main\n");
    writeln!(out, "VAR\n  state : 0..{};", k.n_states - 1).unwrap();
    out.push_str("ASSIGN\n");
    if k.initial.len() == 1 {
        writeln!(out, "  init(state) := {};", k.initial.iter().next().unwrap()).unwrap();
    } else {
        let ids: Vec<String> = k.initial.iter().map(|s| s.to_string()).collect();
        writeln!(out, "  init(state) := {{{}}};", ids.join(", ")).unwrap();
    }
    out.push_str("TRANS\n  ");
    let clauses: Vec<String> = k
        .transitions
        .iter()
        .map(|(s, t)| format!("(state = {s} & next(state) = {t})"))
        .collect();
    out.push_str(&clauses.join("\n  | "));
    out.push_str(";\n");
    out.push_str("DEFINE\n");
    for (p, name) in k.props.iter().enumerate() {
        let states: Vec<String> = (0..k.n_states)
            .filter(|&s| k.has_prop(s, p))
            .map(|s| format!("state = {s}"))
            .collect();
        if states.is_empty() {
            writeln!(out, "  {name} := FALSE;").unwrap();
        } else {
            writeln!(out, "  {name} := {};", states.join(" | ")).unwrap();
        }
    }
    writeln!(out, "CTLSPEC {}", smv_formula(phi)).unwrap();
    out
}

fn smv_formula(phi: &CtlFormula) -> String {
    use CtlFormula::*;
    match phi {
        True => "TRUE".into(),
        False => "FALSE".into(),
        Atom(name) => name.clone(),
        Not(a) => format!("!({})", smv_formula(a)),
        And(a, b) => format!("({}) & ({})", smv_formula(a), smv_formula(b)),
        Or(a, b) => format!("({}) | ({})", smv_formula(a), smv_formula(b)),
        Implies(a, b) => format!("({}) -> ({})", smv_formula(a), smv_formula(b)),
        EX(a) => format!("EX ({})", smv_formula(a)),
        EF(a) => format!("EF ({})", smv_formula(a)),
        EG(a) => format!("EG ({})", smv_formula(a)),
        AX(a) => format!("AX ({})", smv_formula(a)),
        AF(a) => format!("AF ({})", smv_formula(a)),
        AG(a) => format!("AG ({})", smv_formula(a)),
        EU(a, b) => format!("E [ ({}) U ({}) ]", smv_formula(a), smv_formula(b)),
        AU(a, b) => format!("A [ ({}) U ({}) ]", smv_formula(a), smv_formula(b)),
    }
}
