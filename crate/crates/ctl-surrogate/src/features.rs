//! Feature encoding: a (structure, formula) pair becomes a fixed-length
//! numeric vector, and encoded pairs plus the exact verdict become dataset
//! records.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::checker::SatResult;
use crate::ctl::CtlFormula;
use crate::kripke::KripkeStructure;

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    #[error("structure has {got} states, cap is {cap}")]
    TooManyStates { got: usize, cap: usize },
    #[error("structure has {got} props, cap is {cap}")]
    TooManyProps { got: usize, cap: usize },
    #[error("formula length {got} exceeds cap {cap}")]
    FormulaTooLong { got: usize, cap: usize },
    #[error("atom `{0}` is not of the form p<i> with i below the prop cap")]
    BadAtom(String),
    #[error("dataset format error at line {line}: {msg}")]
    Dataset { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for EncodeError {
    fn from(e: std::io::Error) -> Self {
        EncodeError::Io(e.to_string())
    }
}

/// Caps fixing the feature dimension of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EncodingConfig {
    pub max_states: usize,
    pub max_props: usize,
    pub max_formula_len: usize,
}

impl EncodingConfig {
    /// Caps used by the headline experiment: d = 100 + 40 + 10 + 500 = 650.
    pub fn standard() -> Self {
        EncodingConfig {
            max_states: 10,
            max_props: 4,
            max_formula_len: 500,
        }
    }

    pub fn dim(&self) -> usize {
        self.max_states * self.max_states
            + self.max_states * self.max_props
            + self.max_states
            + self.max_formula_len
    }
}

/// One labeled training example.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub features: Vec<f64>,
    pub label: bool,
    pub check_time_ns: u64,
}

/// Adjacency matrix, labeling bitmap, and initial bitmap, each padded to
/// the configured caps.
pub fn encode_kripke(k: &KripkeStructure, cfg: &EncodingConfig) -> Result<Vec<f64>, EncodeError> {
    let n = k.n_states();
    if n > cfg.max_states {
        return Err(EncodeError::TooManyStates {
            got: n,
            cap: cfg.max_states,
        });
    }
    if k.props().len() > cfg.max_props {
        return Err(EncodeError::TooManyProps {
            got: k.props().len(),
            cap: cfg.max_props,
        });
    }
    let mut v = vec![0.0; cfg.max_states * cfg.max_states + cfg.max_states * cfg.max_props + cfg.max_states];
    for &(s, t) in k.transitions() {
        v[s * cfg.max_states + t] = 1.0;
    }
    let label_base = cfg.max_states * cfg.max_states;
    for s in 0..n {
        for &p in k.label(s) {
            v[label_base + s * cfg.max_props + p] = 1.0;
        }
    }
    let init_base = label_base + cfg.max_states * cfg.max_props;
    for &s in k.initial() {
        v[init_base + s] = 1.0;
    }
    Ok(v)
}

/// Token id of one AST node. Atoms must follow the generated p<i> naming.
fn token_id(phi: &CtlFormula, cfg: &EncodingConfig) -> Result<u32, EncodeError> {
    use CtlFormula::*;
    Ok(match phi {
        True => 1,
        False => 2,
        Not(_) => 3,
        And(..) => 4,
        Or(..) => 5,
        Implies(..) => 6,
        EX(_) => 7,
        EF(_) => 8,
        EG(_) => 9,
        AX(_) => 10,
        AF(_) => 11,
        AG(_) => 12,
        EU(..) => 13,
        AU(..) => 14,
        Atom(name) => {
            let idx: usize = name
                .strip_prefix('p')
                .and_then(|s| s.parse().ok())
                .filter(|&i| i < cfg.max_props)
                .ok_or_else(|| EncodeError::BadAtom(name.clone()))?;
            15 + idx as u32
        }
    })
}

/// Pre-order token ids padded with zeros to the formula cap.
pub fn encode_formula(phi: &CtlFormula, cfg: &EncodingConfig) -> Result<Vec<f64>, EncodeError> {
    let len = phi.len();
    if len > cfg.max_formula_len {
        return Err(EncodeError::FormulaTooLong {
            got: len,
            cap: cfg.max_formula_len,
        });
    }
    let mut v = Vec::with_capacity(cfg.max_formula_len);
    preorder(phi, cfg, &mut v)?;
    v.resize(cfg.max_formula_len, 0.0);
    Ok(v)
}

fn preorder(phi: &CtlFormula, cfg: &EncodingConfig, out: &mut Vec<f64>) -> Result<(), EncodeError> {
    use CtlFormula::*;
    out.push(token_id(phi, cfg)? as f64);
    match phi {
        True | False | Atom(_) => {}
        Not(a) | EX(a) | EF(a) | EG(a) | AX(a) | AF(a) | AG(a) => preorder(a, cfg, out)?,
        And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => {
            preorder(a, cfg, out)?;
            preorder(b, cfg, out)?;
        }
    }
    Ok(())
}

pub fn build_record(
    k: &KripkeStructure,
    phi: &CtlFormula,
    cfg: &EncodingConfig,
    oracle_result: &SatResult,
) -> Result<DatasetRecord, EncodeError> {
    let mut features = encode_kripke(k, cfg)?;
    features.extend(encode_formula(phi, cfg)?);
    debug_assert_eq!(features.len(), cfg.dim());
    Ok(DatasetRecord {
        features,
        label: oracle_result.holds,
        check_time_ns: oracle_result.elapsed_ns,
    })
}

/// Writes the line-oriented dataset file: a header comment, then one
/// record per line (features, label as 0/1, check time).
pub fn write_dataset<W: Write>(
    mut w: W,
    records: &[DatasetRecord],
    d: usize,
) -> Result<(), EncodeError> {
    writeln!(w, "# ctl-surrogate dataset v1 d={d}")?;
    for r in records {
        debug_assert_eq!(r.features.len(), d);
        let mut line = String::with_capacity(d * 2 + 16);
        for x in &r.features {
            line.push_str(&x.to_string());
            line.push(',');
        }
        line.push_str(if r.label { "1" } else { "0" });
        line.push(',');
        line.push_str(&r.check_time_ns.to_string());
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_dataset<R: BufRead>(r: R) -> Result<(Vec<DatasetRecord>, usize), EncodeError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or(EncodeError::Dataset {
            line: 1,
            msg: "empty file".into(),
        })??;
    let d: usize = header
        .strip_prefix("# ctl-surrogate dataset v1 d=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or(EncodeError::Dataset {
            line: 1,
            msg: "bad header".into(),
        })?;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 2 {
            return Err(EncodeError::Dataset {
                line: lineno,
                msg: format!("expected {} fields, got {}", d + 2, fields.len()),
            });
        }
        let mut features = Vec::with_capacity(d);
        for f in &fields[..d] {
            features.push(f.parse().map_err(|_| EncodeError::Dataset {
                line: lineno,
                msg: format!("bad feature value `{f}`"),
            })?);
        }
        let label = match fields[d] {
            "0" => false,
            "1" => true,
            other => {
                return Err(EncodeError::Dataset {
                    line: lineno,
                    msg: format!("bad label `{other}`"),
                })
            }
        };
        let check_time_ns = fields[d + 1].parse().map_err(|_| EncodeError::Dataset {
            line: lineno,
            msg: format!("bad time `{}`", fields[d + 1]),
        })?;
        records.push(DatasetRecord {
            features,
            label,
            check_time_ns,
        });
    }
    Ok((records, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctl::{self, CtlFormula};
    use crate::kripke;

    fn single() -> KripkeStructure {
        kripke::parse("states 1; init 0; props p0; trans 0->0; label 0: p0;").unwrap()
    }

    fn small_cfg() -> EncodingConfig {
        EncodingConfig {
            max_states: 2,
            max_props: 1,
            max_formula_len: 4,
        }
    }

    #[test]
    fn encode_single_state() {
        let v = encode_kripke(&single(), &small_cfg()).unwrap();
        // adjacency [1,0,0,0], labels [1,0], initial [1,0]
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn encode_empty_labeling() {
        let k = kripke::parse("states 1; init 0; props p0; trans 0->0; label 0:;").unwrap();
        let v = encode_kripke(&k, &small_cfg()).unwrap();
        assert_eq!(v[4..6], [0.0, 0.0]);
    }

    #[test]
    fn encode_cap_violation() {
        let k = kripke::parse(
            "states 3; init 0; props p0; trans 0->1 1->2 2->0; label 0:; label 1:; label 2:;",
        )
        .unwrap();
        assert_eq!(
            encode_kripke(&k, &small_cfg()),
            Err(EncodeError::TooManyStates { got: 3, cap: 2 })
        );
    }

    #[test]
    fn formula_tokens() {
        let cfg = small_cfg();
        let phi = ctl::parse("EX p0").unwrap();
        assert_eq!(encode_formula(&phi, &cfg).unwrap(), vec![7.0, 15.0, 0.0, 0.0]);
        assert_eq!(
            encode_formula(&CtlFormula::True, &cfg).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn formula_too_long() {
        let cfg = small_cfg();
        let phi = ctl::parse("! ! ! ! p0").unwrap();
        assert_eq!(
            encode_formula(&phi, &cfg),
            Err(EncodeError::FormulaTooLong { got: 5, cap: 4 })
        );
    }

    #[test]
    fn bad_atom_name() {
        let cfg = small_cfg();
        assert!(matches!(
            encode_formula(&CtlFormula::atom("q"), &cfg),
            Err(EncodeError::BadAtom(_))
        ));
        // prop index at or above the cap
        assert!(matches!(
            encode_formula(&CtlFormula::atom("p1"), &cfg),
            Err(EncodeError::BadAtom(_))
        ));
    }

    #[test]
    fn record_dimensions_and_label() {
        let cfg = small_cfg();
        let k = single();
        let res = crate::checker::check(&k, &ctl::parse("AG p0").unwrap());
        let rec = build_record(&k, &ctl::parse("AG p0").unwrap(), &cfg, &res).unwrap();
        assert_eq!(rec.features.len(), cfg.dim());
        assert!(rec.label);
        let res2 = crate::checker::check(&k, &ctl::parse("AF ! p0").unwrap());
        let rec2 = build_record(&k, &ctl::parse("AF ! p0").unwrap(), &cfg, &res2).unwrap();
        assert!(!rec2.label);
    }

    #[test]
    fn dataset_roundtrip() {
        let cfg = small_cfg();
        let rec = DatasetRecord {
            features: vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 7.0, 15.0, 0.0, 0.0],
            label: true,
            check_time_ns: 1234,
        };
        let mut buf = Vec::new();
        write_dataset(&mut buf, &[rec.clone()], cfg.dim()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# ctl-surrogate dataset v1 d=12\n"));
        let (records, d) = read_dataset(&buf[..]).unwrap();
        assert_eq!(d, 12);
        assert_eq!(records, vec![rec]);
    }

    #[test]
    fn injective_on_distinct_structures() {
        let cfg = small_cfg();
        let a = encode_kripke(&single(), &cfg).unwrap();
        let k2 =
            kripke::parse("states 2; init 0; props p0; trans 0->1 1->1; label 0: p0; label 1:;")
                .unwrap();
        let b = encode_kripke(&k2, &cfg).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn decode_tokens_reconstructs_ast() {
        // decoder lives in test code only: token arity table drives a
        // recursive rebuild from the pre-order stream
        fn decode(tokens: &[f64], pos: &mut usize) -> CtlFormula {
            use CtlFormula::*;
            let t = tokens[*pos] as u32;
            *pos += 1;
            match t {
                1 => True,
                2 => False,
                3 => Not(Box::new(decode(tokens, pos))),
                4 => And(Box::new(decode(tokens, pos)), Box::new(decode(tokens, pos))),
                5 => Or(Box::new(decode(tokens, pos)), Box::new(decode(tokens, pos))),
                6 => Implies(Box::new(decode(tokens, pos)), Box::new(decode(tokens, pos))),
                7 => EX(Box::new(decode(tokens, pos))),
                8 => EF(Box::new(decode(tokens, pos))),
                9 => EG(Box::new(decode(tokens, pos))),
                10 => AX(Box::new(decode(tokens, pos))),
                11 => AF(Box::new(decode(tokens, pos))),
                12 => AG(Box::new(decode(tokens, pos))),
                13 => EU(Box::new(decode(tokens, pos)), Box::new(decode(tokens, pos))),
                14 => AU(Box::new(decode(tokens, pos)), Box::new(decode(tokens, pos))),
                t => Atom(format!("p{}", t - 15)),
            }
        }
        let cfg = EncodingConfig {
            max_states: 2,
            max_props: 4,
            max_formula_len: 64,
        };
        let vocab: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
        for seed in 0..50 {
            let phi = ctl::generate(1 + (seed as usize % 40), &vocab, seed).unwrap();
            let tokens = encode_formula(&phi, &cfg).unwrap();
            let mut pos = 0;
            assert_eq!(decode(&tokens, &mut pos), phi);
            assert_eq!(pos, phi.len());
        }
    }
}
