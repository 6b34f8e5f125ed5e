//! Text and JSON forms of a [`PauliSum`].
//!
//! Text: one `<coefficient> <word>` line per term in canonical order, word
//! with qubit 1 leftmost. Blank lines and `#` comments are ignored on input.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::string::PauliString;
use super::sum::PauliSum;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TermRecord {
    string: String,
    coefficient: f64,
}

#[derive(Serialize, Deserialize)]
struct SumRecord {
    n_qubits: usize,
    terms: Vec<TermRecord>,
}

pub fn to_text(h: &PauliSum) -> String {
    let mut out = String::new();
    for (p, c) in h.iter() {
        let _ = writeln!(out, "{c:.16e} {}", p.to_word());
    }
    out
}

pub fn from_text(text: &str) -> Result<PauliSum> {
    let mut terms = Vec::new();
    let mut n = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(c), Some(w), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!("line {}: expected `<coeff> <word>`", i + 1)));
        };
        let c: f64 = c
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        let p = PauliString::from_word(w)?;
        match n {
            None => n = Some(p.n_qubits()),
            Some(k) if k != p.n_qubits() => {
                return Err(Error::Parse(format!("line {}: word length {} != {k}", i + 1, w.len())))
            }
            _ => {}
        }
        terms.push((p, c));
    }
    let n = n.ok_or_else(|| Error::Parse("no terms".into()))?;
    PauliSum::from_terms(n, terms)
}

pub fn to_json(h: &PauliSum) -> Result<String> {
    let rec = SumRecord {
        n_qubits: h.n_qubits(),
        terms: h
            .iter()
            .map(|(p, c)| TermRecord { string: p.to_word(), coefficient: c })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&rec)?)
}

pub fn from_json(s: &str) -> Result<PauliSum> {
    let rec: SumRecord = serde_json::from_str(s)?;
    let terms = rec
        .terms
        .iter()
        .map(|t| PauliString::from_word(&t.string).map(|p| (p, t.coefficient)))
        .collect::<Result<Vec<_>>>()?;
    PauliSum::from_terms(rec.n_qubits, terms)
}

/// Reads either format, choosing JSON when the first non-blank byte is `{`.
pub fn parse_any(s: &str) -> Result<PauliSum> {
    if s.trim_start().starts_with('{') {
        from_json(s)
    } else {
        from_text(s)
    }
}
