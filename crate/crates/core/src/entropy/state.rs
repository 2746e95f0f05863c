use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A coarse-grained state: a finite binary string with an optional label.
///
/// Equality, ordering and hashing use the bits only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct CoarseState {
    bits: Vec<u8>,
    label: Option<String>,
}

/// Serialized as a plain bit string, or as `{"bits": ..., "label": ...}` when labeled.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawState {
    Bits(String),
    Labeled {
        bits: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

impl TryFrom<RawState> for CoarseState {
    type Error = Error;
    fn try_from(raw: RawState) -> Result<Self> {
        match raw {
            RawState::Bits(bits) => CoarseState::parse(&bits),
            RawState::Labeled { bits, label } => {
                let mut s = CoarseState::parse(&bits)?;
                s.label = label;
                Ok(s)
            }
        }
    }
}

impl From<CoarseState> for RawState {
    fn from(s: CoarseState) -> Self {
        let bits = s.to_string();
        match s.label {
            None => RawState::Bits(bits),
            label => RawState::Labeled { bits, label },
        }
    }
}

/// Reads a corpus of newline-delimited `'0'`/`'1'` strings. Blank lines and
/// lines starting with `#` are skipped; errors carry the 1-based line number.
pub fn parse_corpus(text: &str) -> Result<Vec<CoarseState>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(n, line)| {
            CoarseState::parse(line).map_err(|_| Error::invalid(format!("corpus line {n}"), format!("`{line}` is not a binary string")))
        })
        .collect()
}

impl CoarseState {
    /// Parses an ASCII `'0'`/`'1'` string.
    pub fn parse(bits: &str) -> Result<Self> {
        let bits = bits
            .bytes()
            .map(|b| match b {
                b'0' => Ok(0u8),
                b'1' => Ok(1u8),
                _ => Err(Error::invalid(
                    "bits",
                    format!("expected only '0'/'1', got {:?}", bits),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoarseState { bits, label: None })
    }

    /// Panics if any element is not 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        CoarseState { bits, label: None }
    }

    pub fn empty() -> Self {
        CoarseState {
            bits: Vec::new(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn concat(&self, other: &CoarseState) -> CoarseState {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        CoarseState { bits, label: None }
    }
}

impl fmt::Display for CoarseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl PartialEq for CoarseState {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl Eq for CoarseState {}

impl Hash for CoarseState {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl PartialOrd for CoarseState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex: shorter strings first, then lexicographic.
impl Ord for CoarseState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

/// A positive, not necessarily normalized, weighting of a finite state set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateMeasure {
    weights: BTreeMap<CoarseState, f64>,
}

impl StateMeasure {
    pub fn new(pairs: impl IntoIterator<Item = (CoarseState, f64)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (state, w) in pairs {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(
                    "measure",
                    format!("weight of `{state}` must be finite and > 0, got {w}"),
                ));
            }
            if weights.insert(state.clone(), w).is_some() {
                return Err(Error::invalid("measure", format!("state `{state}` listed twice")));
            }
        }
        Ok(StateMeasure { weights })
    }

    /// Every state gets weight `1 / len`.
    pub fn uniform(states: impl IntoIterator<Item = CoarseState>) -> Result<Self> {
        let states: Vec<CoarseState> = states.into_iter().collect();
        let w = 1.0 / states.len() as f64;
        StateMeasure::new(states.into_iter().map(|s| (s, w)))
    }

    pub fn weight(&self, x: &CoarseState) -> Result<f64> {
        self.weights
            .get(x)
            .copied()
            .ok_or_else(|| Error::NotInDomain(x.to_string()))
    }

    pub fn contains(&self, x: &CoarseState) -> bool {
        self.weights.contains_key(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &CoarseState> {
        self.weights.keys()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s = CoarseState::parse("0110").unwrap();
        assert_eq!(s.bits(), &[0, 1, 1, 0]);
        assert_eq!(s.to_string(), "0110");
        assert!(CoarseState::parse("01a").is_err());
        assert!(CoarseState::parse("").unwrap().is_empty());
    }

    #[test]
    fn label_is_ignored_by_equality() {
        let a = CoarseState::parse("01").unwrap().with_label("a");
        let b = CoarseState::parse("01").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn serde_shape() {
        let s = CoarseState::parse("101").unwrap().with_label("x");
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"bits":"101","label":"x"}"#);
        let back: CoarseState = serde_json::from_str(&j).unwrap();
        assert_eq!(back.label(), Some("x"));
        assert!(serde_json::from_str::<CoarseState>(r#"{"bits":"12"}"#).is_err());
        let plain = CoarseState::parse("0110").unwrap();
        assert_eq!(serde_json::to_string(&plain).unwrap(), r#""0110""#);
        assert_eq!(serde_json::from_str::<CoarseState>(r#""0110""#).unwrap(), plain);
        assert!(serde_json::from_str::<CoarseState>(r#""01x""#).is_err());
    }

    #[test]
    fn corpus_lines() {
        let c = parse_corpus("# header\n0101\n\n  111  \n0\n").unwrap();
        let bits: Vec<String> = c.iter().map(|s| s.to_string()).collect();
        assert_eq!(bits, ["0101", "111", "0"]);
        let err = parse_corpus("01\n0a1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn measure_rejects_non_positive() {
        let x = CoarseState::parse("0").unwrap();
        assert!(StateMeasure::new([(x.clone(), 0.0)]).is_err());
        assert!(StateMeasure::new([(x.clone(), 1.0), (x.clone(), 2.0)]).is_err());
        let m = StateMeasure::new([(x.clone(), 3.0)]).unwrap();
        assert_eq!(m.weight(&x).unwrap(), 3.0);
        assert!(matches!(m.weight(&CoarseState::empty()), Err(Error::NotInDomain(_))));
    }
}
