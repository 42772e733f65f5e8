//! Deterministic vertex names.
//!
//! Every vertex produced anywhere in the crate carries a [`VertexName`]. Names
//! are totally ordered so that seed vertices come first and witness vertices of
//! each stage form a contiguous block, in schedule order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ForgeError;

/// Name of a vertex.
///
/// Textual forms: `s3` for a seed, `w2.15` for the 16th witness of stage 2,
/// and `g:label.index[parent,...]` for a gadget vertex built over parents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VertexName {
    Seed(u32),
    Witness { stage: u32, index: u64 },
    Gadget { parents: Vec<VertexName>, label: String, index: u32 },
}

impl VertexName {
    pub fn seed(i: u32) -> Self {
        VertexName::Seed(i)
    }

    pub fn witness(stage: u32, index: u64) -> Self {
        VertexName::Witness { stage, index }
    }

    /// A parentless gadget vertex. Panics on a label that could not round-trip.
    pub fn gadget(label: &str, index: u32) -> Self {
        Self::gadget_over(label, index, Vec::new())
    }

    pub fn gadget_over(label: &str, index: u32, parents: Vec<VertexName>) -> Self {
        assert!(valid_label(label), "invalid gadget label {label:?}");
        VertexName::Gadget { parents, label: label.to_string(), index }
    }

    /// Stage at which the name is introduced: 0 for seeds, the stage for
    /// witnesses, and the largest parent stage for gadgets.
    pub fn stage_rank(&self) -> u32 {
        match self {
            VertexName::Seed(_) => 0,
            VertexName::Witness { stage, .. } => *stage,
            VertexName::Gadget { parents, .. } => {
                parents.iter().map(VertexName::stage_rank).max().unwrap_or(0)
            }
        }
    }

    pub fn as_witness(&self) -> Option<(u32, u64)> {
        match self {
            VertexName::Witness { stage, index } => Some((*stage, *index)),
            _ => None,
        }
    }

    fn tag(&self) -> u8 {
        match self {
            VertexName::Seed(_) => 0,
            VertexName::Witness { .. } => 1,
            VertexName::Gadget { .. } => 2,
        }
    }
}

fn valid_label(label: &str) -> bool {
    !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ord for VertexName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.stage_rank()
            .cmp(&other.stage_rank())
            .then(self.tag().cmp(&other.tag()))
            .then_with(|| match (self, other) {
                (VertexName::Seed(a), VertexName::Seed(b)) => a.cmp(b),
                (
                    VertexName::Witness { stage: s, index: i },
                    VertexName::Witness { stage: t, index: j },
                ) => s.cmp(t).then(i.cmp(j)),
                (
                    VertexName::Gadget { parents: p, label: l, index: i },
                    VertexName::Gadget { parents: q, label: m, index: j },
                ) => l.cmp(m).then(i.cmp(j)).then_with(|| p.cmp(q)),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for VertexName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexName::Seed(i) => write!(f, "s{i}"),
            VertexName::Witness { stage, index } => write!(f, "w{stage}.{index}"),
            VertexName::Gadget { parents, label, index } => {
                write!(f, "g:{label}.{index}")?;
                if !parents.is_empty() {
                    f.write_str("[")?;
                    for (k, p) in parents.iter().enumerate() {
                        if k > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{p}")?;
                    }
                    f.write_str("]")?;
                }
                Ok(())
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self) -> ForgeError {
        ForgeError::ParseName(self.src.to_string())
    }

    fn eat(&mut self, c: u8) -> Result<(), ForgeError> {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err())
        }
    }

    fn number<T: FromStr>(&mut self) -> Result<T, ForgeError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err());
        }
        self.src[start..self.pos].parse().map_err(|_| self.err())
    }

    fn name(&mut self) -> Result<VertexName, ForgeError> {
        match self.s.get(self.pos) {
            Some(b's') => {
                self.pos += 1;
                Ok(VertexName::Seed(self.number()?))
            }
            Some(b'w') => {
                self.pos += 1;
                let stage = self.number()?;
                self.eat(b'.')?;
                Ok(VertexName::Witness { stage, index: self.number()? })
            }
            Some(b'g') => {
                self.pos += 1;
                self.eat(b':')?;
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos] != b'.' {
                    self.pos += 1;
                }
                let label = &self.src[start..self.pos];
                if !valid_label(label) {
                    return Err(self.err());
                }
                self.eat(b'.')?;
                let index = self.number()?;
                let mut parents = Vec::new();
                if self.s.get(self.pos) == Some(&b'[') {
                    self.pos += 1;
                    loop {
                        parents.push(self.name()?);
                        match self.s.get(self.pos) {
                            Some(b',') => self.pos += 1,
                            Some(b']') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.err()),
                        }
                    }
                }
                Ok(VertexName::Gadget { parents, label: label.to_string(), index })
            }
            _ => Err(self.err()),
        }
    }
}

impl FromStr for VertexName {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { s: s.as_bytes(), pos: 0, src: s };
        let name = p.name()?;
        if p.pos != s.len() {
            return Err(p.err());
        }
        Ok(name)
    }
}

impl Serialize for VertexName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VertexName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_forms() {
        assert_eq!(VertexName::seed(3).to_string(), "s3");
        assert_eq!(VertexName::witness(2, 15).to_string(), "w2.15");
        let g = VertexName::gadget_over("x", 0, vec![VertexName::seed(0), VertexName::seed(1)]);
        assert_eq!(g.to_string(), "g:x.0[s0,s1]");
        assert_eq!(VertexName::gadget("l", 4).to_string(), "g:l.4");
    }

    #[test]
    fn ordering_puts_stages_in_blocks() {
        let mut v = vec![
            VertexName::witness(2, 0),
            VertexName::gadget("l", 1),
            VertexName::witness(1, 5),
            VertexName::seed(7),
            VertexName::gadget_over("b", 0, vec![VertexName::witness(1, 0)]),
        ];
        v.sort();
        let shown: Vec<String> = v.iter().map(|n| n.to_string()).collect();
        assert_eq!(shown, ["s7", "g:l.1", "w1.5", "g:b.0[w1.0]", "w2.0"]);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "s", "w1", "w1.", "g:.0", "g:x", "g:x.0[", "g:x.0[s1", "s1x", "q1"] {
            assert!(bad.parse::<VertexName>().is_err(), "{bad}");
        }
    }

    fn arb_name() -> impl Strategy<Value = VertexName> {
        let leaf = prop_oneof![
            (0u32..50).prop_map(VertexName::Seed),
            (1u32..5, 0u64..1000).prop_map(|(s, i)| VertexName::witness(s, i)),
            ("[a-zA-Z_][a-zA-Z0-9_]{0,3}", 0u32..9).prop_map(|(l, i)| VertexName::gadget(&l, i)),
        ];
        leaf.prop_recursive(3, 12, 3, |inner| {
            ("[a-z]{1,2}", 0u32..9, prop::collection::vec(inner, 0..3))
                .prop_map(|(l, i, p)| VertexName::gadget_over(&l, i, p))
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(n in arb_name()) {
            let back: VertexName = n.to_string().parse().unwrap();
            prop_assert_eq!(back, n);
        }

        #[test]
        fn order_is_consistent_with_eq(a in arb_name(), b in arb_name()) {
            prop_assert_eq!(a.cmp(&b) == Ordering::Equal, a == b);
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        }
    }
}
