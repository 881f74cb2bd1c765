//! Decoding set tuples and the space `Δ` they are drawn from.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::InnerError;
use crate::problem::Problem;
use crate::subset::Subset;

/// One decoding set `D_i` per receiver. Receivers outside the universe of a
/// server group carry the empty set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecodingTuple(pub Vec<Subset>);

impl DecodingTuple {
    pub fn sets(&self) -> &[Subset] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Subset {
        self.0[i]
    }

    /// Valid for `p` within `universe`: `i ∈ D_i ⊆ universe \ A_i` for every
    /// receiver in the universe and `D_i = ∅` outside it.
    pub fn validate(&self, p: &Problem, universe: Subset) -> Result<(), InnerError> {
        if self.0.len() != p.n() {
            return Err(InnerError::InvalidDecodingSet {
                receiver: 0,
                reason: format!("tuple has {} sets, expected {}", self.0.len(), p.n()),
            });
        }
        for (i, d) in self.0.iter().enumerate() {
            let bad = |reason: &str| InnerError::InvalidDecodingSet {
                receiver: i + 1,
                reason: reason.to_string(),
            };
            if !universe.contains(i) {
                if !d.is_empty() {
                    return Err(bad("receiver is outside the group"));
                }
                continue;
            }
            if !d.contains(i) {
                return Err(bad("decoding set must contain the demanded message"));
            }
            if d.intersects(p.side_info(i)) {
                return Err(bad("decoding set overlaps side information"));
            }
            if !d.is_subset_of(universe) {
                return Err(bad("decoding set leaves the message universe"));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DecodingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DecodingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaStrategy {
    /// The entire product `𝒟_1 × ⋯ × 𝒟_n`.
    Full,
    /// Per receiver only `{i}` and `[n] \ A_i`.
    MinimalAndMaximal,
    Custom(Vec<DecodingTuple>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaKind {
    Full,
    MinimalAndMaximal,
    Custom,
    /// Grown from an initial tuple set by pricing; `complete` means no
    /// remaining tuple of the full space could improve the optimum.
    Grown {
        rounds: usize,
        complete: bool,
    },
}

impl fmt::Display for DeltaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaKind::Full => f.write_str("full"),
            DeltaKind::MinimalAndMaximal => f.write_str("minmax"),
            DeltaKind::Custom => f.write_str("custom"),
            DeltaKind::Grown { rounds, complete } => {
                write!(
                    f,
                    "grown({rounds} rounds{})",
                    if *complete { ", complete" } else { "" }
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSpace {
    pub tuples: Vec<DecodingTuple>,
    pub kind: DeltaKind,
}

impl DeltaSpace {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Builds `Δ` for all receivers of `p`.
pub fn decoding_space(p: &Problem, strategy: &DeltaStrategy) -> Result<DeltaSpace, InnerError> {
    decoding_space_within(p, Subset::full(p.n()), strategy)
}

/// Builds `Δ(P)` for a group whose servers hold the messages in `universe`:
/// side information is cut down to `A_i ∩ universe` and only receivers in the
/// universe decode.
pub fn decoding_space_within(
    p: &Problem,
    universe: Subset,
    strategy: &DeltaStrategy,
) -> Result<DeltaSpace, InnerError> {
    match strategy {
        DeltaStrategy::Full => Ok(DeltaSpace {
            tuples: product(&per_receiver_choices(p, universe, false)),
            kind: DeltaKind::Full,
        }),
        DeltaStrategy::MinimalAndMaximal => Ok(DeltaSpace {
            tuples: product(&per_receiver_choices(p, universe, true)),
            kind: DeltaKind::MinimalAndMaximal,
        }),
        DeltaStrategy::Custom(tuples) => {
            let mut seen = HashSet::new();
            for t in tuples {
                t.validate(p, universe)?;
                if !seen.insert(t) {
                    return Err(InnerError::InvalidDecodingSet {
                        receiver: 0,
                        reason: format!("duplicate decoding tuple {t}"),
                    });
                }
            }
            if tuples.is_empty() {
                return Err(InnerError::InvalidDecodingSet {
                    receiver: 0,
                    reason: "custom decoding space is empty".into(),
                });
            }
            Ok(DeltaSpace {
                tuples: tuples.clone(),
                kind: DeltaKind::Custom,
            })
        }
    }
}

/// Reads tuples one per line, sets separated by `;`, members 1-based, e.g.
/// `{1,2}; {2}; {3,4}; {4}`. Braces are optional and `-` or `{}` is the empty
/// set. Blank lines and `#` comments are skipped. Tuples are not validated.
pub fn parse_decoding_tuples(n: usize, text: &str) -> Result<Vec<DecodingTuple>, InnerError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let sets = line
            .split(';')
            .enumerate()
            .map(|(i, field)| {
                let inner = field
                    .trim()
                    .trim_start_matches('{')
                    .trim_end_matches('}')
                    .trim();
                if inner.is_empty() || inner == "-" {
                    return Ok(Subset::EMPTY);
                }
                inner
                    .split(',')
                    .map(|t| match t.trim().parse::<usize>() {
                        Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
                        _ => Err(InnerError::InvalidDecodingSet {
                            receiver: i + 1,
                            reason: format!("bad member {t:?} in line {line:?}"),
                        }),
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map(Subset::from_indices)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if sets.len() != n {
            return Err(InnerError::InvalidDecodingSet {
                receiver: 0,
                reason: format!("line {line:?} has {} sets, expected {n}", sets.len()),
            });
        }
        out.push(DecodingTuple(sets));
    }
    Ok(out)
}

/// `|Δ| = ∏_i 2^(n-1-|A_i|)`.
pub fn full_delta_size(p: &Problem) -> u128 {
    (0..p.n())
        .map(|i| 1u128 << p.interference(i).len())
        .product()
}

fn per_receiver_choices(p: &Problem, universe: Subset, extremes_only: bool) -> Vec<Vec<Subset>> {
    (0..p.n())
        .map(|i| {
            if !universe.contains(i) {
                return vec![Subset::EMPTY];
            }
            let free = universe.difference(p.side_info(i)).without(i);
            if extremes_only {
                let mut v = vec![Subset::singleton(i)];
                if !free.is_empty() {
                    v.push(free.with(i));
                }
                v
            } else {
                free.subsets().map(|s| s.with(i)).collect()
            }
        })
        .collect()
}

/// Cartesian product, first receiver varying slowest.
fn product(choices: &[Vec<Subset>]) -> Vec<DecodingTuple> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for options in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |d| {
                    let mut t = prefix.clone();
                    t.push(*d);
                    t
                })
            })
            .collect();
    }
    out.into_iter().map(DecodingTuple).collect()
}
