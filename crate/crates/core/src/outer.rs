//! Upper bounds on the sum capacity.
//!
//! * [`thm1_polymatroid`]: a polymatroidal LP. For every nonempty message set
//!   `T` a set function `f_T` on subsets of `T` stands in for the entropy of
//!   the server outputs restricted to the servers touching `T`.
//! * [`thm2_sum_bound`]: a combinatorial bound driven by decoding closures,
//!   computed exactly.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::{
    check_condition1, closure, compute_u, compute_v_candidates, inclusion_minimal_v_candidates,
};
use crate::lp::{self, LinearProgram, LpError, SolverOptions, Var};
use crate::problem::{CapacityProfile, Problem};
use crate::subset::{nonempty_subsets, Subset};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OuterError {
    #[error("capacity profile is for n={got}, problem has n={expected}")]
    CapacityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Which subsets of `T` get a capacity ceiling in the polymatroid LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grounding {
    /// Only `f_T(T) ≤ Σ_{J ∩ T ≠ ∅} C_J`.
    #[default]
    Whole,
    /// `f_T(S) ≤ Σ_{J ∩ S ≠ ∅} C_J` for every nonempty `S ⊆ T`.
    PerSubset,
}

/// `Σ_{J ∩ S ≠ ∅} C_J`.
fn touching(caps: &CapacityProfile, s: Subset) -> Rational64 {
    caps.iter()
        .filter(|(j, _)| j.intersects(s))
        .map(|(_, c)| c)
        .sum()
}

fn check_caps(p: &Problem, caps: &CapacityProfile) -> Result<(), OuterError> {
    if caps.n() != p.n() {
        return Err(OuterError::CapacityMismatch {
            expected: p.n(),
            got: caps.n(),
        });
    }
    Ok(())
}

/// The polymatroid LP maximizing `Σ R_i`.
pub fn thm1_program(
    p: &Problem,
    caps: &CapacityProfile,
    grounding: Grounding,
) -> Result<LinearProgram, OuterError> {
    check_caps(p, caps)?;
    let n = p.n();
    let mut lp = LinearProgram::new();
    let rates: Vec<Var> = (0..n)
        .map(|i| lp.add_var(format!("R[{}]", i + 1)))
        .collect();
    for r in &rates {
        lp.set_objective(*r, 1.0);
    }

    for t in nonempty_subsets(n) {
        // f_T(∅) = 0 is implicit: the empty set has no column
        let mut f = std::collections::HashMap::new();
        for s in t.nonempty_subsets() {
            f.insert(s, lp.add_var(format!("f[{t},{s}]")));
        }
        let term = |s: Subset, a: f64, out: &mut Vec<(Var, f64)>| {
            if let Some(v) = f.get(&s) {
                out.push((*v, a));
            }
        };

        for i in t.iter() {
            let mut row = Vec::new();
            term(t.without(i), 1.0, &mut row);
            term(t, -1.0, &mut row);
            lp.add_le(format!("mono[{t},{}]", i + 1), row, 0.0);
        }
        for i in t.iter() {
            for j in t.iter().filter(|&j| j > i) {
                for s in t.without(i).without(j).subsets() {
                    let mut row = Vec::new();
                    term(s.with(i).with(j), 1.0, &mut row);
                    term(s, 1.0, &mut row);
                    term(s.with(i), -1.0, &mut row);
                    term(s.with(j), -1.0, &mut row);
                    lp.add_le(format!("submod[{t},{},{},{s}]", i + 1, j + 1), row, 0.0);
                }
            }
        }

        match grounding {
            Grounding::Whole => {
                lp.add_le(
                    format!("ground[{t}]"),
                    vec![(f[&t], 1.0)],
                    to_f64(touching(caps, t)),
                );
            }
            Grounding::PerSubset => {
                for s in t.nonempty_subsets() {
                    lp.add_le(
                        format!("ground[{t},{s}]"),
                        vec![(f[&s], 1.0)],
                        to_f64(touching(caps, s)),
                    );
                }
            }
        }

        for i in t.iter() {
            let b = t.difference(p.side_info(i)).without(i);
            let mut row = vec![(rates[i], 1.0)];
            term(b.with(i), -1.0, &mut row);
            term(b, 1.0, &mut row);
            lp.add_le(format!("decode[{t},{}]", i + 1), row, 0.0);
        }
    }
    Ok(lp)
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm1Result {
    pub value: f64,
    pub rational_value: Option<Rational64>,
    pub grounding: Grounding,
}

pub fn thm1_polymatroid(
    p: &Problem,
    caps: &CapacityProfile,
    grounding: Grounding,
    solver: &SolverOptions,
) -> Result<Thm1Result, OuterError> {
    let lp = thm1_program(p, caps, grounding)?;
    let sol = lp::solve_with(&lp, solver)?;
    let value = sol.optimum()?;
    Ok(Thm1Result {
        value,
        rational_value: sol.rational_value,
        grounding,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm2Witness {
    pub u: Subset,
    pub v: Subset,
    pub bound: Rational64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm2Result {
    pub u: Subset,
    /// Minimum-cardinality unlocking sets, with whether each passes the
    /// knowledge-of-complement condition.
    pub candidates: Vec<(Subset, bool)>,
    pub best: Option<Thm2Witness>,
    /// Some inclusion-minimal unlocking set is larger than the minimum
    /// cardinality, so the two readings of minimality pick different sets.
    pub minimality_differs: bool,
}

impl Thm2Result {
    pub fn value(&self) -> Option<Rational64> {
        self.best.as_ref().map(|w| w.bound)
    }
}

/// `Σ_J C_J + Σ_{J ∩ V ≠ ∅, J ⊄ U ∪ V} C_J` for a given `U`, `V`.
pub fn thm2_value(caps: &CapacityProfile, u: Subset, v: Subset) -> Rational64 {
    let uv = u.union(v);
    let extra: Rational64 = caps
        .iter()
        .filter(|(j, _)| j.intersects(v) && !j.is_subset_of(uv))
        .map(|(_, c)| c)
        .sum();
    caps.total() + extra
}

/// Minimum of the closure bound over all valid `V`; `best` is `None` when no
/// minimum-cardinality candidate satisfies the condition.
pub fn thm2_sum_bound(p: &Problem, caps: &CapacityProfile) -> Result<Thm2Result, OuterError> {
    check_caps(p, caps)?;
    let u = compute_u(p);
    debug_assert_eq!(closure(p, u).known, u);
    let min_card = compute_v_candidates(p, u);
    let size = min_card[0].len();
    let minimality_differs = inclusion_minimal_v_candidates(p, u)
        .iter()
        .any(|v| v.len() != size);

    let mut candidates = Vec::new();
    let mut best: Option<Thm2Witness> = None;
    for v in min_card {
        let ok = check_condition1(p, v);
        candidates.push((v, ok));
        if !ok {
            continue;
        }
        let bound = thm2_value(caps, u, v);
        if best.as_ref().is_none_or(|b| bound < b.bound) {
            best = Some(Thm2Witness { u, v, bound });
        }
    }
    Ok(Thm2Result {
        u,
        candidates,
        best,
        minimality_differs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterBoundResult {
    pub thm1: Thm1Result,
    pub thm2: Thm2Result,
    pub best: f64,
    pub best_rational: Option<Rational64>,
}

pub fn best_outer(
    p: &Problem,
    caps: &CapacityProfile,
    grounding: Grounding,
    solver: &SolverOptions,
) -> Result<OuterBoundResult, OuterError> {
    let thm1 = thm1_polymatroid(p, caps, grounding, solver)?;
    let thm2 = thm2_sum_bound(p, caps)?;
    let (best, best_rational) = match thm2.value() {
        Some(b) if to_f64(b) < thm1.value => (to_f64(b), Some(b)),
        _ => (thm1.value, thm1.rational_value),
    };
    Ok(OuterBoundResult {
        thm1,
        thm2,
        best,
        best_rational,
    })
}
