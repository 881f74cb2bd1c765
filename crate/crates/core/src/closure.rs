//! Zero-entropy queries answered from the decoding conditions alone.
//!
//! Receiver `i` recovers `x_i` from all server outputs and `x(A_i)`, so once a
//! set `T` of messages is known (together with `Y_N`) every `i` with
//! `A_i ⊆ T` becomes known as well. Iterating that rule to its fixed point
//! certifies `H(X_{T \ seed} | Y_N, X_seed) = 0`.

use serde::{Deserialize, Serialize};

use crate::problem::Problem;
use crate::subset::Subset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureResult {
    pub seed: Subset,
    pub known: Subset,
    /// Messages in the order they were decoded (0-based).
    pub order: Vec<usize>,
}

/// Smallest superset of `seed` closed under "add `i` whenever `A_i` is known".
/// Each pass scans receivers in ascending order.
pub fn closure(p: &Problem, seed: Subset) -> ClosureResult {
    let mut known = seed;
    let mut order = Vec::new();
    loop {
        let before = known;
        for i in 0..p.n() {
            if !known.contains(i) && p.side_info(i).is_subset_of(known) {
                known = known.with(i);
                order.push(i);
            }
        }
        if known == before {
            break;
        }
    }
    ClosureResult { seed, known, order }
}

/// The set of messages decodable from the server outputs alone.
pub fn compute_u(p: &Problem) -> Subset {
    closure(p, Subset::EMPTY).known
}

/// Minimum-cardinality sets `V ⊆ [n] \ U` whose knowledge, together with `U`,
/// unlocks every remaining message. All minimum-size witnesses are returned in
/// ascending mask order; `[∅]` when `U = [n]`.
pub fn compute_v_candidates(p: &Problem, u: Subset) -> Vec<Subset> {
    let n = p.n();
    let full = Subset::full(n);
    let rest = full.difference(u);
    for size in 0..=rest.len() {
        let found: Vec<Subset> = rest
            .subsets()
            .filter(|v| v.len() == size && closure(p, u.union(*v)).known == full)
            .collect();
        if !found.is_empty() {
            return found;
        }
    }
    unreachable!("V = [n] \\ U always unlocks everything")
}

/// Inclusion-minimal unlocking sets: no proper subset also unlocks `[n]`.
/// Used to detect instances where the two readings of minimality diverge.
pub fn inclusion_minimal_v_candidates(p: &Problem, u: Subset) -> Vec<Subset> {
    let n = p.n();
    let full = Subset::full(n);
    let rest = full.difference(u);
    let unlocks = |v: Subset| closure(p, u.union(v)).known == full;
    rest.subsets()
        .filter(|&v| unlocks(v) && v.iter().all(|i| !unlocks(v.without(i))))
        .collect()
}

/// `H(X_V | Y_N, X_{V̄}) = 0`, i.e. knowing everything outside `V` decodes `V`.
pub fn check_condition1(p: &Problem, v: Subset) -> bool {
    let full = Subset::full(p.n());
    closure(p, v.complement(p.n())).known == full
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Problem {
        s.parse().unwrap()
    }

    const P140: &str = "(1|-),(2|1,4),(3|1,2),(4|1,2,3)";
    const P218: &str = "(1|2,3,4),(2|1,3,4),(3|1,2,4),(4|1,2,3)";

    #[test]
    fn closure_examples() {
        let q = p(P140);
        let r = closure(&q, Subset::EMPTY);
        assert_eq!(r.known, Subset::singleton(0));
        assert_eq!(r.order, vec![0]);
        assert_eq!(closure(&q, Subset::full(4)).known, Subset::full(4));
        assert_eq!(closure(&p(P218), Subset::EMPTY).known, Subset::EMPTY);
        // seed {2}: 1 fires, then 3 (A_3={1,2}) fires, then 4, then 2 was seeded
        let r = closure(&q, Subset::singleton(1));
        assert_eq!(r.known, Subset::full(4));
        assert_eq!(r.order, vec![0, 2, 3]);
    }

    #[test]
    fn u_examples() {
        assert_eq!(compute_u(&p(P140)), Subset::singleton(0));
        assert_eq!(
            compute_u(&Problem::without_side_information(5)),
            Subset::full(5)
        );
        assert_eq!(compute_u(&p(P218)), Subset::EMPTY);
    }

    #[test]
    fn v_examples() {
        let q = p(P140);
        let u = compute_u(&q);
        assert_eq!(
            compute_v_candidates(&q, u),
            vec![Subset::singleton(1), Subset::singleton(3)]
        );
        let free = Problem::without_side_information(3);
        assert_eq!(
            compute_v_candidates(&free, compute_u(&free)),
            vec![Subset::EMPTY]
        );
        let q = p(P218);
        let vs: Vec<String> = compute_v_candidates(&q, Subset::EMPTY)
            .iter()
            .map(|v| v.to_string())
            .collect();
        assert_eq!(vs, ["{1,2,3}", "{1,2,4}", "{1,3,4}", "{2,3,4}"]);
    }

    #[test]
    fn condition1_examples() {
        assert!(check_condition1(&p(P140), Subset::singleton(1)));
        assert!(check_condition1(&p(P218), Subset::EMPTY));
        assert!(!check_condition1(&p(P218), Subset::from_indices([0, 1, 2])));
    }

    #[test]
    fn inclusion_minimal_contains_minimum_cardinality() {
        let q = p(P140);
        let u = compute_u(&q);
        let incl = inclusion_minimal_v_candidates(&q, u);
        for v in compute_v_candidates(&q, u) {
            assert!(incl.contains(&v));
        }
    }
}
