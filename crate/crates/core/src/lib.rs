//! Bounds on the capacity region of distributed index coding.
//!
//! Messages are indexed `0..n` internally and printed 1-based. A problem is the
//! side-information set of each receiver; a capacity profile assigns a link
//! capacity to every server, a nonempty subset of messages.

pub mod catalog;
pub mod closure;
pub mod inner;
pub mod lp;
pub mod outer;
pub mod problem;
pub mod rational;
pub mod report;
pub mod subset;

pub use catalog::{load_catalog, Catalog, CatalogEntry, CatalogError, TableClass};
pub use closure::{check_condition1, closure, compute_u, compute_v_candidates, ClosureResult};
pub use inner::{
    centralized_cc_enhanced, centralized_cc_original, distributed_cc_allserver,
    distributed_cc_fractional, DeltaStrategy, InnerBoundResult, InnerError, InnerOptions,
    Objective, ServerGrouping,
};
pub use lp::{LinearProgram, LpError, LpSolution, LpStatus, SolverOptions};
pub use outer::{best_outer, thm1_polymatroid, thm2_sum_bound, Grounding, OuterBoundResult};
pub use problem::{enumerate_nonisomorphic, parse_problem, CapacityProfile, ParseError, Problem};
pub use subset::Subset;
