//! Achievable rates from composite coding, computed by linear programming.
//!
//! Four schemes are provided:
//!
//! * [`centralized_cc_original`]: one server, composite rates fixed per
//!   decoding tuple, regions mixed by time sharing.
//! * [`centralized_cc_enhanced`]: one server, composite rates tailored to
//!   each decoding tuple with message rates split across tuples.
//! * [`distributed_cc_allserver`]: every server joins a single coding group;
//!   `enhanced` selects tuple-dependent composite rates.
//! * [`distributed_cc_fractional`]: servers split their capacity across
//!   several groups, each running enhanced composite coding on the messages
//!   it holds.
//!
//! Strict inequalities of the achievability conditions are modeled as `≤`, so
//! each optimum is the supremum of the open region.

mod delta;
mod grow;
mod model;

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use delta::{
    decoding_space, decoding_space_within, full_delta_size, parse_decoding_tuples, DecodingTuple,
    DeltaKind, DeltaSpace, DeltaStrategy,
};
pub use grow::GrowthOptions;

use crate::lp::{self, LinearProgram, LpError, SolverOptions};
use crate::problem::{CapacityProfile, Problem};
use crate::subset::Subset;
use model::{Capacity, CompositeModel, Group, Mode, ServerSlot};

pub const DEFAULT_MAX_NONZEROS: usize = 5_000_000;

/// Largest `n` for which [`DeltaPlan::Auto`] uses the full decoding space.
pub const FULL_DELTA_MAX_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InnerError {
    #[error("invalid decoding set for receiver {receiver}: {reason}")]
    InvalidDecodingSet { receiver: usize, reason: String },
    #[error("LP would have {nonzeros} nonzeros, above the limit of {limit}")]
    DeltaTooLarge { nonzeros: usize, limit: usize },
    #[error("invalid server grouping: {0}")]
    InvalidGrouping(String),
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
    #[error("capacity profile is for n={got}, problem has n={expected}")]
    CapacityMismatch { expected: usize, got: usize },
    #[error("{0} is not supported for this scheme")]
    Unsupported(&'static str),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    SumRate,
    SymmetricRate,
    Weighted(Vec<f64>),
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::SumRate => f.write_str("sum"),
            Objective::SymmetricRate => f.write_str("sym"),
            Objective::Weighted(w) => write!(f, "weighted{w:?}"),
        }
    }
}

/// How the decoding space of a scheme is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaPlan {
    /// Full space for `n ≤ 4`, otherwise grown from the minimal/maximal tuples.
    Auto,
    Use(DeltaStrategy),
    Grow(GrowthOptions),
}

impl From<DeltaStrategy> for DeltaPlan {
    fn from(s: DeltaStrategy) -> Self {
        DeltaPlan::Use(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerOptions {
    pub objective: Objective,
    pub delta: DeltaPlan,
    pub max_nonzeros: usize,
    pub solver: SolverOptions,
    /// Drop servers with `C_J = 0` before building the LP. Exact; turning it
    /// off only serves cross-checks.
    pub prune_zero_capacity: bool,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            objective: Objective::SumRate,
            delta: DeltaPlan::Auto,
            max_nonzeros: DEFAULT_MAX_NONZEROS,
            solver: SolverOptions::from_env(),
            prune_zero_capacity: true,
        }
    }
}

impl InnerOptions {
    pub fn with_objective(objective: Objective) -> Self {
        InnerOptions {
            objective,
            ..Default::default()
        }
    }

    pub fn objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn delta(mut self, delta: impl Into<DeltaPlan>) -> Self {
        self.delta = delta.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LpStats {
    pub variables: usize,
    pub constraints: usize,
    pub nonzeros: usize,
    /// Number of LPs solved to produce the result.
    pub solves: usize,
}

impl LpStats {
    fn of(lp: &LinearProgram) -> LpStats {
        LpStats {
            variables: lp.num_vars(),
            constraints: lp.num_constraints(),
            nonzeros: lp.num_nonzeros(),
            solves: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerBoundResult {
    pub objective: Objective,
    pub value: f64,
    pub rational_value: Option<Rational64>,
    /// `R_i`, one per message.
    pub rates: Vec<f64>,
    /// The decoding space the LP was built on; for fractional coding, the
    /// spaces of all groups concatenated.
    pub delta_used: DeltaSpace,
    pub lp: LpStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Centralized original composite coding.
    Cc,
    /// Centralized enhanced composite coding.
    CcEnhanced,
    /// All-server distributed composite coding, enhanced.
    Dist,
    /// All-server distributed composite coding, tuple-independent rates.
    DistNonenhanced,
    /// Fractional distributed composite coding.
    Fractional,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Cc,
        Scheme::CcEnhanced,
        Scheme::Dist,
        Scheme::DistNonenhanced,
        Scheme::Fractional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Cc => "cc",
            Scheme::CcEnhanced => "cc-enhanced",
            Scheme::Dist => "dist",
            Scheme::DistNonenhanced => "dist-nonenhanced",
            Scheme::Fractional => "fractional",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown scheme {s:?}"))
    }
}

/// Collection `Π` of server groups for fractional coding. Groups may overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerGrouping {
    groups: Vec<Vec<Subset>>,
}

impl ServerGrouping {
    pub fn new(n: usize, groups: Vec<Vec<Subset>>) -> Result<Self, InnerError> {
        if groups.is_empty() {
            return Err(InnerError::InvalidGrouping("no groups".into()));
        }
        for (g, servers) in groups.iter().enumerate() {
            if servers.is_empty() {
                return Err(InnerError::InvalidGrouping(format!(
                    "group {} is empty",
                    g + 1
                )));
            }
            for (k, j) in servers.iter().enumerate() {
                if j.is_empty() || !j.is_subset_of(Subset::full(n)) {
                    return Err(InnerError::InvalidGrouping(format!(
                        "group {}: server {j} is not a nonempty subset of [{n}]",
                        g + 1
                    )));
                }
                if servers[..k].contains(j) {
                    return Err(InnerError::InvalidGrouping(format!(
                        "group {}: server {j} listed twice",
                        g + 1
                    )));
                }
            }
        }
        Ok(ServerGrouping { groups })
    }

    /// Every server in one group.
    pub fn single(n: usize) -> Self {
        ServerGrouping {
            groups: vec![crate::subset::nonempty_subsets(n).collect()],
        }
    }

    /// Each server in a group of its own.
    pub fn singletons(n: usize) -> Self {
        ServerGrouping {
            groups: crate::subset::nonempty_subsets(n)
                .map(|j| vec![j])
                .collect(),
        }
    }

    /// One group per line; servers are given as masks separated by spaces or
    /// commas, e.g. `3 6` for `{{1,2},{2,3}}`.
    pub fn parse(n: usize, text: &str) -> Result<Self, InnerError> {
        let mut groups = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let servers = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u32>()
                        .map(Subset::from_mask)
                        .map_err(|_| InnerError::InvalidGrouping(format!("bad server mask {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            groups.push(servers);
        }
        ServerGrouping::new(n, groups)
    }

    pub fn groups(&self) -> &[Vec<Subset>] {
        &self.groups
    }

    /// `I(P)`: messages held by at least one server of group `g`.
    pub fn messages(&self, g: usize) -> Subset {
        self.groups[g]
            .iter()
            .fold(Subset::EMPTY, |acc, j| acc.union(*j))
    }
}

fn check_inputs(
    p: &Problem,
    caps: &CapacityProfile,
    objective: &Objective,
) -> Result<(), InnerError> {
    if caps.n() != p.n() {
        return Err(InnerError::CapacityMismatch {
            expected: p.n(),
            got: caps.n(),
        });
    }
    if let Objective::Weighted(w) = objective {
        if w.len() != p.n() || w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(InnerError::InvalidObjective(format!(
                "need {} finite nonnegative weights",
                p.n()
            )));
        }
    }
    Ok(())
}

fn all_server_group(p: &Problem, caps: &CapacityProfile, prune: bool) -> Group {
    let servers = caps
        .iter()
        .filter(|(_, c)| !prune || !c.is_zero())
        .map(|(j, c)| ServerSlot {
            set: j,
            cap: Capacity::Fixed(c.to_f64().unwrap_or(0.0)),
        })
        .collect();
    Group::new(p, Subset::full(p.n()), servers)
}

fn single_server_group(p: &Problem, c: Rational64) -> Group {
    let slot = ServerSlot {
        set: Subset::full(p.n()),
        cap: Capacity::Fixed(c.to_f64().unwrap_or(0.0)),
    };
    Group::new(p, Subset::full(p.n()), vec![slot])
}

/// Solves a model built on one group in the given mode.
fn solve_single_group(
    n: usize,
    group: &Group,
    tuples: &[DecodingTuple],
    mode: Mode,
    opts: &InnerOptions,
) -> Result<(CompositeModel, lp::LpSolution), InnerError> {
    let model = build_single_group(n, group, tuples, mode, opts)?;
    let sol = lp::solve_with(&model.lp, &opts.solver)?;
    sol.optimum()?;
    Ok((model, sol))
}

fn build_single_group(
    n: usize,
    group: &Group,
    tuples: &[DecodingTuple],
    mode: Mode,
    opts: &InnerOptions,
) -> Result<CompositeModel, InnerError> {
    let mut model = CompositeModel::new(n, &opts.objective, mode, opts.max_nonzeros);
    model.add_group(0, group);
    for t in tuples {
        model.add_block(0, group, t)?;
    }
    Ok(model)
}

fn result_from(
    model: &CompositeModel,
    sol: &lp::LpSolution,
    objective: &Objective,
    delta_used: DeltaSpace,
    solves: usize,
) -> InnerBoundResult {
    InnerBoundResult {
        objective: objective.clone(),
        value: sol.value,
        rational_value: sol.rational_value,
        rates: model.rates.iter().map(|r| sol.value_of(*r)).collect(),
        delta_used,
        lp: LpStats {
            solves,
            ..LpStats::of(&model.lp)
        },
    }
}

fn resolve_delta(
    p: &Problem,
    plan: &DeltaPlan,
) -> Result<Result<DeltaSpace, GrowthOptions>, InnerError> {
    match plan {
        DeltaPlan::Use(s) => Ok(Ok(decoding_space(p, s)?)),
        DeltaPlan::Grow(g) => Ok(Err(g.clone())),
        DeltaPlan::Auto if p.n() <= FULL_DELTA_MAX_N => {
            Ok(Ok(decoding_space(p, &DeltaStrategy::Full)?))
        }
        DeltaPlan::Auto => Ok(Err(GrowthOptions::default())),
    }
}

/// Enhanced composite coding on one group: one LP over all tuples.
fn enhanced_on_group(
    p: &Problem,
    group: &Group,
    opts: &InnerOptions,
) -> Result<InnerBoundResult, InnerError> {
    match resolve_delta(p, &opts.delta)? {
        Ok(space) => {
            let (model, sol) =
                solve_single_group(p.n(), group, &space.tuples, Mode::Enhanced, opts)?;
            Ok(result_from(&model, &sol, &opts.objective, space, 1))
        }
        Err(growth) => grow::grow(p, group, Mode::Enhanced, opts, &growth),
    }
}

/// Tuple-independent composite rates on one group. Linear objectives peak at
/// a single tuple, so those are solved tuple by tuple; the symmetric rate
/// needs the time-sharing LP.
fn original_on_group(
    p: &Problem,
    group: &Group,
    opts: &InnerOptions,
) -> Result<InnerBoundResult, InnerError> {
    let space = match resolve_delta(p, &opts.delta)? {
        Ok(space) => space,
        Err(growth) => return grow::grow(p, group, Mode::Hull, opts, &growth),
    };
    match opts.objective {
        Objective::SymmetricRate => {
            let (model, sol) = solve_single_group(p.n(), group, &space.tuples, Mode::Hull, opts)?;
            Ok(result_from(&model, &sol, &opts.objective, space, 1))
        }
        Objective::SumRate | Objective::Weighted(_) => {
            let mut best: Option<InnerBoundResult> = None;
            for t in &space.tuples {
                let (model, sol) = solve_single_group(
                    p.n(),
                    group,
                    std::slice::from_ref(t),
                    Mode::Enhanced,
                    opts,
                )?;
                if best.as_ref().is_none_or(|b| sol.value > b.value + 1e-12) {
                    best = Some(result_from(&model, &sol, &opts.objective, space.clone(), 0));
                }
            }
            let mut best = best.expect("decoding space is never empty");
            best.lp.solves = space.len();
            Ok(best)
        }
    }
}

/// Original centralized composite coding with broadcast capacity `c`.
pub fn centralized_cc_original(
    p: &Problem,
    c: Rational64,
    opts: &InnerOptions,
) -> Result<InnerBoundResult, InnerError> {
    check_inputs(p, &CapacityProfile::centralized(p.n(), c), &opts.objective)?;
    original_on_group(p, &single_server_group(p, c), opts)
}

/// Enhanced centralized composite coding with broadcast capacity `c`.
pub fn centralized_cc_enhanced(
    p: &Problem,
    c: Rational64,
    opts: &InnerOptions,
) -> Result<InnerBoundResult, InnerError> {
    check_inputs(p, &CapacityProfile::centralized(p.n(), c), &opts.objective)?;
    enhanced_on_group(p, &single_server_group(p, c), opts)
}

/// All-server distributed composite coding.
pub fn distributed_cc_allserver(
    p: &Problem,
    caps: &CapacityProfile,
    enhanced: bool,
    opts: &InnerOptions,
) -> Result<InnerBoundResult, InnerError> {
    check_inputs(p, caps, &opts.objective)?;
    let group = all_server_group(p, caps, opts.prune_zero_capacity);
    if enhanced {
        enhanced_on_group(p, &group, opts)
    } else {
        original_on_group(p, &group, opts)
    }
}

/// The all-server LP itself, for inspection or export.
pub fn allserver_program(
    p: &Problem,
    caps: &CapacityProfile,
    enhanced: bool,
    tuples: &[DecodingTuple],
    opts: &InnerOptions,
) -> Result<LinearProgram, InnerError> {
    check_inputs(p, caps, &opts.objective)?;
    let group = all_server_group(p, caps, opts.prune_zero_capacity);
    let mode = if enhanced { Mode::Enhanced } else { Mode::Hull };
    Ok(build_single_group(p.n(), &group, tuples, mode, opts)?.lp)
}

fn fractional_model(
    p: &Problem,
    caps: &CapacityProfile,
    grouping: &ServerGrouping,
    opts: &InnerOptions,
) -> Result<(CompositeModel, Vec<DeltaSpace>), InnerError> {
    check_inputs(p, caps, &opts.objective)?;
    for servers in grouping.groups() {
        if let Some(j) = servers
            .iter()
            .find(|j| !j.is_subset_of(Subset::full(p.n())))
        {
            return Err(InnerError::InvalidGrouping(format!(
                "server {j} outside [{}]",
                p.n()
            )));
        }
    }
    let strategy = match &opts.delta {
        DeltaPlan::Use(s) => Some(s.clone()),
        DeltaPlan::Auto => None,
        DeltaPlan::Grow(_) => return Err(InnerError::Unsupported("decoding-space growth")),
    };

    let mut model = CompositeModel::new(p.n(), &opts.objective, Mode::Enhanced, opts.max_nonzeros);
    let lp = &mut model.lp;
    // capacity shares C_J(P) and their budgets Σ_P C_J(P) ≤ C_J
    let mut share_rows = std::collections::BTreeMap::new();
    let mut groups = Vec::new();
    for (g, servers) in grouping.groups().iter().enumerate() {
        let universe = grouping.messages(g);
        let mut slots = Vec::new();
        for &j in servers {
            let c = caps.get(j);
            if opts.prune_zero_capacity && c.is_zero() {
                continue;
            }
            let share = lp.add_var(format!("C[{j},P{g}]"));
            share_rows
                .entry(j)
                .or_insert_with(Vec::new)
                .push((share, 1.0));
            slots.push(ServerSlot {
                set: j,
                cap: Capacity::Shared(share),
            });
        }
        groups.push(Group::new(p, universe, slots));
    }
    for (j, coefs) in share_rows {
        lp.add_le(format!("share[{j}]"), coefs, caps.get_f64(j));
    }

    let mut spaces = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        let strategy = strategy
            .clone()
            .unwrap_or(if group.universe.len() <= FULL_DELTA_MAX_N {
                DeltaStrategy::Full
            } else {
                DeltaStrategy::MinimalAndMaximal
            });
        let space = decoding_space_within(p, group.universe, &strategy)?;
        model.add_group(g, group);
        for t in &space.tuples {
            model.add_block(g, group, t)?;
        }
        spaces.push(space);
    }
    Ok((model, spaces))
}

/// The fractional LP itself, for inspection or export.
pub fn fractional_program(
    p: &Problem,
    caps: &CapacityProfile,
    grouping: &ServerGrouping,
    opts: &InnerOptions,
) -> Result<LinearProgram, InnerError> {
    Ok(fractional_model(p, caps, grouping, opts)?.0.lp)
}

/// Fractional distributed composite coding over the given server groups.
/// Each group's decoding space follows `opts.delta` (`Auto` means full for
/// groups holding at most four messages, minimal/maximal otherwise).
pub fn distributed_cc_fractional(
    p: &Problem,
    caps: &CapacityProfile,
    grouping: &ServerGrouping,
    opts: &InnerOptions,
) -> Result<InnerBoundResult, InnerError> {
    let (model, spaces) = fractional_model(p, caps, grouping, opts)?;
    let sol = lp::solve_with(&model.lp, &opts.solver)?;
    sol.optimum()?;
    let kind = spaces
        .first()
        .map(|s| s.kind.clone())
        .unwrap_or(DeltaKind::Custom);
    let delta_used = DeltaSpace {
        tuples: spaces.into_iter().flat_map(|s| s.tuples).collect(),
        kind,
    };
    Ok(result_from(&model, &sol, &opts.objective, delta_used, 1))
}
