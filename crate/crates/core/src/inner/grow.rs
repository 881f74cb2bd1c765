//! Growing the decoding space by column generation.
//!
//! The full `Δ` grows exponentially with `n`, so for larger problems the LP
//! starts from a small tuple set and repeatedly adds the tuples whose blocks
//! price out best against the current duals. Candidates come from the one-step
//! neighbourhood of the tuples in use (change one `D_i`); once that is
//! exhausted, the whole space is priced if it is small enough, which certifies
//! the optimum over the full `Δ`.

use std::collections::{HashMap, HashSet};

use super::model::{pricing_program, CompositeModel, Group, MasterRow, Mode};
use super::{
    decoding_space_within, result_from, DecodingTuple, DeltaKind, DeltaSpace, DeltaStrategy,
    InnerBoundResult, InnerError, InnerOptions,
};
use crate::lp::{self, LpSolution};
use crate::problem::Problem;
use crate::subset::Subset;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthOptions {
    pub initial: DeltaStrategy,
    /// Tuples added per round at most.
    pub batch: usize,
    pub max_rounds: usize,
    /// Stop after this many consecutive rounds improving by less than
    /// `min_improvement`.
    pub patience: usize,
    pub min_improvement: f64,
    /// A candidate enters only if its block prices above this.
    pub min_reduced_cost: f64,
    /// Price the whole space once the neighbourhood is exhausted, when it
    /// has at most this many tuples.
    pub full_pricing_limit: u128,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            initial: DeltaStrategy::MinimalAndMaximal,
            batch: 16,
            max_rounds: 200,
            patience: 8,
            min_improvement: 1e-7,
            min_reduced_cost: 1e-7,
            full_pricing_limit: 1 << 17,
        }
    }
}

/// `𝒟_i` within the group, per receiver.
fn choices(p: &Problem, universe: Subset) -> Vec<Vec<Subset>> {
    (0..p.n())
        .map(|i| {
            if !universe.contains(i) {
                return vec![Subset::EMPTY];
            }
            let free = universe.difference(p.side_info(i)).without(i);
            free.subsets().map(|s| s.with(i)).collect()
        })
        .collect()
}

fn neighbours<'a>(
    t: &DecodingTuple,
    choices: &'a [Vec<Subset>],
) -> impl Iterator<Item = DecodingTuple> + 'a {
    let t = t.clone();
    choices.iter().enumerate().flat_map(move |(i, opts)| {
        let t = t.clone();
        let current = t.get(i);
        opts.iter().filter(move |d| **d != current).map(move |d| {
            let mut sets = t.0.clone();
            sets[i] = *d;
            DecodingTuple(sets)
        })
    })
}

struct Master {
    model: CompositeModel,
    sol: LpSolution,
    blocks: Vec<std::ops::Range<usize>>,
}

impl Master {
    fn solve(
        p: &Problem,
        group: &Group,
        tuples: &[DecodingTuple],
        mode: Mode,
        opts: &InnerOptions,
    ) -> Result<Master, InnerError> {
        let mut model = CompositeModel::new(p.n(), &opts.objective, mode, opts.max_nonzeros);
        model.add_group(0, group);
        let blocks = tuples
            .iter()
            .map(|t| model.add_block(0, group, t))
            .collect::<Result<Vec<_>, _>>()?;
        let sol = lp::solve_with(&model.lp, &opts.solver)?;
        sol.optimum()?;
        Ok(Master { model, sol, blocks })
    }

    fn duals(&self) -> HashMap<MasterRow, f64> {
        self.model
            .master_rows()
            .iter()
            .map(|(key, row)| (*key, self.sol.row_duals[row.0]))
            .collect()
    }

    fn active(&self, block: usize) -> bool {
        self.blocks[block]
            .clone()
            .any(|v| self.sol.primal[v] > 1e-9)
    }
}

/// Best reduced cost of a candidate block.
fn price(
    duals: &HashMap<MasterRow, f64>,
    group: &Group,
    tuple: &DecodingTuple,
    mode: Mode,
    opts: &InnerOptions,
) -> Result<f64, InnerError> {
    let lp = pricing_program(duals, group, tuple, mode);
    let sol = lp::solve_with(&lp, &opts.solver)?;
    Ok(sol.optimum()?)
}

fn best_candidates(
    candidates: impl Iterator<Item = DecodingTuple>,
    duals: &HashMap<MasterRow, f64>,
    group: &Group,
    mode: Mode,
    opts: &InnerOptions,
    growth: &GrowthOptions,
) -> Result<Vec<DecodingTuple>, InnerError> {
    let mut scored = Vec::new();
    for t in candidates {
        let score = price(duals, group, &t, mode, opts)?;
        if score > growth.min_reduced_cost {
            scored.push((score, t));
        }
    }
    // ties broken by tuple order so growth is deterministic
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    scored.truncate(growth.batch);
    Ok(scored.into_iter().map(|(_, t)| t).collect())
}

pub(crate) fn grow(
    p: &Problem,
    group: &Group,
    mode: Mode,
    opts: &InnerOptions,
    growth: &GrowthOptions,
) -> Result<InnerBoundResult, InnerError> {
    let choices = choices(p, group.universe);
    let full_size: u128 = choices.iter().map(|c| c.len() as u128).product();
    let mut tuples = decoding_space_within(p, group.universe, &growth.initial)?.tuples;
    let mut used: HashSet<DecodingTuple> = tuples.iter().cloned().collect();

    let mut master = Master::solve(p, group, &tuples, mode, opts)?;
    let mut rounds = 0;
    let mut stale = 0;
    let mut complete = used.len() as u128 == full_size;
    let mut solves = 1;

    while rounds < growth.max_rounds && !complete && stale < growth.patience {
        rounds += 1;
        let duals = master.duals();
        let mut frontier = Vec::new();
        let mut seen = HashSet::new();
        for (b, t) in tuples.iter().enumerate() {
            if !master.active(b) {
                continue;
            }
            for nb in neighbours(t, &choices) {
                if !used.contains(&nb) && seen.insert(nb.clone()) {
                    frontier.push(nb);
                }
            }
        }
        let mut fresh = best_candidates(frontier.into_iter(), &duals, group, mode, opts, growth)?;
        if fresh.is_empty() {
            if full_size > growth.full_pricing_limit {
                break;
            }
            let rest = cartesian(&choices).filter(|t| !used.contains(t));
            fresh = best_candidates(rest, &duals, group, mode, opts, growth)?;
            if fresh.is_empty() {
                complete = true;
                break;
            }
        }
        for t in fresh {
            used.insert(t.clone());
            tuples.push(t);
        }
        let previous = master.sol.value;
        master = Master::solve(p, group, &tuples, mode, opts)?;
        solves += 1;
        if master.sol.value - previous < growth.min_improvement {
            stale += 1;
        } else {
            stale = 0;
        }
        complete = used.len() as u128 == full_size;
    }

    let space = DeltaSpace {
        tuples,
        kind: DeltaKind::Grown { rounds, complete },
    };
    Ok(result_from(
        &master.model,
        &master.sol,
        &opts.objective,
        space,
        solves,
    ))
}

/// Lazily walks the product of per-receiver choices, first receiver slowest.
fn cartesian(choices: &[Vec<Subset>]) -> impl Iterator<Item = DecodingTuple> + '_ {
    let total: usize = choices.iter().map(Vec::len).product();
    (0..total).map(move |mut idx| {
        let mut sets = vec![Subset::EMPTY; choices.len()];
        for (i, opts) in choices.iter().enumerate().rev() {
            sets[i] = opts[idx % opts.len()];
            idx /= opts.len();
        }
        DecodingTuple(sets)
    })
}
