//! Construction of composite-coding LPs.
//!
//! A model is a set of *blocks*, one per (server group, decoding tuple), tied
//! together by *master rows*: the rate links `R_i = Σ R_i(·)`, the flat-coding
//! budgets of each server (when composite rates may vary with the tuple), and
//! the convexity row `Σ λ_D = 1` (when they may not, so regions are mixed by
//! time sharing). The same block code feeds both the full LP and the small
//! pricing LPs used to grow `Δ`.

use std::collections::HashMap;
use std::ops::Range;

use super::{DecodingTuple, InnerError, Objective};
use crate::lp::{LinearProgram, RowId, Var};
use crate::problem::Problem;
use crate::subset::Subset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Composite rates `S_{K,J}(D)` per tuple sharing one flat-coding budget.
    Enhanced,
    /// One composite-rate vector per tuple scaled by `λ_D`; the region is the
    /// convex hull of the per-tuple regions.
    Hull,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Capacity {
    Fixed(f64),
    /// Capacity share `C_J(P)`, itself an LP variable.
    Shared(Var),
}

#[derive(Debug, Clone)]
pub(crate) struct ServerSlot {
    pub set: Subset,
    pub cap: Capacity,
}

/// Servers taking part in one round of composite coding, and the messages
/// they jointly hold.
#[derive(Debug, Clone)]
pub(crate) struct Group {
    pub universe: Subset,
    pub servers: Vec<ServerSlot>,
    /// `A_i ∩ universe`, indexed by receiver.
    pub local_side_info: Vec<Subset>,
    /// Every virtual encoder `(K, server slot)` with `∅ ≠ K ⊆ J`.
    pub encoders: Vec<(Subset, usize)>,
}

impl Group {
    pub fn new(p: &Problem, universe: Subset, servers: Vec<ServerSlot>) -> Group {
        let local_side_info = (0..p.n())
            .map(|i| p.side_info(i).intersection(universe))
            .collect();
        let encoders = servers
            .iter()
            .enumerate()
            .flat_map(|(s, slot)| slot.set.nonempty_subsets().map(move |k| (k, s)))
            .collect();
        Group {
            universe,
            servers,
            local_side_info,
            encoders,
        }
    }

    pub fn receivers(&self) -> impl Iterator<Item = usize> + '_ {
        self.universe.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum MasterRow {
    Rate(usize),
    Flat {
        group: usize,
        receiver: usize,
        server: usize,
    },
    Convexity,
}

pub(crate) trait BlockSink {
    fn column(&mut self, name: String, links: &[(MasterRow, f64)]) -> Var;
    fn le_row(&mut self, name: String, coefs: Vec<(Var, f64)>, rhs: f64);
}

pub(crate) struct BlockVars {
    pub lambda: Option<Var>,
    pub composite: Vec<Var>,
}

/// Emits the variables and internal rows of one block.
pub(crate) fn build_block<S: BlockSink>(
    sink: &mut S,
    group_index: usize,
    group: &Group,
    tuple: &DecodingTuple,
    mode: Mode,
    tag: &str,
) -> BlockVars {
    let lambda = match mode {
        Mode::Hull => Some(sink.column(format!("lambda[{tag}]"), &[(MasterRow::Convexity, 1.0)])),
        Mode::Enhanced => None,
    };

    let mut links = Vec::new();
    let composite: Vec<Var> = group
        .encoders
        .iter()
        .map(|&(k, s)| {
            links.clear();
            if mode == Mode::Enhanced {
                for i in group.receivers() {
                    if !k.is_subset_of(group.local_side_info[i]) {
                        links.push((
                            MasterRow::Flat {
                                group: group_index,
                                receiver: i,
                                server: s,
                            },
                            1.0,
                        ));
                    }
                }
            }
            sink.column(format!("S[{k},{}|{tag}]", group.servers[s].set), &links)
        })
        .collect();

    let mut rates = HashMap::new();
    for i in group.receivers() {
        let v = sink.column(format!("R[{}|{tag}]", i + 1), &[(MasterRow::Rate(i), -1.0)]);
        rates.insert(i, v);
    }

    if let Some(lambda) = lambda {
        for i in group.receivers() {
            for (s, slot) in group.servers.iter().enumerate() {
                let mut coefs: Vec<(Var, f64)> = group
                    .encoders
                    .iter()
                    .zip(&composite)
                    .filter(|((k, es), _)| *es == s && !k.is_subset_of(group.local_side_info[i]))
                    .map(|(_, v)| (*v, 1.0))
                    .collect();
                if coefs.is_empty() {
                    continue;
                }
                let Capacity::Fixed(c) = slot.cap else {
                    unreachable!("time-sharing blocks need fixed capacities")
                };
                coefs.push((lambda, -c));
                sink.le_row(format!("flat[{},{}|{tag}]", i + 1, slot.set), coefs, 0.0);
            }
        }
    }

    for i in group.receivers() {
        let d = tuple.get(i);
        let available = d.union(group.local_side_info[i]);
        for l in d.nonempty_subsets() {
            let mut coefs: Vec<(Var, f64)> = l.iter().map(|j| (rates[&j], 1.0)).collect();
            coefs.extend(
                group
                    .encoders
                    .iter()
                    .zip(&composite)
                    .filter(|((k, _), _)| k.is_subset_of(available) && k.intersects(l))
                    .map(|(_, v)| (*v, -1.0)),
            );
            sink.le_row(format!("decode[{},L={l}|{tag}]", i + 1), coefs, 0.0);
        }
    }

    BlockVars { lambda, composite }
}

/// The full LP: master rows plus every block.
pub(crate) struct CompositeModel {
    pub lp: LinearProgram,
    pub rates: Vec<Var>,
    rows: HashMap<MasterRow, RowId>,
    mode: Mode,
    max_nonzeros: usize,
    nonzeros: usize,
    blocks: usize,
}

impl CompositeModel {
    pub fn new(n: usize, objective: &Objective, mode: Mode, max_nonzeros: usize) -> Self {
        let mut lp = LinearProgram::new();
        let mut rows = HashMap::new();
        let rates: Vec<Var> = (0..n)
            .map(|i| lp.add_var(format!("R[{}]", i + 1)))
            .collect();
        for (i, &r) in rates.iter().enumerate() {
            let row = lp.add_eq(format!("rate[{}]", i + 1), vec![(r, 1.0)], 0.0);
            rows.insert(MasterRow::Rate(i), row);
        }
        match objective {
            Objective::SumRate => rates.iter().for_each(|r| lp.set_objective(*r, 1.0)),
            Objective::Weighted(w) => rates
                .iter()
                .zip(w)
                .for_each(|(r, wi)| lp.set_objective(*r, *wi)),
            Objective::SymmetricRate => {
                let t = lp.add_var("t");
                lp.set_objective(t, 1.0);
                for (i, &r) in rates.iter().enumerate() {
                    lp.add_le(format!("sym[{}]", i + 1), vec![(t, 1.0), (r, -1.0)], 0.0);
                }
            }
        }
        if mode == Mode::Hull {
            let row = lp.add_eq("convexity", Vec::new(), 1.0);
            rows.insert(MasterRow::Convexity, row);
        }
        let nonzeros = lp.num_nonzeros();
        CompositeModel {
            lp,
            rates,
            rows,
            mode,
            max_nonzeros,
            nonzeros,
            blocks: 0,
        }
    }

    /// Creates the flat-coding budget rows of a group (enhanced mode only).
    pub fn add_group(&mut self, group_index: usize, group: &Group) {
        if self.mode != Mode::Enhanced {
            return;
        }
        for i in group.receivers() {
            for (s, slot) in group.servers.iter().enumerate() {
                if slot.set.is_subset_of(group.local_side_info[i]) {
                    continue;
                }
                let name = format!("flat[P{group_index},{},{}]", i + 1, slot.set);
                let row = match slot.cap {
                    Capacity::Fixed(c) => self.lp.add_le(name, Vec::new(), c),
                    Capacity::Shared(v) => self.lp.add_le(name, vec![(v, -1.0)], 0.0),
                };
                self.rows.insert(
                    MasterRow::Flat {
                        group: group_index,
                        receiver: i,
                        server: s,
                    },
                    row,
                );
            }
        }
        self.nonzeros = self.lp.num_nonzeros();
    }

    pub fn add_block(
        &mut self,
        group_index: usize,
        group: &Group,
        tuple: &DecodingTuple,
    ) -> Result<Range<usize>, InnerError> {
        let tag = format!("P{group_index},D{}", self.blocks);
        let mode = self.mode;
        let first = self.lp.num_vars();
        build_block(self, group_index, group, tuple, mode, &tag);
        self.blocks += 1;
        if self.nonzeros > self.max_nonzeros {
            return Err(InnerError::DeltaTooLarge {
                nonzeros: self.nonzeros,
                limit: self.max_nonzeros,
            });
        }
        Ok(first..self.lp.num_vars())
    }

    pub fn master_rows(&self) -> &HashMap<MasterRow, RowId> {
        &self.rows
    }
}

impl BlockSink for CompositeModel {
    fn column(&mut self, name: String, links: &[(MasterRow, f64)]) -> Var {
        let v = self.lp.add_var(name);
        for (key, a) in links {
            let row = *self
                .rows
                .get(key)
                .expect("master row declared before blocks");
            self.lp.push_coef(row, v, *a);
        }
        self.nonzeros += links.len();
        v
    }

    fn le_row(&mut self, name: String, coefs: Vec<(Var, f64)>, rhs: f64) {
        self.nonzeros += coefs.len();
        self.lp.add_le(name, coefs, rhs);
    }
}

/// Builds the LP that prices one candidate block against master duals: each
/// column's objective is its reduced cost `-Σ π_r a_r`, and a normalization
/// row makes the block cone bounded.
pub(crate) struct PricingSink<'a> {
    pub lp: LinearProgram,
    duals: &'a HashMap<MasterRow, f64>,
}

impl<'a> PricingSink<'a> {
    pub fn new(duals: &'a HashMap<MasterRow, f64>) -> Self {
        PricingSink {
            lp: LinearProgram::new(),
            duals,
        }
    }
}

impl BlockSink for PricingSink<'_> {
    fn column(&mut self, name: String, links: &[(MasterRow, f64)]) -> Var {
        let v = self.lp.add_var(name);
        let cost: f64 = links
            .iter()
            .map(|(key, a)| -self.duals.get(key).copied().unwrap_or(0.0) * a)
            .sum();
        self.lp.set_objective(v, cost);
        v
    }

    fn le_row(&mut self, name: String, coefs: Vec<(Var, f64)>, rhs: f64) {
        self.lp.add_le(name, coefs, rhs);
    }
}

pub(crate) fn pricing_program(
    duals: &HashMap<MasterRow, f64>,
    group: &Group,
    tuple: &DecodingTuple,
    mode: Mode,
) -> LinearProgram {
    let mut sink = PricingSink::new(duals);
    let vars = build_block(&mut sink, 0, group, tuple, mode, "price");
    match vars.lambda {
        Some(lambda) => {
            sink.lp.add_le("normalize", vec![(lambda, 1.0)], 1.0);
        }
        None => {
            let coefs = vars.composite.iter().map(|v| (*v, 1.0)).collect();
            sink.lp.add_le("normalize", coefs, 1.0);
        }
    }
    sink.lp
}
