//! Worst-case experiment design: active single-target selection and budgeted
//! passive target-set selection.
//!
//! Both objectives compare targets by their worst case over the possible
//! intervention results. Class size is minimized (the worst case is the
//! largest class an outcome can leave); directed-edge count is maximized (the
//! worst case is the fewest edges an outcome can orient).
//!
//! The passive setting evaluates target sets through a recurrence on
//! `(node subset, targets inside it)`: pick any target as pivot, iterate its
//! intervention results, and combine per-outcome contributions with the
//! recursive values of the outcome's chain components. One memo is shared
//! across all candidate sets of a search, which is what makes the search
//! affordable.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use crate::count::{mec_count_uccg, CountMemo};
use crate::error::{Error, Result};
use crate::graph::PdGraph;
use crate::lazyiter::lazy_iter;
use crate::set::NodeSet;

/// What a design run optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize the worst-case equivalence-class size after the intervention.
    MecSize,
    /// Maximize the worst-case number of directed edges after the intervention.
    Edges,
}

/// A value under one of the objectives. Counts are arbitrary precision; edge
/// counts are plain integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveValue {
    MecSize(BigUint),
    Edges(u64),
}

impl fmt::Display for ObjectiveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveValue::MecSize(c) => write!(f, "{c}"),
            ObjectiveValue::Edges(e) => write!(f, "{e}"),
        }
    }
}

/// Per-node intervention costs and a total budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    costs: Vec<u64>,
    budget: u64,
}

impl CostModel {
    /// Unit cost for every node.
    pub fn uniform(n: usize, budget: u64) -> Self {
        CostModel {
            costs: vec![1; n],
            budget,
        }
    }

    pub fn new(costs: Vec<u64>, budget: u64) -> Self {
        CostModel { costs, budget }
    }

    /// Parse the cost file format: one `node cost` pair per line, `#` starts
    /// a comment. Nodes not mentioned default to cost 1.
    pub fn parse(text: &str, n: usize, budget: u64) -> Result<Self> {
        let mut costs = vec![1u64; n];
        let mut seen = NodeSet::empty();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: line_no, msg };
            let [node, cost] = tokens.as_slice() else {
                return Err(parse_err(format!(
                    "expected \"node cost\", got {:?}",
                    line.trim()
                )));
            };
            let node: usize = node
                .parse()
                .map_err(|_| parse_err(format!("invalid node index {node:?}")))?;
            let cost: u64 = cost
                .parse()
                .map_err(|_| parse_err(format!("invalid cost {cost:?}")))?;
            if node >= n {
                return Err(parse_err(format!("node index {node} out of range (n={n})")));
            }
            if seen.contains(node) {
                return Err(parse_err(format!("cost for node {node} declared twice")));
            }
            seen.insert(node);
            costs[node] = cost;
        }
        Ok(CostModel { costs, budget })
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn cost(&self, node: usize) -> u64 {
        self.costs[node]
    }

    pub fn total_cost(&self, targets: NodeSet) -> u64 {
        targets.iter().map(|v| self.costs[v]).sum()
    }

    pub fn is_feasible(&self, targets: NodeSet) -> bool {
        self.total_cost(targets) <= self.budget
    }
}

/// Memo for the passive recurrence, keyed on `(subset, targets-inside)`.
/// Edge and class-size values live in separate tables, so one memo can serve
/// either objective; the class-size table shares a counting memo for its
/// target-free base case.
#[derive(Debug, Default)]
pub struct PassiveMemo {
    edges: HashMap<(NodeSet, NodeSet), u64>,
    sizes: HashMap<(NodeSet, NodeSet), BigUint>,
    counts: CountMemo,
}

impl PassiveMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of stored recurrence entries.
    pub fn len(&self) -> usize {
        self.edges.len() + self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.sizes.is_empty()
    }
}

fn pick_pivot(sub: &PdGraph, candidates: NodeSet) -> usize {
    candidates
        .iter()
        .max_by_key(|&x| (sub.neighbors(x).len(), std::cmp::Reverse(x)))
        .expect("candidates are nonempty")
}

/// Worst case of the objective over the member DAGs of `g[s]` when the nodes
/// of `t` (inside `s`) are each intervened on.
pub fn passive_value(
    g: &PdGraph,
    s: NodeSet,
    t: NodeSet,
    obj: Objective,
    memo: &mut PassiveMemo,
) -> Result<ObjectiveValue> {
    if !t.is_subset_of(s) {
        return Err(Error::contract("targets must lie inside the node subset"));
    }
    match obj {
        Objective::Edges => Ok(ObjectiveValue::Edges(passive_edges(g, s, t, memo, None)?)),
        Objective::MecSize => Ok(ObjectiveValue::MecSize(passive_size(g, s, t, memo, None)?)),
    }
}

/// Forced top-level pivot, for pivot-independence tests.
#[cfg(test)]
pub(crate) fn passive_value_with_pivot(
    g: &PdGraph,
    s: NodeSet,
    t: NodeSet,
    obj: Objective,
    memo: &mut PassiveMemo,
    pivot: usize,
) -> Result<ObjectiveValue> {
    if !t.contains(pivot) {
        return Err(Error::contract("pivot must be one of the targets"));
    }
    match obj {
        Objective::Edges => Ok(ObjectiveValue::Edges(passive_edges(
            g,
            s,
            t,
            memo,
            Some(pivot),
        )?)),
        Objective::MecSize => Ok(ObjectiveValue::MecSize(passive_size(
            g,
            s,
            t,
            memo,
            Some(pivot),
        )?)),
    }
}

/// Fewest directed edges any member DAG of `g[s]` can leave us with.
fn passive_edges(
    g: &PdGraph,
    s: NodeSet,
    t: NodeSet,
    memo: &mut PassiveMemo,
    forced_pivot: Option<usize>,
) -> Result<u64> {
    if s.len() <= 1 || t.is_empty() {
        return Ok(0);
    }
    if forced_pivot.is_none() {
        if let Some(&val) = memo.edges.get(&(s, t)) {
            return Ok(val);
        }
    }
    let sub = g.induced(s);
    sub.ensure_uccg()?;
    let pivot = forced_pivot.unwrap_or_else(|| pick_pivot(&sub, t));
    let mut worst: Option<u64> = None;
    for r in lazy_iter(&sub, pivot)? {
        let mut val = r.graph.directed_edge_count() as u64;
        for comp in r.graph.chain_components() {
            val += passive_edges(g, comp, t & comp, memo, None)?;
        }
        worst = Some(worst.map_or(val, |w| w.min(val)));
    }
    let worst = worst.expect("at least the root result");
    memo.edges.insert((s, t), worst);
    Ok(worst)
}

/// Largest equivalence class any member DAG of `g[s]` can leave us with:
/// per outcome the class size is the product over chain components, and the
/// worst case is the maximum over outcomes.
fn passive_size(
    g: &PdGraph,
    s: NodeSet,
    t: NodeSet,
    memo: &mut PassiveMemo,
    forced_pivot: Option<usize>,
) -> Result<BigUint> {
    if s.len() <= 1 {
        return Ok(BigUint::from(1u32));
    }
    if t.is_empty() {
        return mec_count_uccg(g, s, &mut memo.counts);
    }
    if forced_pivot.is_none() {
        if let Some(val) = memo.sizes.get(&(s, t)) {
            return Ok(val.clone());
        }
    }
    let sub = g.induced(s);
    sub.ensure_uccg()?;
    let pivot = forced_pivot.unwrap_or_else(|| pick_pivot(&sub, t));
    let mut worst: Option<BigUint> = None;
    for r in lazy_iter(&sub, pivot)? {
        let mut val = BigUint::from(1u32);
        for comp in r.graph.chain_components() {
            val *= passive_size(g, comp, t & comp, memo, None)?;
        }
        worst = Some(match worst {
            None => val,
            Some(w) => w.max(val),
        });
    }
    let worst = worst.expect("at least the root result");
    memo.sizes.insert((s, t), worst.clone());
    Ok(worst)
}

/// Best single-node intervention target on a UCCG. Evaluates every node's
/// worst case over its intervention results; ties go to the smallest index.
pub fn active_best_target(g: &PdGraph, obj: Objective) -> Result<(usize, ObjectiveValue)> {
    g.ensure_uccg()?;
    if g.verts().len() < 2 {
        return Err(Error::contract("need at least 2 nodes to pick a target"));
    }
    let mut counts = CountMemo::new();
    let mut best: Option<(usize, ObjectiveValue)> = None;
    for v in g.verts().iter() {
        let results = lazy_iter(g, v)?;
        let worst = match obj {
            Objective::MecSize => {
                let mut worst = BigUint::from(0u32);
                for r in &results {
                    let mut size = BigUint::from(1u32);
                    for comp in r.graph.chain_components() {
                        size *= mec_count_uccg(g, comp, &mut counts)?;
                    }
                    worst = worst.max(size);
                }
                ObjectiveValue::MecSize(worst)
            }
            Objective::Edges => ObjectiveValue::Edges(
                results
                    .iter()
                    .map(|r| r.graph.directed_edge_count() as u64)
                    .min()
                    .expect("at least the root result"),
            ),
        };
        let better = match (&best, &worst) {
            (None, _) => true,
            (Some((_, ObjectiveValue::MecSize(cur))), ObjectiveValue::MecSize(new)) => new < cur,
            (Some((_, ObjectiveValue::Edges(cur))), ObjectiveValue::Edges(new)) => new > cur,
            _ => unreachable!("objective kind is fixed per call"),
        };
        if better {
            best = Some((v, worst));
        }
    }
    Ok(best.expect("at least one node"))
}

/// Is `candidate` strictly better than `best` under the objective, with ties
/// broken by lower total cost, then by lexicographically smaller target set?
fn improves(
    candidate: (&NodeSet, &ObjectiveValue, u64),
    best: (&NodeSet, &ObjectiveValue, u64),
) -> bool {
    let value_order = match (candidate.1, best.1) {
        (ObjectiveValue::Edges(new), ObjectiveValue::Edges(cur)) => new.cmp(cur),
        (ObjectiveValue::MecSize(new), ObjectiveValue::MecSize(cur)) => cur.cmp(new),
        _ => unreachable!("objective kind is fixed per call"),
    };
    // value_order is Greater when the candidate wins under either objective
    value_order
        .then(best.2.cmp(&candidate.2))
        .then(best.0.lex_cmp(*candidate.0))
        .is_gt()
}

/// Best feasible target set under the cost model: maximizes worst-case
/// directed edges or minimizes worst-case class size. Candidate sets are
/// enumerated depth-first over ascending node indices with cost pruning, and
/// all of them share one memo.
pub fn passive_best_set(
    g: &PdGraph,
    costs: &CostModel,
    obj: Objective,
) -> Result<(NodeSet, ObjectiveValue)> {
    g.ensure_uccg()?;
    if costs.costs.len() != g.n() {
        return Err(Error::contract(format!(
            "cost model covers {} nodes, graph has {}",
            costs.costs.len(),
            g.n()
        )));
    }
    let mut search = SetSearch {
        g,
        nodes: g.verts().iter().collect(),
        costs,
        obj,
        memo: PassiveMemo::new(),
        best: None,
    };
    search.explore(0, NodeSet::empty(), 0)?;
    let (set, value, _) = search.best.expect("the empty set is always feasible");
    Ok((set, value))
}

/// Depth-first enumeration of feasible target sets over ascending nodes:
/// the order is lexicographic, so on equal (value, cost) the earlier =
/// lexicographically smaller set is kept.
struct SetSearch<'a> {
    g: &'a PdGraph,
    nodes: Vec<usize>,
    costs: &'a CostModel,
    obj: Objective,
    memo: PassiveMemo,
    best: Option<(NodeSet, ObjectiveValue, u64)>,
}

impl SetSearch<'_> {
    fn explore(&mut self, from: usize, current: NodeSet, spent: u64) -> Result<()> {
        let value = passive_value(self.g, self.g.verts(), current, self.obj, &mut self.memo)?;
        let replace = match &self.best {
            None => true,
            Some((set, val, cost)) => improves((&current, &value, spent), (set, val, *cost)),
        };
        if replace {
            self.best = Some((current, value, spent));
        }
        for i in from..self.nodes.len() {
            let u = self.nodes[i];
            let c = self.costs.cost(u);
            if spent + c <= self.costs.budget() {
                self.explore(i + 1, current.with(u), spent + c)?;
            }
        }
        Ok(())
    }
}
