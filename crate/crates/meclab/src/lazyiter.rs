//! Incremental enumeration of single-node intervention results.
//!
//! For a UCCG `G` and target `v`, the possible interventional essential
//! graphs correspond one-to-one to the cliques in the neighborhood of `v`.
//! Instead of re-orienting the whole graph per clique, [`lazy_iter`] starts
//! from the root orientation (empty parent set) and derives each successor
//! result from its predecessor by reorienting a small edge subset:
//!
//! 1. find the nodes `M` newly separated from `v` once `u` joins the parents,
//! 2. flip `v -> u` and unorient everything inside `M + u` and between the
//!    old parents and `M + u`,
//! 3. direct `u`'s edges into the old child set and re-close that subgraph
//!    only.
//!
//! Everything outside those regions is provably unchanged, which is what
//! makes the iteration cheap.

use crate::error::{Error, Result};
use crate::graph::PdGraph;
use crate::orient::{close_in_place, orient_root};
use crate::set::NodeSet;

/// An interventional essential graph for a single-node target, together with
/// the node partition the reorientation steps maintain.
///
/// The partition satisfies the structural properties checked by
/// [`InterventionResult::validate`]: `parents + children` is exactly the
/// neighborhood of `target`; `separated` are the nodes cut off from `target`
/// by `parents`; `remainder` is everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterventionResult {
    /// The essential graph itself (same skeleton as the base UCCG).
    pub graph: PdGraph,
    /// The intervened node.
    pub target: usize,
    /// Parents of `target`: a clique in its neighborhood.
    pub parents: NodeSet,
    /// Children of `target`: its remaining neighbors.
    pub children: NodeSet,
    /// Nodes separated from `target` by `parents`.
    pub separated: NodeSet,
    /// All other nodes.
    pub remainder: NodeSet,
}

impl InterventionResult {
    /// Check the partition bookkeeping and the four structural properties of
    /// intervention results against the base UCCG. Returns a description of
    /// the first violated invariant.
    pub fn validate(&self, base: &PdGraph) -> std::result::Result<(), String> {
        let v = self.target;
        let ne = base.neighbors(v);
        if self.parents | self.children != ne {
            return Err(format!(
                "parents {:?} + children {:?} must equal the neighborhood {ne:?} of {v}",
                self.parents, self.children
            ));
        }
        if self.parents.intersects(self.children) {
            return Err("parents and children overlap".into());
        }
        let mut union = NodeSet::singleton(v);
        for (name, part) in [
            ("parents", self.parents),
            ("children", self.children),
            ("separated", self.separated),
            ("remainder", self.remainder),
        ] {
            if part.contains(v) {
                return Err(format!("{name} contains the target"));
            }
            if part.intersects(union) {
                return Err(format!("{name} overlaps another partition class"));
            }
            union = union | part;
        }
        if union != base.verts() {
            return Err("partition does not cover the vertex set".into());
        }
        if self.separated != base.unreachable_from(v, self.parents) {
            return Err(format!(
                "separated set {:?} is not the set cut off by the parents",
                self.separated
            ));
        }
        if self.graph.verts() != base.verts() {
            return Err("result graph has a different vertex set".into());
        }
        for a in base.verts().iter() {
            if self.graph.neighbors(a) != base.neighbors(a) {
                return Err(format!("skeleton differs from the base graph at node {a}"));
            }
        }

        // (1) no edges between the separated set and children/remainder/target
        let forbidden = self.children | self.remainder | NodeSet::singleton(v);
        for a in self.separated.iter() {
            let bad = base.neighbors(a) & forbidden;
            if !bad.is_empty() {
                return Err(format!(
                    "separated node {a} is adjacent to {bad:?} outside parents/separated"
                ));
            }
        }
        // (2) parent-to-child edges are directed parent -> child
        for p in self.parents.iter() {
            for c in (self.graph.neighbors(p) & self.children).iter() {
                if !self.graph.is_directed(p, c) {
                    return Err(format!("edge between parent {p} and child {c} is not {p}->{c}"));
                }
            }
        }
        // (3) edges from parents+children into the remainder point at the remainder
        for a in (self.parents | self.children).iter() {
            for d in (self.graph.neighbors(a) & self.remainder).iter() {
                if !self.graph.is_directed(a, d) {
                    return Err(format!("edge between {a} and remainder node {d} is not {a}->{d}"));
                }
            }
        }
        // (4) the subgraph on separated+parents is undirected
        let ap = self.separated | self.parents;
        for a in ap.iter() {
            for b in (self.graph.neighbors(a) & ap).iter() {
                if a < b && !self.graph.is_undirected(a, b) {
                    return Err(format!(
                        "edge {a}-{b} inside separated+parents is directed"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Derive the result for parent set `P + u` from the result for `P` by the
/// three reorientation steps. `u` must be a child of the target that is
/// adjacent to every current parent.
pub fn derive_next(
    r: &InterventionResult,
    u: usize,
    base: &PdGraph,
) -> Result<InterventionResult> {
    if !r.children.contains(u) {
        return Err(Error::contract(format!(
            "node {u} is not a child of target {}",
            r.target
        )));
    }
    if !r.parents.is_subset_of(base.neighbors(u)) {
        return Err(Error::contract(format!(
            "node {u} is not adjacent to every node in the parent set {:?}",
            r.parents
        )));
    }
    let v = r.target;
    let new_parents = r.parents.with(u);

    // step 1: nodes newly separated from v
    let separated = base.unreachable_from(v, new_parents);
    let moved = separated - r.separated;

    // step 2: flip v -> u, unorient inside moved+u and between parents and moved+u
    let mut graph = r.graph.clone();
    graph.direct(u, v);
    let mu = moved.with(u);
    for x in mu.iter() {
        for y in (graph.neighbors(x) & mu).iter() {
            if x < y {
                graph.undirect(x, y);
            }
        }
        for y in (graph.neighbors(x) & r.parents).iter() {
            graph.undirect(x, y);
        }
    }

    // step 3: u's edges into the old child set point away from u; re-close
    // the subgraph on the old child set (which still contains u)
    for c in (graph.neighbors(u) & r.children).without(u).iter() {
        graph.direct(u, c);
    }
    close_in_place(&mut graph, r.children, None)?;

    Ok(InterventionResult {
        graph,
        target: v,
        parents: new_parents,
        children: r.children.without(u),
        separated,
        remainder: r.remainder - moved,
    })
}

/// Enumerate the full intervention result space for target `v` on a UCCG:
/// exactly one result per clique (including the empty one) in the
/// neighborhood of `v`. Depth-first from the root result, extending the
/// parent set only with nodes above its current maximum so each clique is
/// reached once.
pub fn lazy_iter(g: &PdGraph, v: usize) -> Result<Vec<InterventionResult>> {
    let root = orient_root(g, v)?;
    let mut out = Vec::new();
    expand(g, root, &mut out)?;
    Ok(out)
}

fn expand(g: &PdGraph, r: InterventionResult, out: &mut Vec<InterventionResult>) -> Result<()> {
    let floor = r.parents.max();
    let candidates: Vec<usize> = r
        .children
        .iter()
        .filter(|&u| floor.is_none_or(|f| u > f))
        .filter(|&u| r.parents.is_subset_of(g.neighbors(u)))
        .collect();
    out.push(r);
    let at = out.len() - 1;
    for u in candidates {
        let next = derive_next(&out[at], u, g)?;
        expand(g, next, out)?;
    }
    Ok(())
}
