//! Brute-force reference implementations for small graphs.
//!
//! Everything here works straight from definitions: equivalence-class members
//! are enumerated as collider-free acyclic orientations, and interventional
//! equivalence is decided by comparing v-structures and the skeletons of
//! intervention graphs, never by the shortcuts the fast modules rely on.
//! These routines are the ground truth that the orientation, iteration,
//! counting and design code is tested against. They are deliberately naive
//! and refuse graphs above a node cap.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::design::{Objective, ObjectiveValue};
use crate::error::{Error, Result};
use crate::graph::PdGraph;
use crate::set::NodeSet;

/// Default node cap for all oracle routines. The CLI can override it via the
/// `MECLAB_ORACLE_CAP` environment variable.
pub const DEFAULT_ORACLE_CAP: usize = 12;

/// All member DAGs of the Markov equivalence class of a UCCG.
#[derive(Debug, Clone)]
pub struct MecEnumeration {
    pub base: PdGraph,
    pub members: Vec<PdGraph>,
}

/// Enumerate every collider-free acyclic orientation of a UCCG by recursive
/// edge assignment with cycle and collider pruning. Deterministic order.
pub fn enumerate_mec(g: &PdGraph, cap: usize) -> Result<MecEnumeration> {
    g.ensure_uccg()?;
    let order = g.verts().len();
    if order > cap {
        return Err(Error::OracleCap { n: order, cap });
    }

    let edges = g.undirected_edges();
    let mut work = g.clone();
    let mut members = Vec::new();
    assign(&mut work, &edges, 0, &mut members);
    Ok(MecEnumeration {
        base: g.clone(),
        members,
    })
}

fn assign(work: &mut PdGraph, edges: &[(usize, usize)], idx: usize, out: &mut Vec<PdGraph>) {
    if idx == edges.len() {
        out.push(work.clone());
        return;
    }
    let (a, b) = edges[idx];
    for (x, y) in [(a, b), (b, a)] {
        work.direct(x, y);
        if admissible(work, x, y) {
            assign(work, edges, idx + 1, out);
        }
    }
    work.undirect(a, b);
}

/// After directing `x -> y`: no directed cycle among decided edges and no
/// collider formed at `y`.
fn admissible(work: &PdGraph, x: usize, y: usize) -> bool {
    for c in work.parents(y).iter() {
        if c != x && !work.is_adjacent(c, x) {
            return false;
        }
    }
    !work.has_directed_cycle()
}

/// The DAG with all edges into `target` removed.
fn intervention_graph(d: &PdGraph, target: NodeSet) -> PdGraph {
    let mut g = PdGraph::new(d.n()).expect("same node count");
    for (a, b) in d.directed_edges() {
        if !target.contains(b) {
            g.add_directed(a, b).expect("edge copy");
        }
    }
    g.induced(d.verts())
}

/// V-structure list plus one skeleton fingerprint per intervention target.
type EquivalenceKey = (Vec<(usize, usize, usize)>, Vec<Vec<u64>>);

/// The definitional equivalence fingerprint of a member: its v-structures and
/// the skeleton of every intervention graph over the family (the empty target
/// is always included). Two members are interventionally Markov equivalent
/// iff their fingerprints are equal.
fn equivalence_key(d: &PdGraph, family: &[NodeSet]) -> EquivalenceKey {
    let vstructs = d.v_structures().expect("members are fully directed");
    let mut skeletons = Vec::with_capacity(family.len() + 1);
    for target in std::iter::once(NodeSet::empty()).chain(family.iter().copied()) {
        let ig = intervention_graph(d, target);
        skeletons.push(d.verts().iter().map(|a| ig.neighbors(a).bits()).collect());
    }
    (vstructs, skeletons)
}

/// One interventional Markov equivalence class: the member indices it
/// contains and the edge-union graph over them.
#[derive(Debug, Clone)]
pub struct IClass {
    pub members: Vec<usize>,
    pub graph: PdGraph,
}

/// Partition the enumeration into interventional Markov equivalence classes
/// under `family`, ordered by smallest member index.
pub fn i_markov_classes(enumeration: &MecEnumeration, family: &[NodeSet]) -> Vec<IClass> {
    let mut index: HashMap<EquivalenceKey, Vec<usize>> = HashMap::new();
    for (i, d) in enumeration.members.iter().enumerate() {
        index.entry(equivalence_key(d, family)).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = index.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    classes
        .into_iter()
        .map(|members| IClass {
            graph: edge_union(enumeration, &members),
            members,
        })
        .collect()
}

/// The union of the edge sets of the listed members.
fn edge_union(enumeration: &MecEnumeration, members: &[usize]) -> PdGraph {
    let base = &enumeration.base;
    let mut g = PdGraph::new(base.n()).expect("same node count");
    for a in base.verts().iter() {
        for b in base.neighbors(a).iter() {
            if a >= b {
                continue;
            }
            let mut fwd = false;
            let mut rev = false;
            for &i in members {
                if enumeration.members[i].is_directed(a, b) {
                    fwd = true;
                } else {
                    rev = true;
                }
            }
            match (fwd, rev) {
                (true, true) => g.add_undirected(a, b).expect("edge copy"),
                (true, false) => g.add_directed(a, b).expect("edge copy"),
                (false, true) => g.add_directed(b, a).expect("edge copy"),
                (false, false) => unreachable!("no member decided edge {a}-{b}"),
            }
        }
    }
    g.induced(base.verts())
}

/// The interventional essential graph of member `d` under `family`: the edge
/// union over all members interventionally Markov equivalent to `d`.
pub fn i_essential(
    d: &PdGraph,
    family: &[NodeSet],
    enumeration: &MecEnumeration,
) -> Result<PdGraph> {
    if !enumeration.members.contains(d) {
        return Err(Error::contract(
            "DAG is not a member of the enumerated equivalence class",
        ));
    }
    let key = equivalence_key(d, family);
    let members: Vec<usize> = enumeration
        .members
        .iter()
        .enumerate()
        .filter(|(_, m)| equivalence_key(m, family) == key)
        .map(|(i, _)| i)
        .collect();
    Ok(edge_union(enumeration, &members))
}

/// Equivalence-class size by exhaustive enumeration.
pub fn oracle_count(g: &PdGraph, cap: usize) -> Result<BigUint> {
    Ok(BigUint::from(enumerate_mec(g, cap)?.members.len()))
}

/// Best single-node intervention target by exhaustive evaluation of every
/// target against every member DAG; ties go to the smallest node index.
pub fn oracle_active(g: &PdGraph, obj: Objective, cap: usize) -> Result<(usize, ObjectiveValue)> {
    if g.verts().len() < 2 {
        return Err(Error::contract("need at least 2 nodes to pick a target"));
    }
    let enumeration = enumerate_mec(g, cap)?;
    let mut best: Option<(usize, ObjectiveValue)> = None;
    for v in g.verts().iter() {
        let classes = i_markov_classes(&enumeration, &[NodeSet::singleton(v)]);
        let worst = worst_case(&classes, obj);
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
    Ok(best.expect("at least one target"))
}

/// Worst-case objective value of intervening on every node of `targets`
/// (as single-node experiments), by exhaustive evaluation.
pub fn oracle_passive_value(
    g: &PdGraph,
    targets: NodeSet,
    obj: Objective,
    cap: usize,
) -> Result<ObjectiveValue> {
    if !targets.is_subset_of(g.verts()) {
        return Err(Error::contract("targets must be nodes of the graph"));
    }
    let enumeration = enumerate_mec(g, cap)?;
    let family: Vec<NodeSet> = targets.iter().map(NodeSet::singleton).collect();
    let classes = i_markov_classes(&enumeration, &family);
    Ok(worst_case(&classes, obj))
}

fn worst_case(classes: &[IClass], obj: Objective) -> ObjectiveValue {
    match obj {
        Objective::MecSize => ObjectiveValue::MecSize(BigUint::from(
            classes.iter().map(|c| c.members.len()).max().unwrap_or(1),
        )),
        Objective::Edges => ObjectiveValue::Edges(
            classes
                .iter()
                .map(|c| c.graph.directed_edge_count() as u64)
                .min()
                .unwrap_or(0),
        ),
    }
}
