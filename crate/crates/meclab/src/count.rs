//! Equivalence-class size via the sum-product decomposition.
//!
//! The size of the class of a UCCG equals, for any fixed pivot node, the sum
//! over its intervention results of the product of the sizes of their chain
//! components. Recursing with a subset memo turns this into the counting
//! algorithm; reached subsets are chain components of intermediate results,
//! typically far fewer than all of `2^n`.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::PdGraph;
use crate::lazyiter::lazy_iter;
use crate::set::NodeSet;

/// Memo table `S -> |class of G[S]|` for one fixed base graph. Singletons
/// count 1 without being stored.
#[derive(Debug, Default)]
pub struct CountMemo {
    table: HashMap<NodeSet, BigUint>,
}

impl CountMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: NodeSet) -> Option<BigUint> {
        if s.len() == 1 {
            return Some(BigUint::from(1u32));
        }
        self.table.get(&s).cloned()
    }

    /// Number of stored (non-singleton) entries.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Size of the Markov equivalence class of the induced UCCG `g[s]`,
/// memoized on `s`.
pub fn mec_count_uccg(g: &PdGraph, s: NodeSet, memo: &mut CountMemo) -> Result<BigUint> {
    count_uccg(g, s, memo, None)
}

/// Same, but with the top-level pivot forced; used to verify that the result
/// does not depend on the pivot choice.
#[cfg(test)]
pub(crate) fn mec_count_uccg_with_pivot(
    g: &PdGraph,
    s: NodeSet,
    memo: &mut CountMemo,
    pivot: usize,
) -> Result<BigUint> {
    count_uccg(g, s, memo, Some(pivot))
}

fn count_uccg(
    g: &PdGraph,
    s: NodeSet,
    memo: &mut CountMemo,
    forced_pivot: Option<usize>,
) -> Result<BigUint> {
    if s.is_empty() {
        return Err(Error::contract("cannot count on an empty node set"));
    }
    if !s.is_subset_of(g.verts()) {
        return Err(Error::contract("node set is not part of the graph"));
    }
    if forced_pivot.is_none() {
        if let Some(c) = memo.get(s) {
            return Ok(c);
        }
    } else if s.len() == 1 {
        return Ok(BigUint::from(1u32));
    }

    let sub = g.induced(s);
    sub.ensure_uccg()?;
    let pivot = match forced_pivot {
        Some(v) => {
            if !s.contains(v) {
                return Err(Error::contract(format!("pivot {v} is not in the node set")));
            }
            v
        }
        // largest degree splits components fastest; ties to smallest index
        None => s
            .iter()
            .max_by_key(|&x| (sub.neighbors(x).len(), std::cmp::Reverse(x)))
            .unwrap(),
    };

    let mut total = BigUint::from(0u32);
    for r in lazy_iter(&sub, pivot)? {
        let mut product = BigUint::from(1u32);
        for comp in r.graph.chain_components() {
            product *= count_uccg(g, comp, memo, None)?;
        }
        total += product;
    }
    memo.table.insert(s, total.clone());
    Ok(total)
}

/// Size of the equivalence class represented by a chain graph with chordal
/// chain components: the product over components. Fully directed graphs and
/// the empty graph yield 1.
pub fn mec_count(g: &PdGraph) -> Result<BigUint> {
    if g.has_directed_cycle() {
        return Err(Error::DirectedCycle);
    }
    let mut memo = CountMemo::new();
    let mut total = BigUint::from(1u32);
    for comp in g.chain_components() {
        if comp.len() > 1 {
            total *= mec_count_uccg(g, comp, &mut memo)?;
        }
    }
    Ok(total)
}
