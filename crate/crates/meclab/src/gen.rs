//! Seeded random connected chordal graph generation.
//!
//! Vertices are inserted along a random order; each new vertex attaches to a
//! randomly grown clique among the already-placed vertices, so every prefix
//! of the insertion order has the perfect-elimination property and the result
//! is chordal by construction. At least one back-edge per vertex keeps the
//! graph connected. Clique growth can stall below the per-step quota, so a
//! final pass adds chordality-preserving edges until the target count is met.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::PdGraph;
use crate::set::NodeSet;

/// Parameters for one generated graph. Identical specs yield identical
/// graphs: the stream is a seeded ChaCha8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    /// Target edge density in (0, 1]: the ratio of edges to `n(n-1)/2`.
    pub density: f64,
    pub seed: u64,
}

impl GenSpec {
    /// Edge count before the connectivity clamp.
    pub fn requested_edges(&self) -> usize {
        let max = self.n * (self.n.saturating_sub(1)) / 2;
        (self.density * max as f64).round() as usize
    }

    /// Edge count the generator actually aims for: the request clamped to
    /// `[n-1, n(n-1)/2]` so the graph can be connected.
    pub fn target_edges(&self) -> usize {
        let max = self.n * (self.n.saturating_sub(1)) / 2;
        self.requested_edges().clamp(self.n.saturating_sub(1), max)
    }

    /// Did connectivity force more edges than the density asked for?
    pub fn clamped(&self) -> bool {
        self.requested_edges() < self.n.saturating_sub(1)
    }
}

/// Generate a connected chordal graph with `spec.n` nodes and exactly
/// `spec.target_edges()` edges.
pub fn gen_chordal(spec: &GenSpec) -> Result<PdGraph> {
    if spec.n < 1 {
        return Err(Error::contract("need at least one node"));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::contract(format!(
            "density must be in (0, 1], got {}",
            spec.density
        )));
    }
    let n = spec.n;
    let target = spec.target_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut g = PdGraph::new(n)?;
    let mut placed = NodeSet::singleton(order[0]);
    let mut placed_list = vec![order[0]];
    let mut edges = 0usize;

    for (i, &u) in order.iter().enumerate().skip(1) {
        let remaining = n - i; // vertices still to place, including u
        let deficit = target - edges;
        // draw the back-degree uniformly with mean near deficit/remaining, so
        // different seeds spread the edge mass differently
        let avg = deficit as f64 / remaining as f64;
        let hi = ((2.0 * avg).floor() as usize).max(1);
        let mut want = rng.gen_range(1..=hi);
        // keep one edge in reserve for each later vertex
        want = want.clamp(1, i.min(deficit - (remaining - 1)).max(1));

        let anchor = placed_list[rng.gen_range(0..placed_list.len())];
        let mut clique = NodeSet::singleton(anchor);
        while clique.len() < want {
            let mut candidates = placed - clique;
            for m in clique.iter() {
                candidates = candidates & g.neighbors(m);
            }
            let Some(pick) = nth_member(candidates, &mut rng) else {
                break; // anchor's clique cannot grow further
            };
            clique.insert(pick);
        }
        for m in clique.iter() {
            g.add_undirected(u, m)?;
            edges += 1;
        }
        placed.insert(u);
        placed_list.push(u);
    }

    // top up to the exact target with chordality-preserving additions
    while edges < target {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if !g.is_adjacent(a, b) {
                    pairs.push((a, b));
                }
            }
        }
        pairs.shuffle(&mut rng);
        let mut added = false;
        for (a, b) in pairs {
            let mut trial = g.clone();
            trial.add_undirected(a, b)?;
            if trial.is_chordal()? {
                g = trial;
                edges += 1;
                added = true;
                break;
            }
        }
        if !added {
            break; // cannot happen for chordal graphs, but do not spin
        }
    }

    Ok(g)
}

fn nth_member(s: NodeSet, rng: &mut ChaCha8Rng) -> Option<usize> {
    if s.is_empty() {
        return None;
    }
    let k = rng.gen_range(0..s.len());
    s.iter().nth(k)
}
