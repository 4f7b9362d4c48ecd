//! Partially directed graphs over indexed nodes.
//!
//! One representation serves undirected chordal graphs, CPDAGs, interventional
//! essential graphs and DAGs: an ordered-pair flag per edge slot. An edge
//! `a - b` is undirected iff both `(a,b)` and `(b,a)` are present, directed
//! `a -> b` iff only `(a,b)` is. Orienting or unorienting an edge is a
//! single-flag edit, which the incremental reorientation code relies on.
//!
//! A graph also carries its vertex set explicitly so that induced subgraphs
//! keep the original node indexing. Memo tables in the counting and design
//! modules are keyed on `NodeSet`s in that shared indexing.

use std::collections::VecDeque;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::set::{NodeSet, MAX_NODES};

#[derive(Clone)]
pub struct PdGraph {
    n: usize,
    verts: NodeSet,
    /// out[a] = { b : (a,b) in E }
    out: Vec<NodeSet>,
    /// inc[a] = { b : (b,a) in E }; kept in sync with `out` so parent, child
    /// and undirected-neighbor queries are single word operations.
    inc: Vec<NodeSet>,
    /// Symmetric closure of `out`, fixed at construction. Reorientation never
    /// touches the skeleton, so this is cached rather than recomputed.
    skel: Vec<NodeSet>,
}

impl PartialEq for PdGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.verts == other.verts && self.out == other.out
    }
}

impl Eq for PdGraph {}

impl Hash for PdGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.verts.bits().hash(state);
        for s in &self.out {
            s.bits().hash(state);
        }
    }
}

impl PdGraph {
    /// An edgeless graph on nodes `0..n`.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::TooManyNodes(n));
        }
        Ok(PdGraph {
            n,
            verts: NodeSet::full(n),
            out: vec![NodeSet::empty(); n],
            inc: vec![NodeSet::empty(); n],
            skel: vec![NodeSet::empty(); n],
        })
    }

    /// Convenience constructor from edge lists (used heavily in tests).
    pub fn from_edges(
        n: usize,
        undirected: &[(usize, usize)],
        directed: &[(usize, usize)],
    ) -> Result<Self> {
        let mut g = PdGraph::new(n)?;
        for &(a, b) in undirected {
            g.add_undirected(a, b)?;
        }
        for &(a, b) in directed {
            g.add_directed(a, b)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// The vertex set. Equals `0..n` unless this graph is an induced subgraph.
    #[inline]
    pub fn verts(&self) -> NodeSet {
        self.verts
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::contract(format!(
                "node index out of range: ({a},{b}) with n={}",
                self.n
            )));
        }
        if a == b {
            return Err(Error::contract(format!("self-loop at node {a}")));
        }
        Ok(())
    }

    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        self.out[a].insert(b);
        self.out[b].insert(a);
        self.inc[a].insert(b);
        self.inc[b].insert(a);
        self.skel[a].insert(b);
        self.skel[b].insert(a);
        Ok(())
    }

    pub fn add_directed(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        self.out[a].insert(b);
        self.inc[b].insert(a);
        self.skel[a].insert(b);
        self.skel[b].insert(a);
        Ok(())
    }

    /// Is the ordered pair `(a,b)` present?
    #[inline]
    pub fn has_pair(&self, a: usize, b: usize) -> bool {
        self.out[a].contains(b)
    }

    /// Skeleton adjacency.
    #[inline]
    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.skel[a].contains(b)
    }

    #[inline]
    pub fn is_undirected(&self, a: usize, b: usize) -> bool {
        self.out[a].contains(b) && self.out[b].contains(a)
    }

    #[inline]
    pub fn is_directed(&self, a: usize, b: usize) -> bool {
        self.out[a].contains(b) && !self.out[b].contains(a)
    }

    /// All skeleton neighbors of `a`.
    #[inline]
    pub fn neighbors(&self, a: usize) -> NodeSet {
        self.skel[a]
    }

    /// Neighbors joined to `a` by an undirected edge.
    #[inline]
    pub fn undirected_neighbors(&self, a: usize) -> NodeSet {
        self.out[a] & self.inc[a]
    }

    /// Nodes `b` with `b -> a`.
    #[inline]
    pub fn parents(&self, a: usize) -> NodeSet {
        self.inc[a] - self.out[a]
    }

    /// Nodes `b` with `a -> b`.
    #[inline]
    pub fn children(&self, a: usize) -> NodeSet {
        self.out[a] - self.inc[a]
    }

    /// Orient the existing skeleton edge `a - b` as `a -> b`.
    pub fn direct(&mut self, a: usize, b: usize) {
        debug_assert!(self.is_adjacent(a, b), "direct() on non-edge ({a},{b})");
        self.out[a].insert(b);
        self.inc[b].insert(a);
        self.out[b].remove(a);
        self.inc[a].remove(b);
    }

    /// Make the existing skeleton edge between `a` and `b` undirected.
    pub fn undirect(&mut self, a: usize, b: usize) {
        debug_assert!(self.is_adjacent(a, b), "undirect() on non-edge ({a},{b})");
        self.out[a].insert(b);
        self.out[b].insert(a);
        self.inc[a].insert(b);
        self.inc[b].insert(a);
    }

    /// Number of directed edges: ordered pairs `(a,b)` present with `(b,a)`
    /// absent.
    pub fn directed_edge_count(&self) -> usize {
        self.verts.iter().map(|a| self.children(a).len()).sum()
    }

    /// Number of skeleton edges.
    pub fn edge_count(&self) -> usize {
        let mut twice = 0;
        for a in self.verts.iter() {
            twice += self.skel[a].len();
        }
        twice / 2
    }

    /// Maximum skeleton degree over the vertex set.
    pub fn max_degree(&self) -> usize {
        self.verts.iter().map(|a| self.skel[a].len()).max().unwrap_or(0)
    }

    pub fn is_fully_undirected(&self) -> bool {
        self.verts.iter().all(|a| self.out[a] == self.skel[a])
    }

    pub fn is_fully_directed(&self) -> bool {
        self.verts
            .iter()
            .all(|a| self.undirected_neighbors(a).is_empty())
    }

    /// The induced subgraph on `s`, in the same node indexing.
    pub fn induced(&self, s: NodeSet) -> PdGraph {
        debug_assert!(s.is_subset_of(self.verts));
        let mut out = vec![NodeSet::empty(); self.n];
        let mut inc = vec![NodeSet::empty(); self.n];
        let mut skel = vec![NodeSet::empty(); self.n];
        for a in s.iter() {
            out[a] = self.out[a] & s;
            inc[a] = self.inc[a] & s;
            skel[a] = self.skel[a] & s;
        }
        PdGraph {
            n: self.n,
            verts: s,
            out,
            inc,
            skel,
        }
    }

    /// Copy with every edge undirected.
    pub fn skeleton(&self) -> PdGraph {
        PdGraph {
            n: self.n,
            verts: self.verts,
            out: self.skel.clone(),
            inc: self.skel.clone(),
            skel: self.skel.clone(),
        }
    }

    /// Undirected edges as `(a,b)` with `a < b`, ascending.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for a in self.verts.iter() {
            for b in self.undirected_neighbors(a).iter() {
                if a < b {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    /// Directed edges as `(from, to)`, ascending by pair.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for a in self.verts.iter() {
            for b in self.children(a).iter() {
                edges.push((a, b));
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Connected components of the undirected-edge subgraph, ascending by
    /// smallest member. Components partition the vertex set; nodes whose
    /// incident edges are all directed form singletons.
    pub fn chain_components(&self) -> Vec<NodeSet> {
        let mut components = Vec::new();
        let mut seen = NodeSet::empty();
        for root in self.verts.iter() {
            if seen.contains(root) {
                continue;
            }
            let mut comp = NodeSet::singleton(root);
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for y in self.undirected_neighbors(x).iter() {
                    if !comp.contains(y) {
                        comp.insert(y);
                        queue.push_back(y);
                    }
                }
            }
            seen = seen | comp;
            components.push(comp);
        }
        components
    }

    /// Is the skeleton connected over the vertex set? Empty graphs count as
    /// connected.
    pub fn is_connected(&self) -> bool {
        let Some(root) = self.verts.min() else {
            return true;
        };
        let mut reached = NodeSet::singleton(root);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for y in self.skel[x].iter() {
                if !reached.contains(y) {
                    reached.insert(y);
                    queue.push_back(y);
                }
            }
        }
        reached == self.verts
    }

    /// Nodes separated from `v` by `blocked`: everything (minus `v` and
    /// `blocked`) not reachable from `v` in the skeleton of `G[V \ blocked]`.
    pub fn unreachable_from(&self, v: usize, blocked: NodeSet) -> NodeSet {
        assert!(!blocked.contains(v), "root {v} must not be blocked");
        assert!(self.verts.contains(v));
        let allowed = self.verts - blocked;
        let mut reached = NodeSet::singleton(v);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for y in (self.skel[x] & allowed).iter() {
                if !reached.contains(y) {
                    reached.insert(y);
                    queue.push_back(y);
                }
            }
        }
        allowed - reached
    }

    /// True iff every pair in `s` is skeleton-adjacent. The empty set and
    /// singletons are cliques.
    pub fn is_clique(&self, s: NodeSet) -> bool {
        s.iter().all(|a| (s - self.skel[a]).without(a).is_empty())
    }

    /// Maximum-cardinality-search visit order: ties to the smallest index.
    /// For chordal graphs each vertex's earlier neighbors form a clique.
    fn mcs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.verts.len());
        let mut weight = vec![0usize; self.n];
        let mut remaining = self.verts;
        while !remaining.is_empty() {
            let v = remaining
                .iter()
                .max_by_key(|&x| (weight[x], std::cmp::Reverse(x)))
                .unwrap();
            order.push(v);
            remaining.remove(v);
            for u in (self.skel[v] & remaining).iter() {
                weight[u] += 1;
            }
        }
        order
    }

    /// First position in `order` whose vertex has a nonadjacent pair among its
    /// earlier neighbors, i.e. where the perfect-elimination predicate fails.
    fn peo_violation(&self, order: &[usize]) -> Option<usize> {
        let mut earlier = NodeSet::empty();
        for (i, &v) in order.iter().enumerate() {
            if !self.is_clique(self.skel[v] & earlier) {
                return Some(i);
            }
            earlier.insert(v);
        }
        None
    }

    /// Chordality of an undirected graph, by maximum cardinality search.
    pub fn is_chordal(&self) -> Result<bool> {
        if !self.is_fully_undirected() {
            return Err(Error::contract(
                "is_chordal requires an undirected graph",
            ));
        }
        Ok(self.peo_violation(&self.mcs_order()).is_none())
    }

    /// A perfect elimination ordering: each vertex's earlier neighbors form a
    /// clique. Deterministic (maximum cardinality search, ties to smallest
    /// index). Non-chordal input yields `Error::NotChordal` with a chordless
    /// cycle witness.
    pub fn peo(&self) -> Result<Vec<usize>> {
        if !self.is_fully_undirected() {
            return Err(Error::contract("peo requires an undirected graph"));
        }
        let order = self.mcs_order();
        match self.peo_violation(&order) {
            None => Ok(order),
            Some(_) => Err(Error::NotChordal(
                self.find_chordless_cycle()
                    .expect("PEO violation implies a chordless cycle"),
            )),
        }
    }

    /// Locate a chordless cycle of length >= 4 in a non-chordal undirected
    /// graph. Scans nonadjacent neighbor pairs (x,y) of each v and connects
    /// them by a shortest path avoiding N[v], which makes the cycle induced.
    fn find_chordless_cycle(&self) -> Option<Vec<usize>> {
        for v in self.verts.iter() {
            let nb: Vec<usize> = self.skel[v].iter().collect();
            for (i, &x) in nb.iter().enumerate() {
                for &y in &nb[i + 1..] {
                    if self.is_adjacent(x, y) {
                        continue;
                    }
                    let blocked = self.skel[v].with(v).without(x).without(y);
                    if let Some(path) = self.shortest_path(x, y, blocked) {
                        let mut cycle = vec![v];
                        cycle.extend(path);
                        return Some(cycle);
                    }
                }
            }
        }
        None
    }

    /// Shortest skeleton path from `a` to `b` avoiding `blocked`, as the node
    /// sequence `a..=b`. BFS explores neighbors ascending, so the result is
    /// deterministic.
    fn shortest_path(&self, a: usize, b: usize, blocked: NodeSet) -> Option<Vec<usize>> {
        let allowed = self.verts - blocked;
        let mut prev = vec![usize::MAX; self.n];
        let mut reached = NodeSet::singleton(a);
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            if x == b {
                let mut path = vec![b];
                let mut cur = b;
                while cur != a {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for y in (self.skel[x] & allowed).iter() {
                if !reached.contains(y) {
                    reached.insert(y);
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// All v-structures `a -> b <- c` (a, c nonadjacent) of a DAG, reported
    /// once per triple with `a < c`, ascending.
    pub fn v_structures(&self) -> Result<Vec<(usize, usize, usize)>> {
        if !self.is_fully_directed() {
            return Err(Error::contract(
                "v_structures requires a fully directed graph",
            ));
        }
        let mut triples = Vec::new();
        for b in self.verts.iter() {
            let pa: Vec<usize> = self.parents(b).iter().collect();
            for (i, &a) in pa.iter().enumerate() {
                for &c in &pa[i + 1..] {
                    if !self.is_adjacent(a, c) {
                        triples.push((a, b, c));
                    }
                }
            }
        }
        triples.sort_unstable();
        Ok(triples)
    }

    /// Does the directed part contain a cycle? (Kahn's algorithm over the
    /// directed edges only.)
    pub fn has_directed_cycle(&self) -> bool {
        let mut indeg = vec![0usize; self.n];
        let mut live = 0usize;
        for a in self.verts.iter() {
            indeg[a] = self.parents(a).len();
            live += 1;
        }
        let mut queue: VecDeque<usize> =
            self.verts.iter().filter(|&a| indeg[a] == 0).collect();
        let mut removed = 0usize;
        while let Some(a) = queue.pop_front() {
            removed += 1;
            for b in self.children(a).iter() {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    queue.push_back(b);
                }
            }
        }
        removed != live
    }

    /// Validate that this graph is an undirected connected chordal graph.
    pub fn ensure_uccg(&self) -> Result<()> {
        if !self.is_fully_undirected() {
            return Err(Error::contract("expected a UCCG: graph has directed edges"));
        }
        if !self.is_connected() {
            return Err(Error::contract("expected a UCCG: graph is disconnected"));
        }
        if self.peo_violation(&self.mcs_order()).is_some() {
            return Err(Error::NotChordal(
                self.find_chordless_cycle()
                    .expect("PEO violation implies a chordless cycle"),
            ));
        }
        Ok(())
    }

    // ---- text format -----------------------------------------------------

    /// Parse the graph text format: first line `n`, then one edge per line,
    /// `u v` (undirected) or `u -> v` (directed). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut graph: Option<PdGraph> = None;
        // (min,max) -> declaration; re-declaring an edge differently is an
        // error, repeating it identically is harmless.
        let mut declared: std::collections::HashMap<(usize, usize), (usize, usize, bool)> =
            std::collections::HashMap::new();

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
            let parse_err = |msg: String| Error::Parse {
                line: line_no,
                msg,
            };

            let Some(g) = graph.as_mut() else {
                if tokens.len() != 1 {
                    return Err(parse_err(format!(
                        "expected node count, got {:?}",
                        line.trim()
                    )));
                }
                let n: usize = tokens[0]
                    .parse()
                    .map_err(|_| parse_err(format!("invalid node count {:?}", tokens[0])))?;
                if n > MAX_NODES {
                    return Err(Error::TooManyNodes(n));
                }
                graph = Some(PdGraph::new(n)?);
                continue;
            };

            let (a, b, directed) = match tokens.as_slice() {
                [u, v] => (u, v, false),
                [u, arrow, v] if *arrow == "->" => (u, v, true),
                _ => {
                    return Err(parse_err(format!(
                        "expected \"u v\" or \"u -> v\", got {:?}",
                        line.trim()
                    )))
                }
            };
            let a: usize = a
                .parse()
                .map_err(|_| parse_err(format!("invalid node index {a:?}")))?;
            let b: usize = b
                .parse()
                .map_err(|_| parse_err(format!("invalid node index {b:?}")))?;
            if a >= g.n || b >= g.n {
                return Err(parse_err(format!(
                    "node index out of range: ({a},{b}) with n={}",
                    g.n
                )));
            }
            if a == b {
                return Err(parse_err(format!("self-loop at node {a}")));
            }

            let key = (a.min(b), a.max(b));
            if let Some(&prior) = declared.get(&key) {
                if prior != (a, b, directed) {
                    return Err(parse_err(format!(
                        "edge between {} and {} declared twice with different orientation",
                        key.0, key.1
                    )));
                }
                continue;
            }
            declared.insert(key, (a, b, directed));
            if directed {
                g.add_directed(a, b)?;
            } else {
                g.add_undirected(a, b)?;
            }
        }

        graph.ok_or(Error::Parse {
            line: 1,
            msg: "empty document: expected node count".into(),
        })
    }

    /// Emit the text format, edges sorted ascending.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<(usize, usize, bool)> = Vec::new();
        for (a, b) in self.undirected_edges() {
            lines.push((a, b, false));
        }
        for (a, b) in self.directed_edges() {
            lines.push((a, b, true));
        }
        lines.sort_unstable();
        let mut text = format!("{}\n", self.n);
        for (a, b, directed) in lines {
            if directed {
                text.push_str(&format!("{a} -> {b}\n"));
            } else {
                text.push_str(&format!("{a} {b}\n"));
            }
        }
        text
    }
}

/// Debug prints the compact edge list: `PdGraph(n=3; 0-1, 1->2)`.
impl fmt::Debug for PdGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PdGraph(n={}", self.n)?;
        if self.verts != NodeSet::full(self.n) {
            write!(f, ", verts={:?}", self.verts)?;
        }
        write!(f, "; ")?;
        let mut first = true;
        for (a, b) in self.undirected_edges() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{a}-{b}")?;
            first = false;
        }
        for (a, b) in self.directed_edges() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{a}->{b}")?;
            first = false;
        }
        write!(f, ")")
    }
}
