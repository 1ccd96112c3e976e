//! Undirected simple graphs and the structural queries the simulator needs.
//!
//! [`Graph`] stores adjacency in compressed sparse rows with every neighbour
//! list sorted. The engine only ever talks to a [`Topology`], which lets the
//! complete graph stay implicit: `K_n` for `n = 2^14` would otherwise need a
//! gigabyte of adjacency.

mod generate;
mod io;
mod spectral;

use std::collections::VecDeque;

pub use generate::{delete_random, generate, generate_network, Family, FamilySpec};
pub use spectral::{
    adjacency_spectrum, spectral_profile, spectral_profile_with_threshold, SpectralMethod,
    SpectralProfile, EXACT_SPECTRUM_THRESHOLD,
};

use crate::error::{Error, Result};

/// Neighbourhood access used by the protocol engine.
pub trait Topology: Sync {
    fn vertex_count(&self) -> usize;

    fn degree(&self, v: usize) -> usize;

    /// The `i`-th neighbour of `v`, for `i < degree(v)`.
    fn neighbor(&self, v: usize, i: usize) -> usize;

    /// Number of neighbours of `v` marked in `mask`; `marked` is the total
    /// number of marked vertices.
    fn neighbors_in(&self, v: usize, mask: &[bool], marked: usize) -> usize {
        let _ = marked;
        (0..self.degree(v))
            .filter(|&i| mask[self.neighbor(v, i)])
            .count()
    }

    fn min_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .min()
            .unwrap_or(0)
    }

    fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }
}

/// Immutable simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        check_order(n)?;
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge at vertex {v}")));
            }
        }
        Ok(Self::from_sorted_adjacency(adjacency))
    }

    /// Adjacency lists must already be symmetric and free of loops and
    /// duplicates; they are sorted here.
    pub(crate) fn from_adjacency(mut adjacency: Vec<Vec<u32>>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let g = Self::from_sorted_adjacency(adjacency);
        debug_assert!(g.validate().is_ok());
        g
    }

    fn from_sorted_adjacency(adjacency: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let total = adjacency.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        for list in adjacency {
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    pub fn complete(n: usize) -> Result<Self> {
        check_order(n)?;
        let adjacency = (0..n)
            .map(|v| (0..n as u32).filter(|&u| u as usize != v).collect())
            .collect();
        Ok(Self::from_sorted_adjacency(adjacency))
    }

    /// `K_{1,n-1}` with centre 0.
    pub fn star(n: usize) -> Result<Self> {
        check_order(n)?;
        Self::from_edges(n, (1..n).map(|leaf| (0, leaf)))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSpec(format!("cycle needs n >= 3, got {n}")));
        }
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Checks every structural invariant: sorted lists, no loops or
    /// duplicates, symmetry.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        // Visiting v in increasing order consumes each sorted list front to
        // back, so symmetry is a cursor walk rather than a search.
        let mut cursor = vec![0usize; n];
        for v in 0..n {
            let list = self.neighbors(v);
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidGraph(format!(
                        "adjacency of {v} not strictly increasing"
                    )));
                }
            }
            for &u in list {
                let u = u as usize;
                if u >= n {
                    return Err(Error::VertexOutOfRange { vertex: u, n });
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop at {v}")));
                }
                if self.neighbors(u).get(cursor[u]) != Some(&(v as u32)) {
                    return Err(Error::InvalidGraph(format!("edge {v}->{u} not symmetric")));
                }
                cursor[u] += 1;
            }
        }
        if let Some(v) = (0..n).find(|&v| cursor[v] != self.degree(v)) {
            return Err(Error::InvalidGraph(format!("adjacency of {v} not symmetric")));
        }
        if !self.neighbors.len().is_multiple_of(2) {
            return Err(Error::InvalidGraph("odd degree sum".into()));
        }
        Ok(())
    }
}

impl Topology for Graph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn degree(&self, v: usize) -> usize {
        Graph::degree(self, v)
    }

    #[inline]
    fn neighbor(&self, v: usize, i: usize) -> usize {
        self.neighbors[self.offsets[v] + i] as usize
    }

    fn neighbors_in(&self, v: usize, mask: &[bool], _marked: usize) -> usize {
        self.neighbors(v).iter().filter(|&&u| mask[u as usize]).count()
    }
}

/// `K_n` without stored adjacency. Neighbour `i` of `v` is `i` if `i < v`,
/// else `i + 1`, which matches the sorted order of the explicit graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompleteGraph {
    n: usize,
}

impl CompleteGraph {
    pub fn new(n: usize) -> Result<Self> {
        check_order(n)?;
        Ok(Self { n })
    }
}

impl Topology for CompleteGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn degree(&self, _v: usize) -> usize {
        self.n - 1
    }

    #[inline]
    fn neighbor(&self, v: usize, i: usize) -> usize {
        if i < v {
            i
        } else {
            i + 1
        }
    }

    fn neighbors_in(&self, v: usize, mask: &[bool], marked: usize) -> usize {
        marked - usize::from(mask[v])
    }

    fn min_degree(&self) -> usize {
        self.n - 1
    }

    fn max_degree(&self) -> usize {
        self.n - 1
    }
}

/// A graph as handed to the engine: either implicit `K_n` or explicit.
#[derive(Clone, Debug)]
pub enum Network {
    Complete(CompleteGraph),
    Explicit(Graph),
}

impl Network {
    /// Materialises the adjacency (expensive for large implicit `K_n`).
    pub fn to_graph(&self) -> Result<Graph> {
        match self {
            Network::Complete(k) => Graph::complete(k.n),
            Network::Explicit(g) => Ok(g.clone()),
        }
    }

    pub fn as_explicit(&self) -> Option<&Graph> {
        match self {
            Network::Explicit(g) => Some(g),
            Network::Complete(_) => None,
        }
    }
}

impl From<Graph> for Network {
    fn from(g: Graph) -> Self {
        Network::Explicit(g)
    }
}

impl Topology for Network {
    fn vertex_count(&self) -> usize {
        match self {
            Network::Complete(k) => k.vertex_count(),
            Network::Explicit(g) => g.vertex_count(),
        }
    }

    fn degree(&self, v: usize) -> usize {
        match self {
            Network::Complete(k) => k.degree(v),
            Network::Explicit(g) => Topology::degree(g, v),
        }
    }

    #[inline]
    fn neighbor(&self, v: usize, i: usize) -> usize {
        match self {
            Network::Complete(k) => k.neighbor(v, i),
            Network::Explicit(g) => g.neighbor(v, i),
        }
    }

    fn neighbors_in(&self, v: usize, mask: &[bool], marked: usize) -> usize {
        match self {
            Network::Complete(k) => k.neighbors_in(v, mask, marked),
            Network::Explicit(g) => g.neighbors_in(v, mask, marked),
        }
    }

    fn min_degree(&self) -> usize {
        match self {
            Network::Complete(k) => k.min_degree(),
            Network::Explicit(g) => g.min_degree(),
        }
    }

    fn max_degree(&self) -> usize {
        match self {
            Network::Complete(k) => k.max_degree(),
            Network::Explicit(g) => g.max_degree(),
        }
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSpec("graph needs at least one vertex".into()));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidSpec(format!("n = {n} exceeds u32 indexing")));
    }
    Ok(())
}

/// Membership mask for `set`, rejecting out-of-range and repeated vertices.
pub(crate) fn vertex_mask(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if std::mem::replace(&mut mask[v], true) {
            return Err(Error::InvalidVertexSet(format!("vertex {v} repeated")));
        }
    }
    Ok(mask)
}

/// Number of edges with exactly one endpoint in `set`.
pub fn edge_boundary<T: Topology + ?Sized>(g: &T, set: &[usize]) -> Result<u64> {
    let mask = vertex_mask(g.vertex_count(), set)?;
    Ok(set
        .iter()
        .map(|&v| (g.degree(v) - g.neighbors_in(v, &mask, set.len())) as u64)
        .sum())
}

/// `|e(S, V∖S) − Δ·|S|·(n−|S|)/n|` with `Δ` the maximum degree.
pub fn mixing_deviation<T: Topology + ?Sized>(g: &T, set: &[usize]) -> Result<f64> {
    let n = g.vertex_count();
    if set.is_empty() || set.len() >= n {
        return Err(Error::InvalidVertexSet(format!(
            "mixing deviation needs 1 <= |S| <= n-1, got |S| = {} with n = {n}",
            set.len()
        )));
    }
    let boundary = edge_boundary(g, set)? as f64;
    let s = set.len() as f64;
    let expected = g.max_degree() as f64 * s * (n as f64 - s) / n as f64;
    Ok((boundary - expected).abs())
}

/// Breadth-first reachability from vertex 0.
pub fn is_connected<T: Topology + ?Sized>(g: &T) -> bool {
    let n = g.vertex_count();
    if n <= 1 {
        return true;
    }
    if g.min_degree() == n - 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for i in 0..g.degree(v) {
            let u = g.neighbor(v, i);
            if !seen[u] {
                seen[u] = true;
                reached += 1;
                queue.push_back(u);
            }
        }
    }
    reached == n
}
