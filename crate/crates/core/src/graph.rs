//! Finite simple graphs on dense vertex indices `0..n`.
//!
//! Adjacency is stored as one bitset row per vertex, which keeps the clique
//! and embedding searches cheap for the small graphs the workbench handles
//! (Folkman candidates, neighbor-set windows of a few hundred vertices).

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("restriction size {m} exceeds vertex count {n}")]
    RestrictionOutOfRange { m: usize, n: usize },
    #[error("graph is empty")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn bit_test(set: &[u64], v: usize) -> bool {
    set[v / 64] >> (v % 64) & 1 == 1
}

#[inline]
pub(crate) fn bit_set(set: &mut [u64], v: usize) {
    set[v / 64] |= 1 << (v % 64);
}

#[inline]
pub(crate) fn bit_clear(set: &mut [u64], v: usize) {
    set[v / 64] &= !(1 << (v % 64));
}

pub(crate) fn bits_iter(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                None
            } else {
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            }
        })
    })
}

fn is_zero(set: &[u64]) -> bool {
    set.iter().all(|&w| w == 0)
}

/// Simple undirected graph with a symmetric, irreflexive adjacency matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteGraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl FiniteGraph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        FiniteGraph { n, words, bits: vec![0; n * words] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// Cycle `0-1-...-(n-1)-0`; for `n < 3` this is just the path.
    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    /// Builds a graph from an adjacency predicate evaluated on `i < j`.
    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for j in 1..n {
            for i in 0..j {
                if adjacent(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Panics on a self-loop or an out-of-range endpoint.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "self-loop at vertex {a}");
        assert!(a < self.n && b < self.n, "edge ({a}, {b}) out of range");
        let w = self.words;
        bit_set(&mut self.bits[a * w..(a + 1) * w], b);
        bit_set(&mut self.bits[b * w..(b + 1) * w], a);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        let w = self.words;
        bit_clear(&mut self.bits[a * w..(a + 1) * w], b);
        bit_clear(&mut self.bits[b * w..(b + 1) * w], a);
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        bit_test(self.row(a), b)
    }

    /// Neighbor bitset of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits_iter(self.row(v))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, ordered by `i` then `j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Induced subgraph on `vertices`, relabelled so that `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> FiniteGraph {
        FiniteGraph::from_fn(vertices.len(), |i, j| self.has_edge(vertices[i], vertices[j]))
    }

    /// Relabels so that new vertex `i` is old vertex `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> FiniteGraph {
        assert_eq!(order.len(), self.n, "permutation length mismatch");
        self.induced(order)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![0u64; self.words];
        let mut frontier = vec![0u64; self.words];
        bit_set(&mut seen, 0);
        bit_set(&mut frontier, 0);
        while !is_zero(&frontier) {
            let mut next = vec![0u64; self.words];
            for v in bits_iter(&frontier) {
                for (n, r) in next.iter_mut().zip(self.row(v)) {
                    *n |= r;
                }
            }
            for (n, s) in next.iter_mut().zip(seen.iter_mut()) {
                *n &= !*s;
                *s |= *n;
            }
            frontier = next;
        }
        bits_iter(&seen).count() == self.n
    }

    /// Whether the vertices in `set` span a clique on `size` vertices.
    pub(crate) fn set_contains_clique(&self, set: &[u64], size: usize) -> bool {
        if size == 0 {
            return true;
        }
        let count: usize = set.iter().map(|w| w.count_ones() as usize).sum();
        if count < size {
            return false;
        }
        if size == 1 {
            return true;
        }
        let mut rest = set.to_vec();
        for v in bits_iter(set) {
            bit_clear(&mut rest, v);
            let sub: Vec<u64> = rest.iter().zip(self.row(v)).map(|(a, b)| a & b).collect();
            if self.set_contains_clique(&sub, size - 1) {
                return true;
            }
        }
        false
    }

    pub(crate) fn all_vertices(&self) -> Vec<u64> {
        let mut set = vec![0u64; self.words];
        for v in 0..self.n {
            bit_set(&mut set, v);
        }
        set
    }

    pub fn contains_clique(&self, size: usize) -> bool {
        self.set_contains_clique(&self.all_vertices(), size)
    }
}

impl fmt::Debug for FiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGraph({}; ", self.n)?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

/// Assignment of every vertex of a graph to one of `k` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    blocks: usize,
    block_index: Vec<usize>,
}

impl VertexPartition {
    pub fn new(blocks: usize, block_index: Vec<usize>) -> Option<Self> {
        block_index.iter().all(|&b| b < blocks).then_some(VertexPartition { blocks, block_index })
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_index[v]
    }

    pub fn members(&self, block: usize) -> Vec<usize> {
        (0..self.block_index.len()).filter(|&v| self.block_index[v] == block).collect()
    }
}

/// Size of the largest clique; 0 for the graph with no vertices.
///
/// Branch and bound where the bound at each node is a greedy colouring of the
/// remaining candidates.
pub fn clique_number(g: &FiniteGraph) -> usize {
    let mut best = 0;
    expand(g, g.all_vertices(), 0, &mut best);
    best
}

fn first_bit(bits: &[u64]) -> Option<usize> {
    bits.iter().position(|&w| w != 0).map(|i| i * 64 + bits[i].trailing_zeros() as usize)
}

fn greedy_color_order(g: &FiniteGraph, cand: &[u64]) -> Vec<(usize, usize)> {
    let mut uncolored = cand.to_vec();
    let mut order = Vec::new();
    let mut color = 0;
    while !is_zero(&uncolored) {
        color += 1;
        let mut q = uncolored.clone();
        while let Some(v) = first_bit(&q) {
            bit_clear(&mut uncolored, v);
            bit_clear(&mut q, v);
            for (qw, rw) in q.iter_mut().zip(g.row(v)) {
                *qw &= !rw;
            }
            order.push((v, color));
        }
    }
    order
}

fn expand(g: &FiniteGraph, mut cand: Vec<u64>, size: usize, best: &mut usize) {
    let order = greedy_color_order(g, &cand);
    for &(v, bound) in order.iter().rev() {
        if size + bound <= *best {
            return;
        }
        let next: Vec<u64> = cand.iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
        if is_zero(&next) {
            *best = (*best).max(size + 1);
        } else {
            expand(g, next, size + 1, best);
        }
        bit_clear(&mut cand, v);
    }
}

/// Membership in the class of finite K_n-free connected graphs.
pub fn is_in_t_n(g: &FiniteGraph, n: usize) -> bool {
    !g.is_empty() && g.is_connected() && clique_number(g) < n
}

/// Order-isomorphism: the increasing enumeration of `host_vertices` maps onto
/// `pattern` preserving adjacency and non-adjacency.
pub fn increasing_iso(
    host_vertices: &[usize],
    mut host_adjacent: impl FnMut(usize, usize) -> bool,
    pattern: &FiniteGraph,
) -> bool {
    if host_vertices.len() != pattern.vertex_count() {
        return false;
    }
    debug_assert!(host_vertices.windows(2).all(|w| w[0] < w[1]), "host vertices must be increasing");
    for j in 1..host_vertices.len() {
        for i in 0..j {
            if host_adjacent(host_vertices[i], host_vertices[j]) != pattern.has_edge(i, j) {
                return false;
            }
        }
    }
    true
}

/// The induced subgraph on the first `m` vertices.
pub fn restriction(g: &FiniteGraph, m: usize) -> Result<FiniteGraph, GraphError> {
    if m > g.vertex_count() {
        return Err(GraphError::RestrictionOutOfRange { m, n: g.vertex_count() });
    }
    Ok(FiniteGraph::from_fn(m, |i, j| g.has_edge(i, j)))
}

/// BFS order from vertex 0 with ascending neighbor visits; every vertex after
/// the first is adjacent to an earlier one.
pub fn connect_order(g: &FiniteGraph) -> Result<Vec<usize>, GraphError> {
    if g.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for u in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    if order.len() != g.vertex_count() {
        return Err(GraphError::Disconnected);
    }
    Ok(order)
}

/// Whether an order satisfies the connect-order property for `g`.
pub fn is_connect_order(g: &FiniteGraph, order: &[usize]) -> bool {
    order.len() == g.vertex_count()
        && order.iter().enumerate().skip(1).all(|(i, &v)| order[..i].iter().any(|&u| g.has_edge(u, v)))
}

/// Whether `pattern` is an induced subgraph of `host` using only vertices in
/// `allowed`. Not order-constrained.
pub fn induced_embedding_exists(pattern: &FiniteGraph, host: &FiniteGraph, allowed: &[usize]) -> bool {
    let p = pattern.vertex_count();
    if p == 0 {
        return true;
    }
    let words = host.words();
    let mut allowed_set = vec![0u64; words];
    for &v in allowed {
        if v < host.vertex_count() {
            bit_set(&mut allowed_set, v);
        }
    }
    if bits_iter(&allowed_set).count() < p {
        return false;
    }

    // Prune host vertices whose degree inside `allowed` is below the pattern's
    // minimum degree.
    let min_degree = (0..p).map(|v| pattern.degree(v)).min().unwrap_or(0);
    for v in bits_iter(&allowed_set.clone()).collect::<Vec<_>>() {
        let d: usize = host.row(v).iter().zip(&allowed_set).map(|(a, b)| (a & b).count_ones() as usize).sum();
        if d < min_degree {
            bit_clear(&mut allowed_set, v);
        }
    }

    let order = search_order(pattern);
    let degrees_in_allowed: Vec<usize> = (0..host.vertex_count())
        .map(|v| host.row(v).iter().zip(&allowed_set).map(|(a, b)| (a & b).count_ones() as usize).sum())
        .collect();
    let mut image = vec![usize::MAX; p];
    let mut used = vec![0u64; words];
    embed(pattern, host, &order, 0, &allowed_set, &degrees_in_allowed, &mut image, &mut used)
}

fn search_order(pattern: &FiniteGraph) -> Vec<usize> {
    let p = pattern.vertex_count();
    let mut placed = vec![false; p];
    let mut order = Vec::with_capacity(p);
    for _ in 0..p {
        let next = (0..p)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = order.iter().filter(|&&u| pattern.has_edge(u, v)).count();
                (links, pattern.degree(v), std::cmp::Reverse(v))
            })
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }
    order
}

#[allow(clippy::too_many_arguments)]
fn embed(
    pattern: &FiniteGraph,
    host: &FiniteGraph,
    order: &[usize],
    depth: usize,
    allowed: &[u64],
    degrees: &[usize],
    image: &mut [usize],
    used: &mut [u64],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let mut cand: Vec<u64> = allowed.iter().zip(used.iter()).map(|(a, u)| a & !u).collect();
    for &u in &order[..depth] {
        let row = host.row(image[u]);
        if pattern.has_edge(u, v) {
            cand.iter_mut().zip(row).for_each(|(c, r)| *c &= r);
        } else {
            cand.iter_mut().zip(row).for_each(|(c, r)| *c &= !r);
        }
    }
    let need = pattern.degree(v);
    for w in bits_iter(&cand).collect::<Vec<_>>() {
        if degrees[w] < need {
            continue;
        }
        image[v] = w;
        bit_set(used, w);
        if embed(pattern, host, order, depth + 1, allowed, degrees, image, used) {
            return true;
        }
        bit_clear(used, w);
    }
    image[v] = usize::MAX;
    false
}
