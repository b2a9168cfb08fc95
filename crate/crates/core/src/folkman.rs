//! Vertex-Folkman witnesses: K_n-free connected graphs in which every
//! `k`-partition of the vertices leaves some block containing a K_{n-1}.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{bit_clear, bit_set, clique_number, induced_embedding_exists, is_in_t_n, FiniteGraph};
use crate::presentation::Presentation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FolkmanError {
    #[error("no witness for n = {n}, k = {k} on at most {max_vertices} vertices")]
    Exhausted { n: usize, k: usize, max_vertices: usize },
    #[error("invalid parameters n = {n}, k = {k} (need n >= 3, k >= 1)")]
    InvalidParameters { n: usize, k: usize },
}

/// Where a certificate's graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSource {
    /// First success of the canonical enumeration.
    Enumerated,
    /// Iterated Mycielski construction (n = 3 only).
    Mycielski,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolkmanCertificate {
    pub graph: FiniteGraph,
    pub n: usize,
    pub k: usize,
    /// Search nodes visited when the partition property was checked on `graph`.
    pub partitions_checked: u64,
    /// Candidate graphs tested before the witness was found.
    pub candidates_examined: u64,
    pub source: WitnessSource,
}

/// Outcome of the exhaustive partition search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSearch {
    pub arrows: bool,
    pub nodes: u64,
}

/// Whether every map from the vertices of `g` into `k` blocks has a block
/// containing a K_{n-1}.
pub fn partition_ramsey_check(g: &FiniteGraph, n: usize, k: usize) -> bool {
    partition_search(g, n, k).arrows
}

/// Depth-first search for a partition with every block K_{n-1}-free. Vertex 0
/// is fixed to block 0; a branch is cut as soon as a block gains a K_{n-1}.
pub fn partition_search(g: &FiniteGraph, n: usize, k: usize) -> PartitionSearch {
    assert!(n >= 3 && k >= 1, "partition search needs n >= 3 and k >= 1");
    let mut blocks = vec![vec![0u64; g.words()]; k];
    let mut nodes = 0;
    let found = assign(g, n - 1, 0, &mut blocks, &mut nodes);
    PartitionSearch { arrows: !found, nodes }
}

fn assign(g: &FiniteGraph, clique: usize, v: usize, blocks: &mut [Vec<u64>], nodes: &mut u64) -> bool {
    if v == g.vertex_count() {
        return true;
    }
    let choices = if v == 0 { 1 } else { blocks.len() };
    for b in 0..choices {
        *nodes += 1;
        let inside: Vec<u64> = blocks[b].iter().zip(g.row(v)).map(|(x, y)| x & y).collect();
        if g.set_contains_clique(&inside, clique - 1) {
            continue;
        }
        bit_set(&mut blocks[b], v);
        if assign(g, clique, v + 1, blocks, nodes) {
            return true;
        }
        bit_clear(&mut blocks[b], v);
    }
    false
}

/// Graph on `vertices` vertices whose upper-triangular adjacency bitstring,
/// read pair by pair `(0,1), (0,2), ..., (1,2), ...`, is the binary expansion of
/// `code` with the first pair as the most significant bit.
pub fn graph_from_code(vertices: usize, code: u64) -> FiniteGraph {
    let pairs = vertices * vertices.saturating_sub(1) / 2;
    let mut g = FiniteGraph::empty(vertices);
    let mut bit = pairs;
    for i in 0..vertices {
        for j in i + 1..vertices {
            bit -= 1;
            if code >> bit & 1 == 1 {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// First connected K_n-free graph, by vertex count and then adjacency
/// bitstring, with the `k`-partition property.
pub fn folkman_witness(n: usize, k: usize, max_vertices: usize) -> Result<FolkmanCertificate, FolkmanError> {
    if n < 3 || k < 1 {
        return Err(FolkmanError::InvalidParameters { n, k });
    }
    let mut examined = 0u64;
    for v in 1..=max_vertices {
        let pairs = v * (v - 1) / 2;
        assert!(pairs < 64, "enumeration beyond 11 vertices is not supported");
        let hit = (0..1u64 << pairs).into_par_iter().find_first(|&code| {
            let g = graph_from_code(v, code);
            g.is_connected() && !g.contains_clique(n) && partition_ramsey_check(&g, n, k)
        });
        match hit {
            Some(code) => {
                let graph = graph_from_code(v, code);
                let search = partition_search(&graph, n, k);
                return Ok(FolkmanCertificate {
                    graph,
                    n,
                    k,
                    partitions_checked: search.nodes,
                    candidates_examined: examined + code + 1,
                    source: WitnessSource::Enumerated,
                });
            }
            None => examined += 1 << pairs,
        }
    }
    Err(FolkmanError::Exhausted { n, k, max_vertices })
}

/// Mycielskian: vertices `0..m` copy `g`, `m..2m` are shadows joined to the
/// neighbors of their originals, and `2m` is joined to every shadow.
pub fn mycielskian(g: &FiniteGraph) -> FiniteGraph {
    let m = g.vertex_count();
    let mut out = FiniteGraph::empty(2 * m + 1);
    for (a, b) in g.edges() {
        out.add_edge(a, b);
        out.add_edge(a, m + b);
        out.add_edge(b, m + a);
    }
    for v in 0..m {
        out.add_edge(m + v, 2 * m);
    }
    out
}

/// Triangle-free graph of chromatic number `k + 1`: K_2 for `k = 1`, then
/// repeated Mycielskians (C_5, the Grötzsch graph, ...). Every `k`-partition
/// of it has a block containing an edge.
pub fn mycielski_witness(k: usize) -> FolkmanCertificate {
    assert!(k >= 1, "k must be positive");
    let mut g = FiniteGraph::complete(2);
    for _ in 1..k {
        g = mycielskian(&g);
    }
    FolkmanCertificate {
        graph: g,
        n: 3,
        k,
        partitions_checked: 0,
        candidates_examined: 0,
        source: WitnessSource::Mycielski,
    }
}

/// Whether `g` has no induced copy inside the union of the neighbor sets of
/// `centers`, taken within `[0, window)`.
pub fn neighbor_cover_obstruction_check(g: &FiniteGraph, p: &mut Presentation, centers: &[usize], window: usize) -> bool {
    let top = centers.iter().map(|c| c + 1).max().unwrap_or(0).max(window);
    p.ensure_stage(top);
    let host = p.restriction_built(window);
    let mut union: Vec<usize> = centers.iter().flat_map(|&c| p.neighbors_built(c, window)).collect();
    union.sort_unstable();
    union.dedup();
    !induced_embedding_exists(g, &host, &union)
}

/// Whether each neighbor set of `centers` within the window is K_{n-1}-free.
pub fn neighbor_sets_clique_free(p: &mut Presentation, centers: &[usize], window: usize) -> bool {
    let n = p.n();
    centers.iter().all(|&c| {
        let ns = p.neighbor_set_within(c, window);
        clique_number(&FiniteGraph::from_fn(ns.len(), |i, j| p.adjacent_built(ns[i], ns[j]))) < n - 1
    })
}

/// Re-checks the certificate invariants from scratch.
pub fn certificate_holds(cert: &FolkmanCertificate) -> bool {
    is_in_t_n(&cert.graph, cert.n) && partition_ramsey_check(&cert.graph, cert.n, cert.k)
}
