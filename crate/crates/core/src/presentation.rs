//! A fixed, deterministic computable presentation of the Henson graph H_n on
//! the natural numbers.
//!
//! Vertices are materialized one at a time. Vertex `v` is produced for the
//! next entry `A` of a fair requirement queue: if `A` is a set of existing
//! vertices that spans no K_{n-1}, the new vertex is joined to exactly `A`
//! among `0..v`, which witnesses the one-point extension requirement
//! `(A, [0, v) \ A)`. Otherwise the vertex is a filler with no edges to
//! earlier vertices. Adjacency between `i < j` is decided when `j` is created
//! and never revisited.
//!
//! The queue runs in rounds. Round `r` lists every finite set `S` with
//! `weight(S) = (max S + 1) + |S|^2 <= r`, ordered by weight and then
//! lexicographically. Each set therefore recurs in every later round, so every
//! requirement `(A, B)` with `A` K_{n-1}-free is met by infinitely many
//! vertices, and the extension search always terminates.

use itertools::Itertools;
use thiserror::Error;

use crate::graph::{clique_number, increasing_iso, is_in_t_n, restriction, FiniteGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("forbidden clique size must be at least 3, got {0}")]
    InvalidN(usize),
    #[error("vertex {0} lies in both A and B")]
    Overlap(usize),
    #[error("A spans a K_{0}")]
    CliqueInA(usize),
    #[error("target graph is not a finite connected K_{0}-free graph")]
    TargetNotInClass(usize),
    #[error("target graph has {actual} vertices, expected {expected}")]
    TargetSize { expected: usize, actual: usize },
    #[error("copy vertices are not strictly increasing")]
    NotIncreasing,
    #[error("copy is not order-isomorphic to the target prefix")]
    PrefixMismatch,
}

/// One-point extension requirement: a vertex adjacent to all of `a` and none of `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionRequirement {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub satisfied_by: Option<usize>,
}

impl ExtensionRequirement {
    pub fn new(a: Vec<usize>, b: Vec<usize>) -> Self {
        ExtensionRequirement { a, b, satisfied_by: None }
    }

    pub fn is_witness(&self, p: &Presentation, x: usize) -> bool {
        !self.a.contains(&x)
            && !self.b.contains(&x)
            && self.a.iter().all(|&v| p.adjacent_built(x, v))
            && self.b.iter().all(|&v| !p.adjacent_built(x, v))
    }
}

/// How a materialized vertex came about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexOrigin {
    /// Joined to exactly these earlier vertices.
    Witness(Vec<usize>),
    /// The queue entry was not usable when the vertex was created.
    Filler(Vec<usize>),
}

fn weight(set: &[usize]) -> usize {
    set.last().map_or(0, |&m| m + 1) + set.len() * set.len()
}

fn round_sets(round: usize) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    let mut size = 0;
    while size * size <= round {
        let bound = round - size * size;
        sets.extend((0..bound).combinations(size));
        size += 1;
    }
    sets.sort_by(|x, y| weight(x).cmp(&weight(y)).then_with(|| x.cmp(y)));
    sets
}

#[derive(Debug, Clone)]
struct RequirementQueue {
    round: usize,
    sets: Vec<Vec<usize>>,
    next: usize,
}

impl RequirementQueue {
    fn new() -> Self {
        RequirementQueue { round: 0, sets: round_sets(0), next: 0 }
    }

    fn pop(&mut self) -> &[usize] {
        while self.next >= self.sets.len() {
            self.round += 1;
            self.sets = round_sets(self.round);
            self.next = 0;
        }
        self.next += 1;
        &self.sets[self.next - 1]
    }
}

#[derive(Debug, Clone)]
pub struct Presentation {
    n: usize,
    back: Vec<Vec<u32>>,
    forward: Vec<Vec<u32>>,
    origin: Vec<VertexOrigin>,
    queue: RequirementQueue,
}

impl Presentation {
    pub fn new(n: usize) -> Result<Self, PresentationError> {
        if n < 3 {
            return Err(PresentationError::InvalidN(n));
        }
        Ok(Presentation {
            n,
            back: Vec::new(),
            forward: Vec::new(),
            origin: Vec::new(),
            queue: RequirementQueue::new(),
        })
    }

    /// The forbidden clique size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of materialized vertices.
    pub fn built_stage(&self) -> usize {
        self.back.len()
    }

    pub fn ensure_stage(&mut self, t: usize) {
        while self.back.len() < t {
            self.add_vertex();
        }
    }

    fn add_vertex(&mut self) {
        let v = self.back.len();
        let entry = self.queue.pop().to_vec();
        let usable = entry.last().is_none_or(|&m| m < v) && !self.spans_clique(&entry, self.n - 1);
        self.forward.push(Vec::new());
        if usable {
            for &a in &entry {
                self.forward[a].push(v as u32);
            }
            self.back.push(entry.iter().map(|&a| a as u32).collect());
            self.origin.push(VertexOrigin::Witness(entry));
        } else {
            self.back.push(Vec::new());
            self.origin.push(VertexOrigin::Filler(entry));
        }
    }

    fn spans_clique(&self, vertices: &[usize], size: usize) -> bool {
        if vertices.len() < size || vertices.last().is_some_and(|&m| m >= self.built_stage()) {
            return false;
        }
        clique_number(&FiniteGraph::from_fn(vertices.len(), |i, j| {
            self.adjacent_built(vertices[i], vertices[j])
        })) >= size
    }

    pub fn origin(&self, v: usize) -> &VertexOrigin {
        &self.origin[v]
    }

    /// The requirement vertex `v` was created to satisfy, if it is a witness.
    pub fn requirement_of(&self, v: usize) -> Option<ExtensionRequirement> {
        match &self.origin[v] {
            VertexOrigin::Witness(a) => Some(ExtensionRequirement {
                a: a.clone(),
                b: (0..v).filter(|u| !a.contains(u)).collect(),
                satisfied_by: Some(v),
            }),
            VertexOrigin::Filler(_) => None,
        }
    }

    /// Adjacency, materializing vertices as needed.
    pub fn adjacent(&mut self, i: usize, j: usize) -> bool {
        self.ensure_stage(i.max(j) + 1);
        self.adjacent_built(i, j)
    }

    /// Adjacency between two materialized vertices.
    ///
    /// Panics if either vertex has not been built yet.
    pub fn adjacent_built(&self, i: usize, j: usize) -> bool {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        assert!(hi < self.built_stage(), "vertex {hi} not materialized (built {})", self.built_stage());
        lo != hi && self.back[hi].binary_search(&(lo as u32)).is_ok()
    }

    /// `G(x) ∩ [0, m)`, sorted.
    pub fn neighbor_set_within(&mut self, x: usize, m: usize) -> Vec<usize> {
        self.ensure_stage(m.max(x + 1));
        self.neighbors_built(x, m)
    }

    /// Like [`Presentation::neighbor_set_within`] without materializing.
    pub fn neighbors_built(&self, x: usize, m: usize) -> Vec<usize> {
        assert!(x < self.built_stage() && m <= self.built_stage(), "neighbor query beyond built stage");
        self.back[x]
            .iter()
            .chain(&self.forward[x])
            .map(|&v| v as usize)
            .take_while(|&v| v < m)
            .collect()
    }

    /// Induced subgraph on `[0, m)`.
    pub fn restriction(&mut self, m: usize) -> FiniteGraph {
        self.ensure_stage(m);
        self.restriction_built(m)
    }

    pub fn restriction_built(&self, m: usize) -> FiniteGraph {
        assert!(m <= self.built_stage(), "restriction beyond built stage");
        let mut g = FiniteGraph::empty(m);
        for j in 0..m {
            for &i in &self.back[j] {
                g.add_edge(i as usize, j);
            }
        }
        g
    }

    fn check_extension_sets(&mut self, a: &[usize], b: &[usize]) -> Result<(), PresentationError> {
        if let Some(&v) = a.iter().find(|v| b.contains(v)) {
            return Err(PresentationError::Overlap(v));
        }
        let top = a.iter().chain(b).max().map_or(0, |&m| m + 1);
        self.ensure_stage(top);
        let mut sorted = a.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if self.spans_clique(&sorted, self.n - 1) {
            return Err(PresentationError::CliqueInA(self.n - 1));
        }
        Ok(())
    }

    /// Least `x > bound`, outside `a ∪ b`, adjacent to every vertex of `a`
    /// and to none of `b`.
    pub fn find_extension(&mut self, a: &[usize], b: &[usize], bound: usize) -> Result<usize, PresentationError> {
        self.check_extension_sets(a, b)?;
        Ok(self.search(a, b, bound, None).expect("unbounded extension search terminates"))
    }

    /// [`Presentation::find_extension`] restricted to the first `limit` vertices.
    pub fn find_extension_within(
        &mut self,
        a: &[usize],
        b: &[usize],
        bound: usize,
        limit: usize,
    ) -> Result<Option<usize>, PresentationError> {
        self.check_extension_sets(a, b)?;
        Ok(self.search(a, b, bound, Some(limit)))
    }

    fn qualifies(&self, a: &[usize], b: &[usize], x: usize) -> bool {
        !a.contains(&x)
            && !b.contains(&x)
            && a.iter().all(|&v| self.adjacent_built(x, v))
            && b.iter().all(|&v| !self.adjacent_built(x, v))
    }

    fn grow(&mut self, limit: Option<usize>) -> bool {
        let built = self.built_stage();
        let target = (built + (built / 2).max(1024)).min(limit.unwrap_or(usize::MAX));
        if target <= built {
            return false;
        }
        self.ensure_stage(target);
        true
    }

    fn search(&mut self, a: &[usize], b: &[usize], bound: usize, limit: Option<usize>) -> Option<usize> {
        let start = bound.checked_add(1)?;
        let Some(&anchor) = a.iter().min_by_key(|&&v| self.back[v].len() + self.forward[v].len()) else {
            let mut x = start;
            loop {
                if limit.is_some_and(|l| x >= l) {
                    return None;
                }
                self.ensure_stage(x + 1);
                if self.qualifies(a, b, x) {
                    return Some(x);
                }
                x += 1;
            }
        };
        if let Some(x) =
            self.back[anchor].iter().map(|&v| v as usize).find(|&x| x >= start && self.qualifies(a, b, x))
        {
            return Some(x);
        }
        let mut cursor = self.forward[anchor].partition_point(|&v| (v as usize) < start);
        loop {
            while cursor < self.forward[anchor].len() {
                let x = self.forward[anchor][cursor] as usize;
                cursor += 1;
                if x < start {
                    // Grown past the old end but not yet up to the bound.
                    continue;
                }
                if limit.is_some_and(|l| x >= l) {
                    return None;
                }
                if self.qualifies(a, b, x) {
                    return Some(x);
                }
            }
            if !self.grow(limit) {
                return None;
            }
        }
    }

    /// Least `x > bound`, `x > max(delta)`, with `delta ++ [x]` order-isomorphic
    /// to `gamma`.
    pub fn extend_copy(&mut self, delta: &[usize], gamma: &FiniteGraph, bound: usize) -> Result<usize, PresentationError> {
        let (pos, neg, lower) = self.extend_copy_sets(delta, gamma, bound)?;
        Ok(self.search(&pos, &neg, lower, None).expect("unbounded extension search terminates"))
    }

    /// [`Presentation::extend_copy`] restricted to the first `limit` vertices.
    pub fn extend_copy_within(
        &mut self,
        delta: &[usize],
        gamma: &FiniteGraph,
        bound: usize,
        limit: usize,
    ) -> Result<Option<usize>, PresentationError> {
        let (pos, neg, lower) = self.extend_copy_sets(delta, gamma, bound)?;
        Ok(self.search(&pos, &neg, lower, Some(limit)))
    }

    fn extend_copy_sets(
        &mut self,
        delta: &[usize],
        gamma: &FiniteGraph,
        bound: usize,
    ) -> Result<(Vec<usize>, Vec<usize>, usize), PresentationError> {
        let d = delta.len();
        if gamma.vertex_count() != d + 1 {
            return Err(PresentationError::TargetSize { expected: d + 1, actual: gamma.vertex_count() });
        }
        if !is_in_t_n(gamma, self.n) {
            return Err(PresentationError::TargetNotInClass(self.n));
        }
        if !delta.windows(2).all(|w| w[0] < w[1]) {
            return Err(PresentationError::NotIncreasing);
        }
        let prefix = restriction(gamma, d).expect("d < vertex count");
        if let Some(&top) = delta.last() {
            self.ensure_stage(top + 1);
        }
        if !increasing_iso(delta, |i, j| self.adjacent_built(i, j), &prefix) {
            return Err(PresentationError::PrefixMismatch);
        }
        let pos = (0..d).filter(|&i| gamma.has_edge(i, d)).map(|i| delta[i]).collect();
        let neg = (0..d).filter(|&i| !gamma.has_edge(i, d)).map(|i| delta[i]).collect();
        let lower = delta.last().map_or(bound, |&m| bound.max(m));
        Ok((pos, neg, lower))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_respects_bound_after_growth() {
        let mut fresh = Presentation::new(3).unwrap();
        assert!(fresh.find_extension(&[0], &[], 12).unwrap() > 12);
        let mut built = Presentation::new(3).unwrap();
        built.ensure_stage(12);
        assert!(built.find_extension(&[0], &[], 12).unwrap() > 12);
    }

    #[test]
    fn rejects_small_n() {
        assert_eq!(Presentation::new(2).unwrap_err(), PresentationError::InvalidN(2));
    }

    #[test]
    fn first_vertex_has_no_edges() {
        let mut p = Presentation::new(3).unwrap();
        p.ensure_stage(1);
        assert_eq!(p.built_stage(), 1);
        assert!(p.neighbor_set_within(0, 1).is_empty());
    }

    #[test]
    fn determinism_and_idempotence() {
        let mut p = Presentation::new(3).unwrap();
        let mut q = Presentation::new(3).unwrap();
        p.ensure_stage(100);
        q.ensure_stage(100);
        assert_eq!(p.restriction(100), q.restriction(100));
        p.ensure_stage(100);
        assert_eq!(p.built_stage(), 100);
        assert_eq!(p.restriction(100), q.restriction(100));
    }

    #[test]
    fn queue_rounds_are_weight_ordered() {
        let r = round_sets(6);
        assert_eq!(r[0], Vec::<usize>::new());
        assert_eq!(r[1], vec![0]);
        assert!(r.windows(2).all(|w| weight(&w[0]) <= weight(&w[1])));
        assert!(r.contains(&vec![0, 1]));
        assert!(!r.contains(&vec![0, 2]));
    }

    #[test]
    fn adjacency_is_symmetric_irreflexive_and_triangle_free() {
        let mut p = Presentation::new(3).unwrap();
        let g = p.restriction(50);
        for i in 0..50 {
            assert!(!p.adjacent(i, i));
            for j in 0..50 {
                assert_eq!(p.adjacent(i, j), p.adjacent(j, i));
            }
        }
        for (a, b) in g.edges() {
            for c in b + 1..50 {
                assert!(!(g.has_edge(a, c) && g.has_edge(b, c)), "triangle {a} {b} {c}");
            }
        }
    }

    #[test]
    fn neighbor_sets_are_independent_for_n3() {
        let mut p = Presentation::new(3).unwrap();
        assert!(p.neighbor_set_within(5, 0).is_empty());
        for x in 0..40 {
            let ns = p.neighbor_set_within(x, 300);
            assert!(!ns.contains(&x));
            for (i, &a) in ns.iter().enumerate() {
                for &b in &ns[i + 1..] {
                    assert!(!p.adjacent(a, b));
                }
            }
        }
    }

    #[test]
    fn find_extension_examples() {
        let mut p = Presentation::new(3).unwrap();
        assert_eq!(p.find_extension(&[], &[], 5).unwrap(), 6);
        let x = p.find_extension(&[0], &[], 0).unwrap();
        assert!(p.adjacent(x, 0));
        let witness = p.find_extension(&[0, 1], &[2], 0).unwrap();
        assert!(p.adjacent(witness, 0) && p.adjacent(witness, 1) && !p.adjacent(witness, 2));
        assert_eq!(p.find_extension(&[1], &[1], 0), Err(PresentationError::Overlap(1)));
    }

    #[test]
    fn find_extension_rejects_edge_in_a_for_n3() {
        let mut p = Presentation::new(3).unwrap();
        p.ensure_stage(200);
        let (a, b) = p.restriction(200).edges().next().expect("some edge");
        assert_eq!(p.find_extension(&[a, b], &[], 0), Err(PresentationError::CliqueInA(2)));
    }

    #[test]
    fn witnesses_record_their_requirement() {
        let mut p = Presentation::new(3).unwrap();
        p.ensure_stage(300);
        for v in 0..300 {
            if let Some(req) = p.requirement_of(v) {
                assert!(req.is_witness(&p, v));
            }
        }
        assert!((0..300).any(|v| matches!(p.origin(v), VertexOrigin::Witness(a) if a == &vec![0])));
    }

    #[test]
    fn extend_copy_examples() {
        let mut p = Presentation::new(3).unwrap();
        assert_eq!(p.extend_copy(&[], &FiniteGraph::empty(1), 9).unwrap(), 10);
        let x = p.extend_copy(&[0], &FiniteGraph::complete(2), 0).unwrap();
        let least = *p.neighbor_set_within(0, x + 1).iter().find(|&&v| v > 0).unwrap();
        assert_eq!(x, least);
    }

    #[test]
    fn extend_copy_has_many_witnesses() {
        let mut p = Presentation::new(3).unwrap();
        let adjacent01 = p.adjacent(0, 1);
        // P_3 in an order whose first two vertices match {0, 1}.
        let gamma = if adjacent01 {
            FiniteGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
        } else {
            FiniteGraph::from_edges(3, &[(0, 2), (1, 2)]).unwrap()
        };
        let mut bound = 0;
        let mut seen = Vec::new();
        for _ in 0..5 {
            let x = p.extend_copy(&[0, 1], &gamma, bound).unwrap();
            assert!(increasing_iso(&[0, 1, x], |i, j| p.adjacent_built(i, j), &gamma));
            seen.push(x);
            bound = x;
        }
        seen.dedup();
        assert_eq!(seen.len(), 5);
    }

    #[test]
    fn extend_copy_rejects_bad_input() {
        let mut p = Presentation::new(3).unwrap();
        let e = p.extend_copy(&[0], &FiniteGraph::empty(2), 0).unwrap_err();
        assert_eq!(e, PresentationError::TargetNotInClass(3));
        let e = p.extend_copy(&[0], &FiniteGraph::complete(3), 0).unwrap_err();
        assert_eq!(e, PresentationError::TargetSize { expected: 2, actual: 3 });
        let e = p.extend_copy(&[1, 0], &FiniteGraph::path(3), 0).unwrap_err();
        assert_eq!(e, PresentationError::NotIncreasing);
        let adjacent01 = p.adjacent(0, 1);
        let wrong = if adjacent01 { FiniteGraph::from_edges(3, &[(0, 2), (1, 2)]) } else { Ok(FiniteGraph::path(3)) };
        assert_eq!(p.extend_copy(&[0, 1], &wrong.unwrap(), 0).unwrap_err(), PresentationError::PrefixMismatch);
    }
}
