//! The priority construction of a computable 2-colouring of the presentation
//! with no homogeneous set enumerated by any roster stream.
//!
//! Each stream `W_e` gives two requirements, one per colour: priority `2e`
//! watches the red part of `W_e` and priority `2e + 1` the blue part.

use std::collections::HashMap;

use thiserror::Error;

use crate::adversary::{color_split, AdversaryError, AdversaryStream, Enumeration, Roster, StageView};
use crate::color::Color;
use crate::folkman::{folkman_witness, mycielski_witness, FolkmanError};
use crate::graph::{connect_order, increasing_iso, restriction, FiniteGraph};
use crate::graph6::encode_graph6;
use crate::ledger::ReservationLedger;
use crate::presentation::{Presentation, PresentationError};
use crate::trace::{Trace, TraceEvent};

/// Largest vertex count tried by the exhaustive witness search before the
/// catalog falls back to a constructed witness.
pub const DEFAULT_ENUMERATION_CAP: usize = 6;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("no target graph for requirement {requirement} at stage {stage}: {source}")]
    Target { stage: usize, requirement: usize, source: FolkmanError },
    #[error("target for {parts} parts has {vertices} vertices, too many for the trace format")]
    TargetTooLarge { parts: usize, vertices: usize },
    #[error("invariant violated at stage {stage}: {message}")]
    Invariant { stage: usize, message: String, trace: Box<Trace> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Follower {
    pub vertex: usize,
    /// Stage at which the vertex entered the split stream.
    pub enumerated_at: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    /// In connect order.
    pub graph: FiniteGraph,
    pub k_at_choice: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementState {
    pub priority: usize,
    pub color: Color,
    pub followers: Vec<Follower>,
    pub target: Option<Target>,
    pub last_injury_stage: Option<usize>,
    pub active: bool,
}

impl RequirementState {
    pub fn new(priority: usize) -> Self {
        RequirementState {
            priority,
            color: requirement_color(priority),
            followers: Vec::new(),
            target: None,
            last_injury_stage: None,
            active: false,
        }
    }

    /// Index of the stream this requirement watches.
    pub fn adversary(&self) -> usize {
        self.priority / 2
    }

    pub fn follower_vertices(&self) -> Vec<usize> {
        self.followers.iter().map(|f| f.vertex).collect()
    }

    fn injure(&mut self, stage: usize) {
        self.followers.clear();
        self.target = None;
        self.last_injury_stage = Some(stage);
        self.active = false;
    }
}

pub fn requirement_color(priority: usize) -> Color {
    if priority.is_multiple_of(2) {
        Color::Red
    } else {
        Color::Blue
    }
}

/// Whether `r` may act at stage `s`, given the history of its split stream.
pub fn is_active(r: &RequirementState, s: usize, split: &[Enumeration]) -> bool {
    r.adversary() <= s
        && match r.last_injury_stage {
            None => !split.is_empty(),
            Some(t) => split.last().is_some_and(|e| e.stage > t),
        }
}

/// Target graphs by number of parts, in connect order.
#[derive(Debug, Clone)]
pub struct TargetCatalog {
    n: usize,
    enumeration_cap: usize,
    cache: HashMap<usize, FiniteGraph>,
}

impl TargetCatalog {
    pub fn new(n: usize) -> Self {
        Self::with_cap(n, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(n: usize, enumeration_cap: usize) -> Self {
        TargetCatalog { n, enumeration_cap, cache: HashMap::new() }
    }

    /// A K_n-free graph every `parts`-partition of which has a block with a
    /// K_{n-1}: the first enumerated one when the search cap reaches it, else
    /// (for n = 3) an iterated Mycielskian.
    pub fn graph(&mut self, parts: usize) -> Result<&FiniteGraph, FolkmanError> {
        if !self.cache.contains_key(&parts) {
            let cert = match folkman_witness(self.n, parts, self.enumeration_cap) {
                Ok(c) => c,
                Err(FolkmanError::Exhausted { .. }) if self.n == 3 => mycielski_witness(parts),
                Err(e) => return Err(e),
            };
            let order = connect_order(&cert.graph).expect("witnesses are connected");
            self.cache.insert(parts, cert.graph.permuted(&order));
        }
        Ok(&self.cache[&parts])
    }
}

/// Sets the target of `r`, which must have a follower and no target.
pub fn choose_target<'a>(
    r: &'a mut RequirementState,
    k: usize,
    catalog: &mut TargetCatalog,
) -> Result<&'a Target, FolkmanError> {
    assert!(!r.followers.is_empty() && r.target.is_none(), "target chosen out of turn");
    let graph = catalog.graph(k + 1)?.clone();
    Ok(r.target.insert(Target { graph, k_at_choice: k }))
}

#[derive(Debug)]
pub struct RunOutput {
    /// `c(0), ..., c(stages)`.
    pub coloring: Vec<Color>,
    pub trace: Trace,
    pub requirements: Vec<RequirementState>,
    pub ledger: ReservationLedger,
}

/// The construction, advanced one stage at a time.
#[derive(Debug)]
pub struct Construction {
    stages: usize,
    presentation: Presentation,
    splits: Vec<AdversaryStream>,
    requirements: Vec<RequirementState>,
    /// Per requirement, the prefix of its split history already rejected
    /// against the current followers.
    scanned: Vec<usize>,
    ledger: ReservationLedger,
    colors: Vec<Color>,
    trace: Trace,
    catalog: TargetCatalog,
}

impl Construction {
    pub fn new(n: usize, roster: &Roster, stages: usize) -> Result<Self, RunError> {
        let mut presentation = Presentation::new(n)?;
        presentation.ensure_stage(stages + 1);
        let splits: Vec<AdversaryStream> = roster
            .streams()
            .iter()
            .flat_map(|s| [color_split(s, Color::Red), color_split(s, Color::Blue)])
            .collect();
        let requirements = (0..splits.len()).map(RequirementState::new).collect();
        Ok(Construction {
            stages,
            presentation,
            scanned: vec![0; splits.len()],
            splits,
            requirements,
            ledger: ReservationLedger::new(),
            colors: Vec::with_capacity(stages + 1),
            trace: Trace::new(n, stages, roster.names()),
            catalog: TargetCatalog::new(n),
        })
    }

    pub fn with_catalog(mut self, catalog: TargetCatalog) -> Self {
        self.catalog = catalog;
        self
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn requirements(&self) -> &[RequirementState] {
        &self.requirements
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn is_finished(&self) -> bool {
        self.colors.len() > self.stages
    }

    pub fn run_to_end(mut self) -> Result<RunOutput, RunError> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(RunOutput { coloring: self.colors, trace: self.trace, requirements: self.requirements, ledger: self.ledger })
    }

    fn emit(&mut self, e: TraceEvent) {
        self.trace.events.push(e);
    }

    /// Runs the next stage, colouring exactly one vertex.
    pub fn step(&mut self) -> Result<(), RunError> {
        let t = self.colors.len();
        assert!(t <= self.stages, "construction already finished");
        self.emit(TraceEvent::StageStart { stage: t });

        for split in &mut self.splits {
            let view = StageView { stage: t, colors: &self.colors, presentation: &self.presentation, history: &[] };
            split.step(&view)?;
        }

        for i in 0..self.requirements.len() {
            let now = is_active(&self.requirements[i], t, self.splits[i].enumerated());
            if now && !self.requirements[i].active {
                self.emit(TraceEvent::Activated { stage: t, requirement: i });
            }
            self.requirements[i].active = now;
        }

        for i in 0..self.requirements.len() {
            let r = &self.requirements[i];
            if !r.active || !r.followers.is_empty() {
                continue;
            }
            let after = r.last_injury_stage;
            let first = self.splits[i]
                .enumerated()
                .iter()
                .filter(|e| after.is_none_or(|l| e.stage > l))
                .min_by_key(|e| e.vertex)
                .copied()
                .expect("active requirements have an eligible element");
            self.requirements[i].followers.push(Follower { vertex: first.vertex, enumerated_at: first.stage });
            self.scanned[i] = 0;
            self.emit(TraceEvent::FirstFollower {
                stage: t,
                requirement: i,
                vertex: first.vertex,
                enumerated_at: first.stage,
            });
            // Split elements are already coloured, so t >= 1 here; the
            // reservation covers every vertex not yet coloured.
            let color = self.colors[first.vertex].opposite();
            self.ledger.reserve(i, color, first.vertex, t - 1, t);
            self.emit(TraceEvent::Reserved { stage: t, requirement: i, vertex: first.vertex, color, threshold: t - 1 });
        }

        for i in 0..self.requirements.len() {
            let r = &self.requirements[i];
            if !r.active || r.followers.is_empty() || r.target.is_some() {
                continue;
            }
            let k = self.requirements[..i].iter().filter(|h| h.active).map(|h| h.followers.len()).sum();
            let target = choose_target(&mut self.requirements[i], k, &mut self.catalog)
                .map_err(|source| RunError::Target { stage: t, requirement: i, source })?;
            let graph6 = encode_graph6(&target.graph).map_err(|_| RunError::TargetTooLarge {
                parts: k + 1,
                vertices: target.graph.vertex_count(),
            })?;
            self.emit(TraceEvent::TargetChosen { stage: t, requirement: i, graph6, k });
        }

        for i in 0..self.requirements.len() {
            let Some(x) = self.next_follower(i) else {
                continue;
            };
            let color = self.requirements[i].color.opposite();
            self.requirements[i].followers.push(x);
            self.scanned[i] = 0;
            self.emit(TraceEvent::NewFollower { stage: t, requirement: i, vertex: x.vertex, enumerated_at: x.enumerated_at });
            self.ledger.reserve(i, color, x.vertex, t, t);
            self.emit(TraceEvent::Reserved { stage: t, requirement: i, vertex: x.vertex, color, threshold: t });
            for w in i + 1..self.requirements.len() {
                self.requirements[w].injure(t);
                self.scanned[w] = 0;
                self.ledger.cancel_owner(w, t);
                self.emit(TraceEvent::Injured { stage: t, requirement: w, by: i });
            }
            self.check_followers(i, t)?;
        }

        let c = self.ledger.p_eval(t, t, &self.presentation);
        self.colors.push(c);
        self.emit(TraceEvent::Colored { stage: t, vertex: t, color: c });
        Ok(())
    }

    /// Least element of the split enumerated after the last follower and
    /// extending the followers along the target.
    fn next_follower(&mut self, i: usize) -> Option<Follower> {
        let r = &self.requirements[i];
        let (true, Some(target), Some(last)) = (r.active, &r.target, r.followers.last()) else {
            return None;
        };
        let m = r.followers.len();
        if m >= target.graph.vertex_count() {
            return None;
        }
        let history = self.splits[i].enumerated();
        let start = self.scanned[i].max(history.partition_point(|e| e.stage <= last.enumerated_at));
        self.scanned[i] = history.len();
        let p = &self.presentation;
        history[start..]
            .iter()
            .filter(|e| {
                e.vertex > last.enumerated_at
                    && r.followers.iter().enumerate().all(|(j, f)| p.adjacent_built(f.vertex, e.vertex) == target.graph.has_edge(j, m))
            })
            .min_by_key(|e| e.vertex)
            .map(|e| Follower { vertex: e.vertex, enumerated_at: e.stage })
    }

    fn check_followers(&self, i: usize, t: usize) -> Result<(), RunError> {
        let r = &self.requirements[i];
        let target = r.target.as_ref().expect("followers beyond the first need a target");
        let pattern = restriction(&target.graph, r.followers.len()).expect("follower count within target");
        let vertices = r.follower_vertices();
        if increasing_iso(&vertices, |a, b| self.presentation.adjacent_built(a, b), &pattern) {
            Ok(())
        } else {
            Err(RunError::Invariant {
                stage: t,
                message: format!("followers {vertices:?} of requirement {i} do not copy the target prefix"),
                trace: Box::new(self.trace.clone()),
            })
        }
    }
}

/// Runs stages `0..=stages`.
pub fn run(n: usize, roster: &Roster, stages: usize) -> Result<RunOutput, RunError> {
    Construction::new(n, roster, stages)?.run_to_end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{ColorChaser, FiniteSet};

    fn roster(strategies: Vec<Box<dyn crate::adversary::Strategy>>) -> Roster {
        Roster::from_strategies(3, strategies).unwrap()
    }

    #[test]
    fn requirement_colors_alternate() {
        assert_eq!(RequirementState::new(0).color, Color::Red);
        assert_eq!(RequirementState::new(3).color, Color::Blue);
        assert_eq!(RequirementState::new(3).adversary(), 1);
    }

    #[test]
    fn activity_examples() {
        let mut r = RequirementState::new(2);
        assert!(!is_active(&r, 5, &[]));
        let split = [Enumeration { vertex: 3, stage: 4 }, Enumeration { vertex: 7, stage: 10 }];
        assert!(is_active(&r, 5, &split));
        // Index 1 cannot act before stage 1.
        assert!(!is_active(&r, 0, &split));
        r.last_injury_stage = Some(10);
        assert!(!is_active(&r, 12, &split));
        r.last_injury_stage = Some(9);
        assert!(is_active(&r, 12, &split));
    }

    #[test]
    fn target_examples() {
        let mut catalog = TargetCatalog::new(3);
        let mut r = RequirementState::new(0);
        r.followers.push(Follower { vertex: 4, enumerated_at: 5 });
        let t = choose_target(&mut r, 0, &mut catalog).unwrap();
        assert_eq!(t.graph, FiniteGraph::complete(2));
        let mut r = RequirementState::new(1);
        r.followers.push(Follower { vertex: 4, enumerated_at: 5 });
        let t = choose_target(&mut r, 1, &mut catalog).unwrap();
        assert_eq!((t.graph.vertex_count(), t.graph.edge_count(), t.k_at_choice), (5, 5, 1));
        for parts in 1..=4 {
            let g = catalog.graph(parts).unwrap().clone();
            let identity: Vec<usize> = (0..g.vertex_count()).collect();
            assert!(crate::graph::is_connect_order(&g, &identity));
            assert!(crate::folkman::partition_ramsey_check(&g, 3, parts));
        }
        assert!(matches!(TargetCatalog::new(4).graph(2), Err(FolkmanError::Exhausted { .. })));
    }

    #[test]
    fn empty_roster_is_all_red() {
        let out = run(3, &Roster::default(), 50).unwrap();
        assert_eq!(out.coloring, vec![Color::Red; 51]);
        assert_eq!(out.trace.events.len(), 102);
    }

    #[test]
    fn single_chaser() {
        let out = run(3, &roster(vec![Box::new(ColorChaser::new(Color::Red))]), 300).unwrap();
        assert_eq!(out.coloring.len(), 301);
        let x = out.trace.events.iter().find_map(|e| match *e {
            TraceEvent::FirstFollower { requirement: 0, vertex, stage, .. } => Some((vertex, stage)),
            _ => None,
        });
        let (x, stage) = x.expect("red requirement gets a follower");
        assert_eq!(out.coloring[x], Color::Red);
        let mut p = Presentation::new(3).unwrap();
        for y in p.neighbor_set_within(x, 301) {
            if y >= stage {
                assert_eq!(out.coloring[y], Color::Blue, "neighbor {y} of follower {x}");
            }
        }
    }

    #[test]
    fn injury_cancels_weaker_state() {
        let out = run(
            3,
            &roster(vec![Box::new(ColorChaser::new(Color::Blue)), Box::new(FiniteSet::new(0..400))]),
            400,
        )
        .unwrap();
        for r in &out.requirements {
            if let Some(t) = &r.target {
                assert!(r.followers.len() <= t.graph.vertex_count());
            }
        }
        for e in out.ledger.entries() {
            let owner = &out.requirements[e.owner];
            if e.is_live() {
                assert!(owner.followers.iter().any(|f| f.vertex == e.anchor));
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let make = || roster(vec![Box::new(ColorChaser::new(Color::Red)), Box::new(ColorChaser::new(Color::Blue))]);
        let a = run(3, &make(), 500).unwrap();
        let b = run(3, &make(), 500).unwrap();
        assert_eq!(a.trace.to_jsonl(), b.trace.to_jsonl());
        assert_eq!(a.coloring, b.coloring);
    }
}
