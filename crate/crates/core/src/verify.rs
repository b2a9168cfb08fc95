//! Independent replay of a construction trace.
//!
//! The verifier rebuilds the requirement state and the reservation ledger
//! from the recorded events, replays the roster against the colouring file,
//! and re-derives every scheduling decision the construction should have made.

use std::collections::HashMap;
use std::fmt;

use crate::adversary::{color_split, AdversaryStream, Roster, StageView};
use crate::color::Color;
use crate::construction::{is_active, Follower, RequirementState, Target, TargetCatalog};
use crate::folkman::partition_ramsey_check;
use crate::graph::{increasing_iso, is_connect_order, is_in_t_n, restriction, FiniteGraph};
use crate::graph6::{decode_graph6, encode_graph6};
use crate::ledger::{Reservation, ReservationLedger, DEFAULT_COLOR};
use crate::presentation::Presentation;
use crate::trace::{Trace, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::V1, Check::V2, Check::V3, Check::V4, Check::V5, Check::V6];

    pub fn description(self) -> &'static str {
        match self {
            Check::V1 => "coloured events match the planned colour",
            Check::V2 => "followers copy their target graph",
            Check::V3 => "colouring honours the strongest live reservation",
            Check::V4 => "same-colour followers sit next to a stronger opposite follower",
            Check::V5 => "replay finds no skipped or invented decision",
            Check::V6 => "follower counts stay within the target size",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub check: Check,
    pub stage: Option<usize>,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stage {
            Some(s) => write!(f, "{} stage {s}: {}", self.check, self.message),
            None => write!(f, "{}: {}", self.check, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub failures: Vec<Failure>,
    pub stages_replayed: usize,
}

impl VerificationReport {
    pub fn passed(&self, check: Check) -> bool {
        self.failures.iter().all(|f| f.check != check)
    }

    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_of(&self, check: Check) -> impl Iterator<Item = &Failure> {
        self.failures.iter().filter(move |f| f.check == check)
    }

    pub fn failed_checks(&self) -> Vec<Check> {
        Check::ALL.into_iter().filter(|&c| !self.passed(c)).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in Check::ALL {
            let mut failures = self.failures_of(c);
            match failures.next() {
                None => writeln!(f, "{c} PASS  {}", c.description())?,
                Some(first) => {
                    let more = failures.count();
                    writeln!(f, "{c} FAIL  {} ({} failures; first: {first})", c.description(), more + 1)?
                }
            }
        }
        Ok(())
    }
}

/// Targets up to this size get their partition property re-proved by
/// exhaustive search; larger ones are only compared with the catalog.
pub const ARROWS_RECHECK_LIMIT: usize = 12;

struct Span {
    owner: usize,
    vertex: usize,
    from: usize,
    until: Option<usize>,
}

struct Replay<'a> {
    n: usize,
    p: &'a Presentation,
    coloring: &'a [Color],
    splits: Vec<AdversaryStream>,
    reqs: Vec<RequirementState>,
    scanned: Vec<usize>,
    ledger: ReservationLedger,
    spans: Vec<Span>,
    catalog: TargetCatalog,
    arrows: HashMap<(String, usize), bool>,
    failures: Vec<Failure>,
}

/// Replays `trace` against `coloring` and `roster`, reporting every failed check.
pub fn verify_trace(
    trace: &Trace,
    coloring: &[Color],
    presentation: &mut Presentation,
    roster: &Roster,
) -> VerificationReport {
    let mut failures = Vec::new();
    let header = &trace.header;
    if header.n != presentation.n() {
        failures.push(Failure {
            check: Check::V5,
            stage: None,
            message: format!("trace is for n = {}, presentation has n = {}", header.n, presentation.n()),
        });
        return VerificationReport { failures, stages_replayed: 0 };
    }
    if header.roster != roster.names() {
        failures.push(Failure {
            check: Check::V5,
            stage: None,
            message: format!("trace roster {:?} differs from {:?}", header.roster, roster.names()),
        });
    }
    presentation.ensure_stage(header.stages.max(coloring.len()) + 2);
    let splits: Vec<AdversaryStream> = roster
        .streams()
        .iter()
        .flat_map(|s| [color_split(s, Color::Red), color_split(s, Color::Blue)])
        .collect();
    let mut replay = Replay {
        n: header.n,
        p: presentation,
        coloring,
        reqs: (0..splits.len()).map(RequirementState::new).collect(),
        scanned: vec![0; splits.len()],
        splits,
        ledger: ReservationLedger::new(),
        spans: Vec::new(),
        catalog: TargetCatalog::new(header.n),
        arrows: HashMap::new(),
        failures,
    };
    let stages = replay.run(&trace.events);
    if stages != header.stages + 1 {
        replay.fail(Check::V1, None, format!("trace colours {stages} vertices, header promises {}", header.stages + 1));
    }
    if coloring.len() != stages {
        replay.fail(Check::V1, None, format!("colouring file has {} entries, trace has {stages}", coloring.len()));
    }
    replay.check_stuck_copies();
    VerificationReport { failures: replay.failures, stages_replayed: stages }
}

impl Replay<'_> {
    fn fail(&mut self, check: Check, stage: Option<usize>, message: String) {
        self.failures.push(Failure { check, stage, message });
    }

    /// Returns the number of stages replayed.
    fn run(&mut self, events: &[TraceEvent]) -> usize {
        let mut idx = 0;
        let mut t = 0;
        while idx < events.len() {
            if events[idx] != (TraceEvent::StageStart { stage: t }) {
                self.fail(Check::V5, Some(t), format!("expected StageStart, found {:?}", events[idx]));
                return t;
            }
            let end = events[idx + 1..]
                .iter()
                .position(|e| matches!(e, TraceEvent::StageStart { .. }))
                .map_or(events.len(), |p| idx + 1 + p);
            if !self.stage(t, &events[idx + 1..end]) {
                return t;
            }
            idx = end;
            t += 1;
        }
        t
    }

    fn enumeration_stage(&self, i: usize, vertex: usize) -> Option<usize> {
        self.splits[i].enumerated().iter().find(|e| e.vertex == vertex).map(|e| e.stage)
    }

    fn copies_target(&self, followers: &[Follower], target: &FiniteGraph) -> bool {
        let vertices: Vec<usize> = followers.iter().map(|f| f.vertex).collect();
        followers.len() <= target.vertex_count()
            && vertices.windows(2).all(|w| w[0] < w[1])
            && increasing_iso(&vertices, |a, b| self.p.adjacent_built(a, b), &restriction(target, vertices.len()).unwrap())
    }

    /// Checks a new or first follower against the split and the target.
    fn admit_follower(&mut self, t: usize, i: usize, vertex: usize, enumerated_at: usize) -> bool {
        if i >= self.reqs.len() {
            self.fail(Check::V5, Some(t), format!("requirement {i} does not exist"));
            return false;
        }
        if self.enumeration_stage(i, vertex) != Some(enumerated_at) {
            self.fail(
                Check::V2,
                Some(t),
                format!("follower {vertex} of requirement {i} is not in its split at stage {enumerated_at}"),
            );
        }
        if let Some(last) = self.reqs[i].followers.last().copied() {
            if vertex <= last.enumerated_at {
                self.fail(Check::V2, Some(t), format!("follower {vertex} of requirement {i} is not above stage {}", last.enumerated_at));
            }
        }
        let r = &self.reqs[i];
        let mut followers = r.followers.clone();
        followers.push(Follower { vertex, enumerated_at });
        if let Some(target) = &r.target {
            if followers.len() > target.graph.vertex_count() {
                let size = target.graph.vertex_count();
                self.fail(Check::V6, Some(t), format!("requirement {i} has {} followers, target has {size}", followers.len()));
            } else if !self.copies_target(&followers, &target.graph) {
                self.fail(Check::V2, Some(t), format!("followers of requirement {i} stop copying the target at {vertex}"));
            }
        }
        self.reqs[i].followers = followers;
        self.scanned[i] = 0;
        self.spans.push(Span { owner: i, vertex, from: t, until: None });
        true
    }

    fn take_reservation(&mut self, t: usize, events: &[TraceEvent], cur: &mut usize, expect: (usize, usize, Color, usize)) {
        match events.get(*cur) {
            Some(&TraceEvent::Reserved { requirement, vertex, color, threshold, .. }) => {
                *cur += 1;
                if (requirement, vertex, color, threshold) != expect {
                    self.fail(
                        Check::V3,
                        Some(t),
                        format!("reservation {:?} should be {expect:?}", (requirement, vertex, color, threshold)),
                    );
                }
                self.ledger.reserve(requirement, color, vertex, threshold, t);
            }
            _ => self.fail(Check::V3, Some(t), format!("missing reservation for follower {} of requirement {}", expect.1, expect.0)),
        }
    }

    fn expected_new_follower(&mut self) -> Option<(usize, Follower)> {
        for i in 0..self.reqs.len() {
            let r = &self.reqs[i];
            let (true, Some(target), Some(last)) = (r.active, &r.target, r.followers.last()) else {
                continue;
            };
            let m = r.followers.len();
            if m >= target.graph.vertex_count() {
                continue;
            }
            let history = self.splits[i].enumerated();
            let start = self.scanned[i].max(history.partition_point(|e| e.stage <= last.enumerated_at));
            let pattern = restriction(&target.graph, m + 1).unwrap();
            let mut best: Option<Follower> = None;
            for e in &history[start..] {
                if e.vertex <= last.enumerated_at || best.is_some_and(|b| b.vertex < e.vertex) {
                    continue;
                }
                let mut vertices = r.follower_vertices();
                vertices.push(e.vertex);
                if increasing_iso(&vertices, |a, b| self.p.adjacent_built(a, b), &pattern) {
                    best = Some(Follower { vertex: e.vertex, enumerated_at: e.stage });
                }
            }
            match best {
                Some(f) => return Some((i, f)),
                None => self.scanned[i] = history.len(),
            }
        }
        None
    }

    fn arrows(&mut self, graph6: &str, g: &FiniteGraph, parts: usize) -> bool {
        let key = (graph6.to_owned(), parts);
        let n = self.n;
        *self.arrows.entry(key).or_insert_with(|| partition_ramsey_check(g, n, parts))
    }

    fn stage(&mut self, t: usize, events: &[TraceEvent]) -> bool {
        if self.coloring.len() < t {
            self.fail(Check::V1, Some(t), "colouring file ends before this stage".into());
            return false;
        }
        for i in 0..self.splits.len() {
            let view = StageView { stage: t, colors: &self.coloring[..t], presentation: self.p, history: &[] };
            if let Err(e) = self.splits[i].step(&view) {
                self.fail(Check::V5, Some(t), e.to_string());
                return false;
            }
        }
        let mut cur = 0;

        let expected: Vec<usize> = (0..self.reqs.len())
            .filter(|&i| !self.reqs[i].active && is_active(&self.reqs[i], t, self.splits[i].enumerated()))
            .collect();
        let mut actual = Vec::new();
        while let Some(&TraceEvent::Activated { requirement, .. }) = events.get(cur) {
            actual.push(requirement);
            cur += 1;
        }
        if actual != expected {
            self.fail(Check::V5, Some(t), format!("activated {actual:?}, replay activates {expected:?}"));
        }
        for i in 0..self.reqs.len() {
            self.reqs[i].active = is_active(&self.reqs[i], t, self.splits[i].enumerated());
        }

        let expected: Vec<(usize, usize, usize)> = (0..self.reqs.len())
            .filter(|&i| self.reqs[i].active && self.reqs[i].followers.is_empty())
            .filter_map(|i| {
                let after = self.reqs[i].last_injury_stage;
                self.splits[i]
                    .enumerated()
                    .iter()
                    .filter(|e| after.is_none_or(|l| e.stage > l))
                    .min_by_key(|e| e.vertex)
                    .map(|e| (i, e.vertex, e.stage))
            })
            .collect();
        let mut actual = Vec::new();
        while let Some(&TraceEvent::FirstFollower { requirement, vertex, enumerated_at, .. }) = events.get(cur) {
            cur += 1;
            actual.push((requirement, vertex, enumerated_at));
            let planned = self.coloring.get(vertex).map_or(DEFAULT_COLOR, |c| c.opposite());
            self.take_reservation(t, events, &mut cur, (requirement, vertex, planned, t.wrapping_sub(1)));
            if !self.admit_follower(t, requirement, vertex, enumerated_at) {
                return false;
            }
        }
        if actual != expected {
            self.fail(Check::V5, Some(t), format!("first followers {actual:?}, replay expects {expected:?}"));
        }

        let expected: Vec<(usize, usize)> = (0..self.reqs.len())
            .filter(|&i| {
                let r = &self.reqs[i];
                r.active && !r.followers.is_empty() && r.target.is_none()
            })
            .map(|i| (i, self.reqs[..i].iter().filter(|h| h.active).map(|h| h.followers.len()).sum()))
            .collect();
        let mut actual = Vec::new();
        while let Some(TraceEvent::TargetChosen { requirement, graph6, k, .. }) = events.get(cur) {
            cur += 1;
            let (i, k) = (*requirement, *k);
            actual.push((i, k));
            if i >= self.reqs.len() {
                self.fail(Check::V5, Some(t), format!("requirement {i} does not exist"));
                return false;
            }
            match self.catalog.graph(k + 1).map(encode_graph6) {
                Ok(Ok(g6)) if g6 == *graph6 => {}
                other => self.fail(Check::V5, Some(t), format!("target {graph6:?} for k = {k}, replay gives {other:?}")),
            }
            let graph = match decode_graph6(graph6) {
                Ok(g) => g,
                Err(e) => {
                    self.fail(Check::V2, Some(t), format!("target {graph6:?} does not decode: {e}"));
                    continue;
                }
            };
            let identity: Vec<usize> = (0..graph.vertex_count()).collect();
            if !is_in_t_n(&graph, self.n) || !is_connect_order(&graph, &identity) {
                self.fail(Check::V2, Some(t), format!("target {graph6:?} is not a connected K_n-free graph in connect order"));
            } else if graph.vertex_count() <= ARROWS_RECHECK_LIMIT && !self.arrows(graph6, &graph, k + 1) {
                self.fail(Check::V2, Some(t), format!("target {graph6:?} has a {}-partition without a K_(n-1)", k + 1));
            }
            if !self.copies_target(&self.reqs[i].followers, &graph) {
                self.fail(Check::V2, Some(t), format!("followers of requirement {i} do not copy target {graph6:?}"));
            }
            self.reqs[i].target = Some(Target { graph, k_at_choice: k });
        }
        if actual != expected {
            self.fail(Check::V5, Some(t), format!("targets {actual:?}, replay expects {expected:?}"));
        }

        let expected = self.expected_new_follower();
        let mut actual = None;
        if let Some(&TraceEvent::NewFollower { requirement, vertex, enumerated_at, .. }) = events.get(cur) {
            cur += 1;
            actual = Some((requirement, Follower { vertex, enumerated_at }));
            let color = self.reqs.get(requirement).map_or(DEFAULT_COLOR, |r| r.color.opposite());
            self.take_reservation(t, events, &mut cur, (requirement, vertex, color, t));
            if !self.admit_follower(t, requirement, vertex, enumerated_at) {
                return false;
            }
            let mut injured = Vec::new();
            while let Some(&TraceEvent::Injured { requirement: w, by, .. }) = events.get(cur) {
                cur += 1;
                injured.push((w, by));
                if let Some(r) = self.reqs.get_mut(w) {
                    r.followers.clear();
                    r.target = None;
                    r.last_injury_stage = Some(t);
                    r.active = false;
                    self.scanned[w] = 0;
                    self.ledger.cancel_owner(w, t);
                    for s in self.spans.iter_mut().filter(|s| s.owner == w && s.until.is_none()) {
                        s.until = Some(t);
                    }
                }
            }
            let want: Vec<(usize, usize)> = (requirement + 1..self.reqs.len()).map(|w| (w, requirement)).collect();
            if injured != want {
                self.fail(Check::V5, Some(t), format!("injuries {injured:?}, expected {want:?}"));
            }
        }
        if actual != expected {
            self.fail(Check::V5, Some(t), format!("new follower {actual:?}, replay expects {expected:?}"));
        }

        match events.get(cur) {
            Some(&TraceEvent::Colored { vertex, color, .. }) => {
                cur += 1;
                let planned = self.ledger.p_eval(t, t, self.p);
                if vertex != t || color != planned {
                    self.fail(Check::V1, Some(t), format!("coloured {vertex} {color}, planned colour of {t} is {planned}"));
                }
                if self.coloring.get(t) != Some(&color) {
                    self.fail(Check::V1, Some(t), format!("colouring file has {:?}, trace has {color}", self.coloring.get(t)));
                }
            }
            _ => self.fail(Check::V1, Some(t), "no Colored event".into()),
        }
        if let Some(&c) = self.coloring.get(t) {
            let honoured = strongest_by_scan(self.ledger.entries(), t, self.p);
            if c != honoured {
                self.fail(Check::V3, Some(t), format!("vertex {t} is {c}, strongest live reservation says {honoured}"));
            }
        }
        if cur < events.len() {
            self.fail(Check::V5, Some(t), format!("unexpected {:?}", events[cur]));
        }
        true
    }

    /// A same-colour follower of a settled requirement must be adjacent to a
    /// follower of a stronger requirement of the opposite colour that was
    /// live when it was coloured.
    fn check_stuck_copies(&mut self) {
        let mut found = Vec::new();
        for r in &self.reqs {
            if r.target.is_none() || r.followers.len() < 2 {
                continue;
            }
            for f in &r.followers[1..] {
                let x = f.vertex;
                if self.coloring.get(x) != Some(&r.color) {
                    continue;
                }
                let blocked = self.spans.iter().any(|s| {
                    s.owner < r.priority
                        && self.reqs[s.owner].color != r.color
                        && s.from <= x
                        && s.until.is_none_or(|u| u > x)
                        && self.p.adjacent_built(s.vertex, x)
                });
                if !blocked {
                    found.push(Failure {
                        check: Check::V4,
                        stage: Some(x),
                        message: format!("follower {x} of requirement {} has its colour with no stronger opposite neighbour", r.priority),
                    });
                }
            }
        }
        self.failures.extend(found);
    }
}

/// Colour of the strongest live entry covering `x` at stage `x`, by direct scan.
fn strongest_by_scan(entries: &[Reservation], x: usize, p: &Presentation) -> Color {
    let mut best: Option<&Reservation> = None;
    for e in entries {
        let live = e.created <= x && e.cancelled.is_none_or(|c| c > x);
        if live && x > e.threshold && p.neighbors_built(e.anchor, x + 1).contains(&x) && best.is_none_or(|b| e.owner < b.owner) {
            best = Some(e);
        }
    }
    best.map_or(DEFAULT_COLOR, |e| e.color)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjuryCount {
    pub requirement: usize,
    pub injuries: usize,
    /// Follower acquisitions by stronger requirements.
    pub stronger_acquisitions: usize,
}

/// Per-requirement injury counts next to the acquisitions that bound them.
pub fn injury_counts(trace: &Trace) -> Vec<InjuryCount> {
    let count = 2 * trace.header.roster.len();
    let mut injuries = vec![0; count];
    let mut acquisitions = vec![0; count];
    for e in &trace.events {
        match *e {
            TraceEvent::Injured { requirement, .. } if requirement < count => injuries[requirement] += 1,
            TraceEvent::FirstFollower { requirement, .. } | TraceEvent::NewFollower { requirement, .. }
                if requirement < count =>
            {
                acquisitions[requirement] += 1
            }
            _ => {}
        }
    }
    (0..count)
        .map(|i| InjuryCount { requirement: i, injuries: injuries[i], stronger_acquisitions: acquisitions[..i].iter().sum() })
        .collect()
}

pub fn injury_bound_holds(trace: &Trace) -> bool {
    injury_counts(trace).iter().all(|c| c.injuries <= c.stronger_acquisitions)
}
