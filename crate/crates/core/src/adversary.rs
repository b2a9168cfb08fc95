//! Deterministic stand-ins for c.e. sets `W_e`.
//!
//! A strategy is stepped once per stage with read access to the colouring
//! decided so far and to the presentation, and answers with the naturals it
//! enumerates at that stage. The wrapper [`AdversaryStream`] records the
//! enumeration stage of each element and enforces monotonicity.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::color::Color;
use crate::presentation::Presentation;

/// Stages replayed by the registration self-check.
pub const SELF_CHECK_STAGES: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("adversary {id} ({name}) re-enumerated {vertex} at stage {stage}")]
    Repeated { id: usize, name: String, vertex: usize, stage: usize },
    #[error("adversary {id} ({name}) is not replay-deterministic (first divergence at stage {stage})")]
    Nondeterministic { id: usize, name: String, stage: usize },
}

/// An element together with the stage at which it was enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Enumeration {
    pub vertex: usize,
    pub stage: usize,
}

/// What a strategy may look at during one stage.
#[derive(Clone, Copy)]
pub struct StageView<'a> {
    pub stage: usize,
    /// Colours of `0..stage`; nothing later is revealed.
    pub colors: &'a [Color],
    pub presentation: &'a Presentation,
    /// The stream's own enumeration history, in order.
    pub history: &'a [Enumeration],
}

impl StageView<'_> {
    pub fn color(&self, v: usize) -> Option<Color> {
        self.colors.get(v).copied()
    }
}

pub trait Strategy: Send {
    fn name(&self) -> String;

    /// Same strategy with its internal state reset to stage zero.
    fn fresh(&self) -> Box<dyn Strategy>;

    fn step(&mut self, view: &StageView<'_>) -> Vec<usize>;
}

impl fmt::Debug for dyn Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Enumerates the listed elements one per stage, in the given order.
#[derive(Debug, Clone)]
pub struct ConstantSet {
    elements: Vec<usize>,
    next: usize,
}

impl ConstantSet {
    pub fn new(elements: Vec<usize>) -> Self {
        let mut seen = HashSet::new();
        let elements = elements.into_iter().filter(|v| seen.insert(*v)).collect();
        ConstantSet { elements, next: 0 }
    }
}

impl Strategy for ConstantSet {
    fn name(&self) -> String {
        format!("constant-set{:?}", self.elements)
    }

    fn fresh(&self) -> Box<dyn Strategy> {
        Box::new(ConstantSet { elements: self.elements.clone(), next: 0 })
    }

    fn step(&mut self, _view: &StageView<'_>) -> Vec<usize> {
        let out = self.elements.get(self.next).map(|&v| vec![v]).unwrap_or_default();
        self.next += 1;
        out
    }
}

/// Enumerates the whole finite set at its first stage.
#[derive(Debug, Clone)]
pub struct FiniteSet {
    elements: BTreeSet<usize>,
    done: bool,
}

impl FiniteSet {
    pub fn new(elements: impl IntoIterator<Item = usize>) -> Self {
        FiniteSet { elements: elements.into_iter().collect(), done: false }
    }
}

impl Strategy for FiniteSet {
    fn name(&self) -> String {
        format!("finite-set{:?}", self.elements)
    }

    fn fresh(&self) -> Box<dyn Strategy> {
        Box::new(FiniteSet { elements: self.elements.clone(), done: false })
    }

    fn step(&mut self, _view: &StageView<'_>) -> Vec<usize> {
        if std::mem::replace(&mut self.done, true) {
            Vec::new()
        } else {
            self.elements.iter().copied().collect()
        }
    }
}

/// At stage `s` enumerates `s - 1` when that vertex received `color`.
#[derive(Debug, Clone)]
pub struct ColorChaser {
    color: Color,
}

impl ColorChaser {
    pub fn new(color: Color) -> Self {
        ColorChaser { color }
    }
}

impl Strategy for ColorChaser {
    fn name(&self) -> String {
        format!("color-chaser({})", self.color)
    }

    fn fresh(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn step(&mut self, view: &StageView<'_>) -> Vec<usize> {
        match view.stage.checked_sub(1) {
            Some(v) if view.color(v) == Some(self.color) => vec![v],
            _ => Vec::new(),
        }
    }
}

/// Grows, inside one colour class, an increasing vertex list order-isomorphic
/// to a prefix of the presentation itself, greedily taking each newly
/// coloured vertex that extends the copy.
#[derive(Debug, Clone)]
pub struct GreedyCopier {
    color: Color,
    limit: Option<usize>,
    copy: Vec<usize>,
}

impl GreedyCopier {
    pub fn new(color: Color, limit: Option<usize>) -> Self {
        GreedyCopier { color, limit, copy: Vec::new() }
    }
}

impl Strategy for GreedyCopier {
    fn name(&self) -> String {
        match self.limit {
            Some(l) => format!("greedy-copier({}, {l})", self.color),
            None => format!("greedy-copier({})", self.color),
        }
    }

    fn fresh(&self) -> Box<dyn Strategy> {
        Box::new(GreedyCopier::new(self.color, self.limit))
    }

    fn step(&mut self, view: &StageView<'_>) -> Vec<usize> {
        let Some(v) = view.stage.checked_sub(1) else {
            return Vec::new();
        };
        let j = self.copy.len();
        if view.color(v) != Some(self.color) || self.limit.is_some_and(|l| j >= l) {
            return Vec::new();
        }
        if self.copy.last().is_some_and(|&last| last >= v) || j >= view.presentation.built_stage() {
            return Vec::new();
        }
        let p = view.presentation;
        if self.copy.iter().enumerate().all(|(i, &y)| p.adjacent_built(y, v) == p.adjacent_built(i, j)) {
            self.copy.push(v);
            vec![v]
        } else {
            Vec::new()
        }
    }
}

/// Silent before `wake`; afterwards runs `inner` from its own stage zero.
#[derive(Debug)]
pub struct Delayed {
    wake: usize,
    inner: Box<dyn Strategy>,
}

impl Delayed {
    pub fn new(wake: usize, inner: Box<dyn Strategy>) -> Self {
        Delayed { wake, inner }
    }
}

impl Strategy for Delayed {
    fn name(&self) -> String {
        format!("delayed({}, {})", self.wake, self.inner.name())
    }

    fn fresh(&self) -> Box<dyn Strategy> {
        Box::new(Delayed { wake: self.wake, inner: self.inner.fresh() })
    }

    fn step(&mut self, view: &StageView<'_>) -> Vec<usize> {
        if view.stage < self.wake {
            Vec::new()
        } else {
            self.inner.step(view)
        }
    }
}

/// The part of a stream that has a given colour: `x` is enumerated at the
/// first stage where it is in the base stream and already coloured `color`.
#[derive(Debug)]
pub struct ColorSplit {
    color: Color,
    base: Box<dyn Strategy>,
    base_history: Vec<Enumeration>,
    pending: BTreeSet<usize>,
}

impl ColorSplit {
    pub fn new(base: Box<dyn Strategy>, color: Color) -> Self {
        ColorSplit { color, base, base_history: Vec::new(), pending: BTreeSet::new() }
    }
}

impl Strategy for ColorSplit {
    fn name(&self) -> String {
        format!("{}|{}", self.base.name(), self.color)
    }

    fn fresh(&self) -> Box<dyn Strategy> {
        Box::new(ColorSplit::new(self.base.fresh(), self.color))
    }

    fn step(&mut self, view: &StageView<'_>) -> Vec<usize> {
        let base_view = StageView { history: &self.base_history, ..*view };
        let new = self.base.step(&base_view);
        self.base_history.extend(new.iter().map(|&vertex| Enumeration { vertex, stage: view.stage }));
        self.pending.extend(new);
        let decided: Vec<usize> = self.pending.range(..view.colors.len()).copied().collect();
        for v in &decided {
            self.pending.remove(v);
        }
        decided.into_iter().filter(|&v| view.colors[v] == self.color).collect()
    }
}

/// A registered stream `W_e` with its enumeration history.
#[derive(Debug)]
pub struct AdversaryStream {
    id: usize,
    strategy: Box<dyn Strategy>,
    enumerated: Vec<Enumeration>,
    members: HashSet<usize>,
}

fn self_check_colors(len: usize) -> Vec<Color> {
    (0..len).map(|v| if v % 3 == 2 { Color::Blue } else { Color::Red }).collect()
}

impl AdversaryStream {
    /// Registers a strategy after replaying two fresh copies of it for
    /// [`SELF_CHECK_STAGES`] stages against a fixed synthetic colouring.
    pub fn register(id: usize, strategy: Box<dyn Strategy>, n: usize) -> Result<Self, AdversaryError> {
        let mut p = Presentation::new(n).expect("n validated by caller");
        p.ensure_stage(SELF_CHECK_STAGES + 1);
        let colors = self_check_colors(SELF_CHECK_STAGES + 1);
        let mut a = AdversaryStream::unchecked(id, strategy.fresh());
        let mut b = AdversaryStream::unchecked(id, strategy.fresh());
        for stage in 0..=SELF_CHECK_STAGES {
            let ea = a.step_with(stage, &colors[..stage], &p)?;
            let eb = b.step_with(stage, &colors[..stage], &p)?;
            if ea != eb {
                return Err(AdversaryError::Nondeterministic { id, name: strategy.name(), stage });
            }
        }
        Ok(AdversaryStream::unchecked(id, strategy.fresh()))
    }

    fn unchecked(id: usize, strategy: Box<dyn Strategy>) -> Self {
        AdversaryStream { id, strategy, enumerated: Vec::new(), members: HashSet::new() }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn name(&self) -> String {
        self.strategy.name()
    }

    pub fn enumerated(&self) -> &[Enumeration] {
        &self.enumerated
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(&v)
    }

    /// Unstarted copy of this stream.
    pub fn fresh(&self) -> AdversaryStream {
        AdversaryStream::unchecked(self.id, self.strategy.fresh())
    }

    /// Runs one stage; the view's history is filled in from the stream.
    pub fn step(&mut self, view: &StageView<'_>) -> Result<Vec<usize>, AdversaryError> {
        self.step_with(view.stage, view.colors, view.presentation)
    }

    fn step_with(&mut self, stage: usize, colors: &[Color], p: &Presentation) -> Result<Vec<usize>, AdversaryError> {
        let view = StageView { stage, colors, presentation: p, history: &self.enumerated };
        let new = self.strategy.step(&view);
        for &vertex in &new {
            if !self.members.insert(vertex) {
                return Err(AdversaryError::Repeated { id: self.id, name: self.strategy.name(), vertex, stage });
            }
            self.enumerated.push(Enumeration { vertex, stage });
        }
        Ok(new)
    }
}

/// The stream enumerating exactly the `color` part of `stream`, replayed from stage zero.
pub fn color_split(stream: &AdversaryStream, color: Color) -> AdversaryStream {
    AdversaryStream::unchecked(stream.id, Box::new(ColorSplit::new(stream.strategy.fresh(), color)))
}

/// Registered streams indexed `0..len` in order.
#[derive(Debug, Default)]
pub struct Roster {
    streams: Vec<AdversaryStream>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RosterError {
    #[error("adversary indices must be 0, 1, 2, ... in order; position {position} has index {id}")]
    NotContiguous { position: usize, id: usize },
}

impl Roster {
    pub fn new(streams: Vec<AdversaryStream>) -> Result<Self, RosterError> {
        if let Some((position, s)) = streams.iter().enumerate().find(|(i, s)| s.id() != *i) {
            return Err(RosterError::NotContiguous { position, id: s.id() });
        }
        Ok(Roster { streams })
    }

    /// Registers each strategy under its position.
    pub fn from_strategies(n: usize, strategies: Vec<Box<dyn Strategy>>) -> Result<Self, AdversaryError> {
        let streams = strategies
            .into_iter()
            .enumerate()
            .map(|(id, s)| AdversaryStream::register(id, s, n))
            .collect::<Result<_, _>>()?;
        Ok(Roster { streams })
    }

    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    pub fn streams(&self) -> &[AdversaryStream] {
        &self.streams
    }

    pub fn names(&self) -> Vec<String> {
        self.streams.iter().map(AdversaryStream::name).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drive(stream: &mut AdversaryStream, colors: &[Color], p: &Presentation, stages: usize) -> Vec<Vec<usize>> {
        (0..stages)
            .map(|s| {
                let view = StageView { stage: s, colors: &colors[..s.min(colors.len())], presentation: p, history: &[] };
                stream.step(&view).unwrap()
            })
            .collect()
    }

    fn presentation(stages: usize) -> Presentation {
        let mut p = Presentation::new(3).unwrap();
        p.ensure_stage(stages + 1);
        p
    }

    #[test]
    fn constant_set_one_per_stage() {
        let p = presentation(10);
        let mut s = AdversaryStream::register(0, Box::new(ConstantSet::new(vec![2, 4, 6])), 3).unwrap();
        let out = drive(&mut s, &[Color::Red; 10], &p, 5);
        assert_eq!(out, vec![vec![2], vec![4], vec![6], vec![], vec![]]);
        assert_eq!(s.enumerated()[2], Enumeration { vertex: 6, stage: 2 });
    }

    #[test]
    fn color_chaser_follows_color() {
        let p = presentation(10);
        let colors = [Color::Red, Color::Blue, Color::Red, Color::Red];
        let mut s = AdversaryStream::register(0, Box::new(ColorChaser::new(Color::Red)), 3).unwrap();
        let out: Vec<usize> = drive(&mut s, &colors, &p, 5).concat();
        assert_eq!(out, vec![0, 2, 3]);
    }

    #[test]
    fn split_filters_by_color() {
        let p = presentation(10);
        let colors = vec![Color::Red, Color::Red, Color::Red, Color::Red, Color::Blue, Color::Red, Color::Red];
        let base = AdversaryStream::register(0, Box::new(ConstantSet::new(vec![2, 4, 6])), 3).unwrap();
        let mut red = color_split(&base, Color::Red);
        let out = drive(&mut red, &colors, &p, 8);
        // 6 is enumerated at stage 2 but only coloured by stage 7.
        assert_eq!(out.concat(), vec![2, 6]);
        assert_eq!(red.enumerated()[1], Enumeration { vertex: 6, stage: 7 });
        for e in red.enumerated() {
            assert_eq!(colors[e.vertex], Color::Red);
            assert!(e.vertex < e.stage);
        }

        let empty = AdversaryStream::register(1, Box::new(FiniteSet::new([])), 3).unwrap();
        let mut split = color_split(&empty, Color::Blue);
        assert!(drive(&mut split, &colors, &p, 8).concat().is_empty());
    }

    #[test]
    fn greedy_copier_emits_own_color_only() {
        let p = presentation(200);
        let colors: Vec<Color> = (0..200).map(|v| if v % 4 == 1 { Color::Blue } else { Color::Red }).collect();
        let mut s = AdversaryStream::register(0, Box::new(GreedyCopier::new(Color::Red, None)), 3).unwrap();
        drive(&mut s, &colors, &p, 200);
        assert!(s.enumerated().len() >= 5);
        let copy: Vec<usize> = s.enumerated().iter().map(|e| e.vertex).collect();
        for (j, &y) in copy.iter().enumerate() {
            assert_eq!(colors[y], Color::Red);
            for (i, &x) in copy[..j].iter().enumerate() {
                assert_eq!(p.adjacent_built(x, y), p.adjacent_built(i, j));
            }
        }
    }

    #[test]
    fn roster_requires_contiguous_ids() {
        let a = AdversaryStream::register(0, Box::new(FiniteSet::new([1])), 3).unwrap();
        let b = AdversaryStream::register(2, Box::new(FiniteSet::new([1])), 3).unwrap();
        assert_eq!(Roster::new(vec![a, b]).unwrap_err(), RosterError::NotContiguous { position: 1, id: 2 });
        let r = Roster::from_strategies(3, vec![Box::new(ColorChaser::new(Color::Red)), Box::new(FiniteSet::new([3]))]).unwrap();
        assert_eq!(r.names(), vec!["color-chaser(R)".to_string(), "finite-set{3}".to_string()]);
    }

    #[test]
    fn delayed_wakes_late() {
        let p = presentation(10);
        let inner = Box::new(ConstantSet::new(vec![1, 2]));
        let mut s = AdversaryStream::register(0, Box::new(Delayed::new(3, inner)), 3).unwrap();
        assert_eq!(drive(&mut s, &[Color::Red; 10], &p, 6), vec![vec![], vec![], vec![], vec![1], vec![2], vec![]]);
    }

    #[derive(Clone)]
    struct Stutter;
    impl Strategy for Stutter {
        fn name(&self) -> String {
            "stutter".into()
        }
        fn fresh(&self) -> Box<dyn Strategy> {
            Box::new(Stutter)
        }
        fn step(&mut self, _view: &StageView<'_>) -> Vec<usize> {
            vec![7]
        }
    }

    struct Drifting(std::sync::Arc<std::sync::atomic::AtomicUsize>);
    impl Strategy for Drifting {
        fn name(&self) -> String {
            "drifting".into()
        }
        fn fresh(&self) -> Box<dyn Strategy> {
            Box::new(Drifting(self.0.clone()))
        }
        fn step(&mut self, view: &StageView<'_>) -> Vec<usize> {
            let k = self.0.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            if view.stage == 5 { vec![k] } else { Vec::new() }
        }
    }

    #[test]
    fn registration_rejects_bad_strategies() {
        assert!(matches!(
            AdversaryStream::register(0, Box::new(Stutter), 3),
            Err(AdversaryError::Repeated { vertex: 7, stage: 1, .. })
        ));
        let shared = std::sync::Arc::new(std::sync::atomic::AtomicUsize::new(0));
        assert!(matches!(
            AdversaryStream::register(0, Box::new(Drifting(shared)), 3),
            Err(AdversaryError::Nondeterministic { stage: 5, .. })
        ));
    }
}
