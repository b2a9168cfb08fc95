//! Planned colours `p(x, s)` kept as prioritized symbolic reservations.
//!
//! A reservation never lists its vertices: it covers every `x` adjacent to
//! its anchor with `x > threshold`. The planned colour of `x` at stage `s` is
//! the colour of the strongest reservation live at `s` that covers `x`, or
//! red when none does.

use crate::color::Color;
use crate::presentation::Presentation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reservation {
    /// Priority of the owning requirement; lower is stronger.
    pub owner: usize,
    pub color: Color,
    pub anchor: usize,
    pub threshold: usize,
    pub created: usize,
    /// Stage at which the owner was injured.
    pub cancelled: Option<usize>,
}

impl Reservation {
    /// Live for the colouring decision at the end of stage `s`.
    pub fn live_at(&self, s: usize) -> bool {
        self.created <= s && self.cancelled.is_none_or(|c| c > s)
    }

    pub fn is_live(&self) -> bool {
        self.cancelled.is_none()
    }

    pub fn covers(&self, x: usize, p: &Presentation) -> bool {
        x > self.threshold && p.adjacent_built(self.anchor, x)
    }
}

pub const DEFAULT_COLOR: Color = Color::Red;

#[derive(Debug, Clone, Default)]
pub struct ReservationLedger {
    entries: Vec<Reservation>,
}

impl ReservationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[Reservation] {
        &self.entries
    }

    pub fn reserve(&mut self, owner: usize, color: Color, anchor: usize, threshold: usize, stage: usize) -> usize {
        self.entries.push(Reservation { owner, color, anchor, threshold, created: stage, cancelled: None });
        self.entries.len() - 1
    }

    /// Kills every live entry of `owner`.
    pub fn cancel_owner(&mut self, owner: usize, stage: usize) {
        for e in self.entries.iter_mut().filter(|e| e.owner == owner && e.cancelled.is_none()) {
            e.cancelled = Some(stage);
        }
    }

    /// The strongest live entry covering `x` at stage `s`.
    pub fn strongest_covering(&self, x: usize, s: usize, p: &Presentation) -> Option<&Reservation> {
        self.entries.iter().filter(|e| e.live_at(s) && e.covers(x, p)).min_by_key(|e| (e.owner, e.created))
    }

    /// Planned colour of `x` at stage `s`.
    pub fn p_eval(&self, x: usize, s: usize, p: &Presentation) -> Color {
        self.strongest_covering(x, s, p).map_or(DEFAULT_COLOR, |e| e.color)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Presentation, usize, usize) {
        let mut p = Presentation::new(3).unwrap();
        p.ensure_stage(400);
        let anchor = 0;
        let x = *p.neighbors_built(anchor, 400).iter().find(|&&v| v > 10).expect("neighbor of 0");
        (p, anchor, x)
    }

    #[test]
    fn empty_ledger_is_red() {
        let (p, _, x) = setup();
        let ledger = ReservationLedger::new();
        assert_eq!(ledger.p_eval(x, 0, &p), Color::Red);
        assert_eq!(ledger.p_eval(3, 100, &p), Color::Red);
    }

    #[test]
    fn single_cover() {
        let (p, anchor, x) = setup();
        let mut ledger = ReservationLedger::new();
        ledger.reserve(4, Color::Blue, anchor, 5, 2);
        assert_eq!(ledger.p_eval(x, 2, &p), Color::Blue);
        // Not yet created at stage 1; at or below the threshold is uncovered.
        assert_eq!(ledger.p_eval(x, 1, &p), Color::Red);
        let mut tight = ReservationLedger::new();
        tight.reserve(4, Color::Blue, anchor, x, 2);
        assert_eq!(tight.p_eval(x, 2, &p), Color::Red);
    }

    #[test]
    fn strongest_wins() {
        let (p, anchor, x) = setup();
        let mut ledger = ReservationLedger::new();
        ledger.reserve(4, Color::Blue, anchor, 0, 0);
        ledger.reserve(1, Color::Red, anchor, 0, 0);
        assert_eq!(ledger.p_eval(x, 0, &p), Color::Red);
        ledger.cancel_owner(1, 3);
        assert_eq!(ledger.p_eval(x, 2, &p), Color::Red);
        assert_eq!(ledger.p_eval(x, 3, &p), Color::Blue);
        assert!(!ledger.entries()[1].is_live());
    }
}
