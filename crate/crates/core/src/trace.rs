//! Trace and colouring file formats.
//!
//! A trace is JSON lines: a header record followed by one record per event,
//! each tagged with `kind`. A colouring file is a header line followed by one
//! `stage color` line per coloured vertex.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Color;

pub const TRACE_FORMAT: &str = "henson-trace";
pub const TRACE_VERSION: u32 = 1;
pub const COLORING_FORMAT: &str = "henson-coloring";
pub const COLORING_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing or malformed header: {0}")]
    Header(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub stages: usize,
    pub roster: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum TraceEvent {
    StageStart {
        stage: usize,
    },
    Activated {
        stage: usize,
        requirement: usize,
    },
    FirstFollower {
        stage: usize,
        requirement: usize,
        vertex: usize,
        enumerated_at: usize,
    },
    TargetChosen {
        stage: usize,
        requirement: usize,
        graph6: String,
        k: usize,
    },
    NewFollower {
        stage: usize,
        requirement: usize,
        vertex: usize,
        enumerated_at: usize,
    },
    /// Reservation of the neighbors of `vertex` above `threshold`.
    Reserved {
        stage: usize,
        requirement: usize,
        vertex: usize,
        color: Color,
        threshold: usize,
    },
    Injured {
        stage: usize,
        requirement: usize,
        by: usize,
    },
    Colored {
        stage: usize,
        vertex: usize,
        color: Color,
    },
}

impl TraceEvent {
    pub fn stage(&self) -> usize {
        match *self {
            TraceEvent::StageStart { stage }
            | TraceEvent::Activated { stage, .. }
            | TraceEvent::FirstFollower { stage, .. }
            | TraceEvent::TargetChosen { stage, .. }
            | TraceEvent::NewFollower { stage, .. }
            | TraceEvent::Reserved { stage, .. }
            | TraceEvent::Injured { stage, .. }
            | TraceEvent::Colored { stage, .. } => stage,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TraceEvent::StageStart { .. } => "StageStart",
            TraceEvent::Activated { .. } => "Activated",
            TraceEvent::FirstFollower { .. } => "FirstFollower",
            TraceEvent::TargetChosen { .. } => "TargetChosen",
            TraceEvent::NewFollower { .. } => "NewFollower",
            TraceEvent::Reserved { .. } => "Reserved",
            TraceEvent::Injured { .. } => "Injured",
            TraceEvent::Colored { .. } => "Colored",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<TraceEvent>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum HeaderRecord {
    Header(TraceHeader),
}

impl Trace {
    pub fn new(n: usize, stages: usize, roster: Vec<String>) -> Self {
        Trace {
            header: TraceHeader { format: TRACE_FORMAT.into(), version: TRACE_VERSION, n, stages, roster },
            events: Vec::new(),
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&HeaderRecord::Header(self.header.clone())).expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Trace, TraceError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| TraceError::Header("empty trace".into()))?;
        let HeaderRecord::Header(header) =
            serde_json::from_str(first).map_err(|e| TraceError::Header(e.to_string()))?;
        if header.format != TRACE_FORMAT || header.version != TRACE_VERSION {
            return Err(TraceError::Header(format!("unsupported format {} v{}", header.format, header.version)));
        }
        let events = lines
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| TraceError::Parse { line: i + 1, message: e.to_string() }))
            .collect::<Result<_, _>>()?;
        Ok(Trace { header, events })
    }
}

pub fn coloring_to_text(colors: &[Color]) -> String {
    let mut out = format!("{COLORING_FORMAT} {COLORING_VERSION}\n");
    for (s, c) in colors.iter().enumerate() {
        writeln!(out, "{s} {c}").expect("writing to a String");
    }
    out
}

pub fn coloring_from_text(text: &str) -> Result<Vec<Color>, TraceError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == format!("{COLORING_FORMAT} {COLORING_VERSION}") => {}
        other => return Err(TraceError::Header(format!("bad colouring header {:?}", other.map(|(_, h)| h)))),
    }
    let mut colors = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| TraceError::Parse { line: i + 1, message };
        let mut parts = line.split_whitespace();
        let (Some(stage), Some(color), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `stage color`, got {line:?}")));
        };
        let stage: usize = stage.parse().map_err(|_| err(format!("bad stage {stage:?}")))?;
        if stage != colors.len() {
            return Err(err(format!("expected stage {}, got {stage}", colors.len())));
        }
        colors.push(color.parse().map_err(err)?);
    }
    Ok(colors)
}
