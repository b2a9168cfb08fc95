//! Run configuration files.
//!
//! ```toml
//! n = 3
//! stages = 5000
//!
//! [[adversary]]
//! index = 0
//! strategy = "color-chaser"   # constant-set | finite-set | color-chaser | greedy-copier
//! color = "R"
//!
//! [output]
//! trace = "trace.jsonl"
//! coloring = "coloring.txt"
//! ```
//!
//! `constant-set` and `finite-set` take `elements`; `color-chaser` takes
//! `color`; `greedy-copier` takes `color` and an optional `limit`. Any
//! adversary may set `wake` to stay silent before that stage.

use std::ops::Range;
use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::adversary::{
    AdversaryStream, ColorChaser, ConstantSet, Delayed, FiniteSet, GreedyCopier, Roster, Strategy,
};
use crate::color::Color;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    pub index: usize,
    pub strategy: String,
    pub color: Option<Color>,
    pub elements: Option<Vec<usize>>,
    pub limit: Option<usize>,
    pub wake: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub trace: Option<PathBuf>,
    pub coloring: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: Spanned<usize>,
    stages: usize,
    #[serde(default)]
    adversary: Vec<Spanned<AdversaryConfig>>,
    #[serde(default)]
    output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    pub stages: usize,
    /// Sorted by index.
    pub adversaries: Vec<AdversaryConfig>,
    pub output: OutputConfig,
    spans: Vec<Range<usize>>,
    source: String,
}

fn position(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn error_at(source: &str, span: Option<Range<usize>>, message: impl Into<String>) -> ConfigError {
    let (line, column) = span.map_or((1, 1), |s| position(source, s.start));
    ConfigError { line, column, message: message.into() }
}

impl RunConfig {
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(source).map_err(|e| error_at(source, e.span(), e.message()))?;
        if *raw.n.get_ref() < 3 {
            return Err(error_at(source, Some(raw.n.span()), format!("n must be at least 3, got {}", raw.n.get_ref())));
        }
        let mut blocks: Vec<(AdversaryConfig, Range<usize>)> =
            raw.adversary.into_iter().map(|s| (s.get_ref().clone(), s.span())).collect();
        blocks.sort_by_key(|(a, _)| a.index);
        for (expected, (a, span)) in blocks.iter().enumerate() {
            if a.index != expected {
                return Err(error_at(
                    source,
                    Some(span.clone()),
                    format!("adversary indices must be unique and contiguous from 0; expected {expected}, found {}", a.index),
                ));
            }
        }
        let (adversaries, spans) = blocks.into_iter().unzip();
        let config = RunConfig {
            n: raw.n.into_inner(),
            stages: raw.stages,
            adversaries,
            output: raw.output,
            spans,
            source: source.to_owned(),
        };
        for i in 0..config.adversaries.len() {
            config.strategy(i)?;
        }
        Ok(config)
    }

    fn strategy(&self, i: usize) -> Result<Box<dyn Strategy>, ConfigError> {
        let a = &self.adversaries[i];
        let fail = |message: String| error_at(&self.source, Some(self.spans[i].clone()), message);
        let need_color = || a.color.ok_or_else(|| fail(format!("strategy {} needs `color`", a.strategy)));
        let need_elements = || a.elements.clone().ok_or_else(|| fail(format!("strategy {} needs `elements`", a.strategy)));
        let unused = |key: &str, present: bool| {
            if present {
                Err(fail(format!("strategy {} does not take `{key}`", a.strategy)))
            } else {
                Ok(())
            }
        };
        let base: Box<dyn Strategy> = match a.strategy.as_str() {
            "constant-set" | "finite-set" => {
                unused("color", a.color.is_some())?;
                unused("limit", a.limit.is_some())?;
                let elements = need_elements()?;
                if a.strategy == "constant-set" {
                    Box::new(ConstantSet::new(elements))
                } else {
                    Box::new(FiniteSet::new(elements))
                }
            }
            "color-chaser" => {
                unused("elements", a.elements.is_some())?;
                unused("limit", a.limit.is_some())?;
                Box::new(ColorChaser::new(need_color()?))
            }
            "greedy-copier" => {
                unused("elements", a.elements.is_some())?;
                Box::new(GreedyCopier::new(need_color()?, a.limit))
            }
            other => return Err(fail(format!("unknown strategy {other:?}"))),
        };
        Ok(match a.wake {
            Some(w) => Box::new(Delayed::new(w, base)),
            None => base,
        })
    }

    /// Registers every adversary, reporting failures at the offending block.
    pub fn roster(&self) -> Result<Roster, ConfigError> {
        let streams = (0..self.adversaries.len())
            .map(|i| {
                AdversaryStream::register(i, self.strategy(i)?, self.n)
                    .map_err(|e| error_at(&self.source, Some(self.spans[i].clone()), e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Roster::new(streams).expect("indices checked at parse time"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
n = 3
stages = 100

[[adversary]]
index = 1
strategy = "finite-set"
elements = [1, 2, 3]

[[adversary]]
index = 0
strategy = "color-chaser"
color = "B"
wake = 4
"#;

    #[test]
    fn parses_and_sorts() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!((c.n, c.stages), (3, 100));
        assert_eq!(c.adversaries[0].strategy, "color-chaser");
        let roster = c.roster().unwrap();
        assert_eq!(roster.names(), vec!["delayed(4, color-chaser(B))".to_string(), "finite-set{1, 2, 3}".to_string()]);
    }

    #[test]
    fn empty_roster() {
        let c = RunConfig::parse("n = 3\nstages = 0\n").unwrap();
        assert!(c.adversaries.is_empty() && c.output == OutputConfig::default());
    }

    #[test]
    fn errors_carry_lines() {
        let e = RunConfig::parse("n = 3\nstages = -1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = RunConfig::parse("n = 2\nstages = 5\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        let gap = "n = 3\nstages = 5\n[[adversary]]\nindex = 1\nstrategy = \"finite-set\"\nelements = []\n";
        assert_eq!(RunConfig::parse(gap).unwrap_err().line, 3);
        let bad = "n = 3\nstages = 5\n\n[[adversary]]\nindex = 0\nstrategy = \"color-chaser\"\n";
        let e = RunConfig::parse(bad).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("color"));
        let unknown = "n = 3\nstages = 5\nseed = 1\n";
        assert_eq!(RunConfig::parse(unknown).unwrap_err().line, 3);
    }
}
