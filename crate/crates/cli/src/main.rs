use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use henson_core::config::RunConfig;
use henson_core::construction::{run, RunError};
use henson_core::folkman::{folkman_witness, FolkmanError};
use henson_core::graph::FiniteGraph;
use henson_core::graph6::encode_graph6;
use henson_core::presentation::Presentation;
use henson_core::trace::{coloring_from_text, coloring_to_text, Trace};
use henson_core::verify::verify_trace;

const USAGE: u8 = 1;
const VERIFICATION: u8 = 2;
const EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "henson", version, about = "Computable Henson graphs and a coloring with no c.e. homogeneous set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the first `stages` vertices of the presentation.
    Present {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        #[arg(long, visible_alias = "m")]
        stages: usize,
        #[arg(long, value_enum, default_value = "graph6")]
        format: Format,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the least witness graph; summary goes to stderr.
    Folkman {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the construction and write the trace and coloring.
    Color {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config file's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace against the config and report V1-V6.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        coloring: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Graph6,
    Adjlist,
}

/// Failure paired with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: USAGE, error: e.into() }
    }
}

fn fail(code: u8, error: anyhow::Error) -> Failure {
    Failure { code, error }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn adjlist(g: &FiniteGraph) -> String {
    let mut s = String::new();
    for v in 0..g.vertex_count() {
        let ns: Vec<String> = g.neighbors(v).map(|u| u.to_string()).collect();
        let _ = writeln!(s, "{v}:{}{}", if ns.is_empty() { "" } else { " " }, ns.join(" "));
    }
    s
}

fn present(n: usize, stages: usize, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let mut p = Presentation::new(n)?;
    let g = p.restriction(stages);
    let text = match format {
        Format::Graph6 => encode_graph6(&g)? + "\n",
        Format::Adjlist => adjlist(&g),
    };
    Ok(emit(out, &text)?)
}

fn folkman(n: usize, k: usize, max_vertices: usize, out: Option<&Path>) -> Result<(), Failure> {
    let cert = match folkman_witness(n, k, max_vertices) {
        Ok(c) => c,
        Err(e @ FolkmanError::Exhausted { .. }) => return Err(fail(EXHAUSTED, e.into())),
        Err(e) => return Err(e.into()),
    };
    emit(out, &(encode_graph6(&cert.graph)? + "\n"))?;
    eprintln!("n = {}, k = {}", cert.n, cert.k);
    eprintln!("vertices: {}", cert.graph.vertex_count());
    eprintln!("edges: {}", cert.graph.edge_count());
    eprintln!("source: {:?}", cert.source);
    eprintln!("candidates examined: {}", cert.candidates_examined);
    eprintln!("partition search nodes: {}", cert.partitions_checked);
    Ok(())
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let source = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RunConfig::parse(&source).with_context(|| format!("{}", path.display()))
}

/// Where the configured (or default) output file lives.
fn output_path(config: &RunConfig, config_path: &Path, dir: Option<&Path>, trace: bool) -> PathBuf {
    let configured = if trace { config.output.trace.clone() } else { config.output.coloring.clone() };
    let name = configured.unwrap_or_else(|| if trace { "trace.jsonl" } else { "coloring.txt" }.into());
    let base = dir.map(Path::to_path_buf).unwrap_or_else(|| config_path.parent().map(Path::to_path_buf).unwrap_or_default());
    base.join(name)
}

fn color(config_path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let config = load_config(config_path)?;
    let roster = config.roster().with_context(|| format!("{}", config_path.display()))?;
    let output = match run(config.n, &roster, config.stages) {
        Ok(o) => o,
        Err(e @ RunError::Target { .. }) => return Err(fail(EXHAUSTED, e.into())),
        Err(e @ RunError::Invariant { .. }) => return Err(fail(VERIFICATION, e.into())),
        Err(e) => return Err(e.into()),
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let trace_path = output_path(&config, config_path, out, true);
    let coloring_path = output_path(&config, config_path, out, false);
    emit(Some(&trace_path), &output.trace.to_jsonl())?;
    emit(Some(&coloring_path), &coloring_to_text(&output.coloring))?;
    let reds = output.coloring.iter().filter(|c| c.letter() == 'R').count();
    println!("stages: {}", config.stages);
    println!("adversaries: {}", roster.len());
    println!("colored: {} ({} R, {} B)", output.coloring.len(), reds, output.coloring.len() - reds);
    println!("trace: {}", trace_path.display());
    println!("coloring: {}", coloring_path.display());
    Ok(())
}

fn verify(config_path: &Path, trace: Option<&Path>, coloring: Option<&Path>) -> Result<(), Failure> {
    let config = load_config(config_path)?;
    let roster = config.roster().with_context(|| format!("{}", config_path.display()))?;
    let trace_path = trace.map_or_else(|| output_path(&config, config_path, None, true), Path::to_path_buf);
    let coloring_path = coloring.map_or_else(|| output_path(&config, config_path, None, false), Path::to_path_buf);
    let read = |p: &Path| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let trace = Trace::from_jsonl(&read(&trace_path)?)
        .map_err(|e| fail(VERIFICATION, anyhow!("{}: {e}", trace_path.display())))?;
    let coloring = coloring_from_text(&read(&coloring_path)?)
        .map_err(|e| fail(VERIFICATION, anyhow!("{}: {e}", coloring_path.display())))?;
    let mut p = Presentation::new(config.n)?;
    let report = verify_trace(&trace, &coloring, &mut p, &roster);
    print!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<String> = report.failed_checks().iter().map(|c| c.to_string()).collect();
        Err(fail(VERIFICATION, anyhow!("verification failed: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Present { n, stages, format, out } => present(*n as usize, *stages, *format, out.as_deref()),
        Command::Folkman { n, k, max_vertices, out } => folkman(*n as usize, *k as usize, *max_vertices, out.as_deref()),
        Command::Color { config, out } => color(config, out.as_deref()),
        Command::Verify { config, trace, coloring } => verify(config, trace.as_deref(), coloring.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
