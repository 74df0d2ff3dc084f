//! Command-line front end: parses scene JSON, dispatches to the numeric
//! modules, writes JSON reports and optional SVG plots.
//!
//! Exit codes: 0 success, 2 schema error (bad flags or scene file),
//! 3 domain error (chart exits, divergence, empty sets), 4 violation
//! (a certificate failed or a retraction was undefined; the witnesses are
//! in the JSON report).

mod commands;
mod scene;
mod svg;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::commands::{Knobs, Outcome};
use crate::scene::SceneFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommandKind {
    Curvature,
    Certify,
    Retract,
    Counterexample,
    Project,
    Geodesic,
    Busemann,
}

#[derive(Parser, Debug)]
#[command(
    name = "hadamard",
    version,
    about = "Geometry toolkit for charts with bounded nonpositive curvature"
)]
struct Cli {
    /// Scene JSON file.
    #[arg(long)]
    scene: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG plot path (2-d charts only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Overrides the scene resolution.
    #[arg(long)]
    resolution: Option<usize>,
    /// Overrides the scene epsilon (counterexample).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Overrides the scene seed.
    #[arg(long)]
    seed: Option<u64>,
    /// What to compute.
    #[arg(long, value_enum)]
    command: CommandKind,
}

/// A failed run with its exit code.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn schema(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    pub fn violation(message: impl Into<String>) -> Failure {
        Failure {
            code: 4,
            message: message.into(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}

fn run(cli: &Cli) -> Result<i32, Failure> {
    let scene = SceneFile::load(&cli.scene)?;
    let knobs = Knobs {
        resolution: cli.resolution.or(scene.resolution),
        epsilon: cli.epsilon.or(scene.epsilon),
        seed: cli.seed.or(scene.seed).unwrap_or(0),
    };
    let want_svg = cli.svg.is_some();
    let outcome: Outcome = match cli.command {
        CommandKind::Curvature => commands::curvature(&scene, &knobs, want_svg)?,
        CommandKind::Certify => commands::certify(&scene, &knobs, want_svg)?,
        CommandKind::Retract => commands::retract(&scene, &knobs, want_svg)?,
        CommandKind::Counterexample => commands::counterexample(&scene, &knobs, want_svg)?,
        CommandKind::Project => commands::project(&scene, &knobs, want_svg)?,
        CommandKind::Geodesic => commands::geodesic(&scene, &knobs, want_svg)?,
        CommandKind::Busemann => commands::busemann(&scene, &knobs, want_svg)?,
    };

    let mut text = serde_json::to_string_pretty(&outcome.report)
        .map_err(|e| Failure::domain(format!("report serialization: {e}")))?;
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Failure::domain(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(svg)) = (&cli.svg, &outcome.svg) {
        std::fs::write(path, svg)
            .map_err(|e| Failure::domain(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(outcome.exit)
}
