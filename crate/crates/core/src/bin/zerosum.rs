use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use zerosum::equilibrium::EnumerationOptions;
use zerosum::fixtures;
use zerosum::gamefile::{emit_game_file, parse_game_file, round12, GameFile, Metadata};
use zerosum::report::{
    render_audit, render_equilibria, render_json, render_solve, render_text, render_value_identity, run_pipeline,
    AnalysisReport, PipelineConfig, SNAP,
};
use zerosum::transform::{augment_with_passive_player, transform_game_with_tolerance};
use zerosum::{Game, MixedStrategy, StrategyProfile};

/// Analyse finite normal-form games: audit, zero-sum transformation through a
/// passive player, security levels, minimax values and Nash equilibria.
#[derive(Parser)]
#[command(name = "zerosum", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Tolerance for the zero-sum / constant-sum predicates and profile sums.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Largest strategy count per player for support enumeration.
    #[arg(long, global = true, default_value_t = 6)]
    max_support_size: usize,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized self-checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Zero-sum and constant-sum audit.
    Check { file: String },
    /// Emit the transformed game as a game file.
    Transform {
        file: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Emit the augmented game with the passive player at index 0.
        #[arg(long)]
        augment: bool,
    },
    /// Security levels and minimax values of the original and transformed games.
    Solve { file: String },
    /// Nash equilibria of the original and transformed games.
    Equilibria { file: String },
    /// Expected utilities at a profile, e.g. `--profile 1,0:0.5,0.5`.
    Eu {
        file: String,
        #[arg(long)]
        profile: String,
    },
    /// Full analysis report.
    Report {
        file: String,
        /// Profiles to evaluate; may be repeated.
        #[arg(long)]
        profile: Vec<String>,
    },
    /// List the bundled fixtures.
    Fixtures,
}

enum Failure {
    Input(String),
    Internal(String),
}

/// Reads `file` from disk, falling back to a bundled fixture of that name.
fn load(file: &str) -> Result<GameFile, Failure> {
    let text = if Path::new(file).exists() {
        std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("{file}: {e}")))?
    } else if let Some(doc) = fixtures::get(file) {
        doc.to_string()
    } else {
        return Err(Failure::Input(format!("{file}: no such file or bundled fixture")));
    };
    parse_game_file(&text).map_err(|e| Failure::Input(format!("{file}: {e}")))
}

fn parse_profile(game: &Game, spec: &str, tol: f64) -> Result<StrategyProfile, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != game.num_players() {
        return Err(Failure::Input(format!(
            "profile `{spec}` has {} players, game has {}",
            parts.len(),
            game.num_players()
        )));
    }
    let mut strategies = Vec::with_capacity(parts.len());
    for (p, part) in parts.iter().enumerate() {
        let weights = part
            .split(',')
            .map(|w| w.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| Failure::Input(format!("profile `{spec}`, player {}: {e}", p + 1)))?;
        if weights.len() != game.strategy_counts()[p] {
            return Err(Failure::Input(format!(
                "profile `{spec}`, player {}: {} weights for {} strategies",
                p + 1,
                weights.len(),
                game.strategy_counts()[p]
            )));
        }
        strategies.push(
            MixedStrategy::with_tolerance(weights, tol)
                .map_err(|e| Failure::Input(format!("profile `{spec}`, player {}: {e}", p + 1)))?,
        );
    }
    Ok(StrategyProfile::new(strategies))
}

fn config(global: &GlobalOpts, profiles: Vec<(String, StrategyProfile)>) -> PipelineConfig {
    let mut c = PipelineConfig {
        tolerance: global.tolerance,
        enumeration: EnumerationOptions { max_strategies: global.max_support_size, ..EnumerationOptions::default() },
        profiles,
        seed: global.seed,
        ..PipelineConfig::default()
    };
    c.solver.zero_sum_tol = global.tolerance;
    c
}

fn analyse(global: &GlobalOpts, file: &str, profiles: &[String]) -> Result<AnalysisReport, Failure> {
    let f = load(file)?;
    let parsed = profiles
        .iter()
        .map(|p| parse_profile(&f.game, p, global.tolerance).map(|sp| (p.clone(), sp)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(run_pipeline(&f.game, &f.metadata, &config(global, parsed)))
}

fn emit<T: Serialize>(global: &GlobalOpts, json: &T, text: impl FnOnce() -> String) {
    if global.json {
        print!("{}", render_json(json));
    } else {
        print!("{}", text());
    }
}

/// Fails with an internal error when the report's self-checks did not pass.
fn checked(report: &AnalysisReport) -> Result<(), Failure> {
    if report.self_checks.passed {
        Ok(())
    } else {
        Err(Failure::Internal(report.self_checks.failures.join("; ")))
    }
}

fn snapped(game: &Game) -> Game {
    let payoffs = game
        .all_payoffs()
        .iter()
        .map(|t| t.iter().map(|v| if v.abs() < SNAP { 0.0 } else { round12(*v) }).collect())
        .collect();
    game.with_payoffs(payoffs).expect("snapping keeps the shape")
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Check { file } => {
            let r = analyse(g, file, &[])?;
            emit(g, &r.audit, || {
                let mut s = String::new();
                render_audit(&r, &mut s);
                s
            });
            checked(&r)
        }
        Command::Transform { file, output, augment } => {
            let f = load(file)?;
            let result = transform_game_with_tolerance(&f.game, g.tolerance);
            if result.max_abs_residual > g.tolerance {
                return Err(Failure::Internal(format!(
                    "transformed payoffs sum to {} somewhere",
                    result.max_abs_residual
                )));
            }
            let game = if *augment { augment_with_passive_player(&f.game) } else { result.transformed_game };
            let metadata = Metadata {
                title: Some(format!(
                    "{} ({})",
                    f.metadata.title.as_deref().unwrap_or("game"),
                    if *augment { "augmented with passive player" } else { "transformed" }
                )),
                source: f.metadata.source.clone(),
            };
            let text = emit_game_file(&snapped(&game), &metadata);
            match output {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Solve { file } => {
            let r = analyse(g, file, &[])?;
            emit(g, &r.solve, || {
                let mut s = String::new();
                render_solve(&r, &mut s);
                s
            });
            checked(&r)
        }
        Command::Equilibria { file } => {
            let r = analyse(g, file, &[])?;
            emit(g, &r.equilibria, || {
                let mut s = String::new();
                render_equilibria(&r, &mut s);
                s
            });
            checked(&r)
        }
        Command::Eu { file, profile } => {
            let r = analyse(g, file, std::slice::from_ref(profile))?;
            let rows = &r.value_identity[..1];
            emit(g, &rows, || {
                let mut trimmed = r.clone();
                trimmed.value_identity.truncate(1);
                let mut s = String::new();
                render_value_identity(&trimmed, &mut s);
                s
            });
            checked(&r)
        }
        Command::Report { file, profile } => {
            let r = analyse(g, file, profile)?;
            emit(g, &r, || render_text(&r));
            checked(&r)
        }
        Command::Fixtures => {
            let names: Vec<&str> = fixtures::ALL.iter().map(|(n, _)| *n).collect();
            emit(g, &names, || names.iter().map(|n| format!("{n}\n")).collect());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal check failed: {msg}");
            ExitCode::from(2)
        }
    }
}
