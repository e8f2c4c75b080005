//! Reading and writing game files.
//!
//! A game file is a TOML document:
//!
//! ```toml
//! players = 2
//! strategies = [2, 2]
//! payoffs = [
//!   [-0.6, -10, 0, -5],
//!   [-0.6, 0, -10, -5],
//! ]
//!
//! [names]
//! players = ["row", "column"]
//! strategies = [["cooperate", "defect"], ["cooperate", "defect"]]
//!
//! [metadata]
//! title = "Prisoner's Dilemma"
//! ```
//!
//! Each payoff array is flattened row-major with player 1's strategy index
//! varying slowest. `names` and `metadata` are optional.

use std::fmt::Write as _;

use toml::{Table, Value};

use crate::error::{DiagnosticCode, ParseError};
use crate::game::{Game, Labels};

const FIELDS: [&str; 5] = ["players", "strategies", "names", "payoffs", "metadata"];

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct Metadata {
    pub title: Option<String>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameFile {
    pub game: Game,
    pub metadata: Metadata,
}

pub fn parse_game(document: &str) -> Result<Game, ParseError> {
    parse_game_file(document).map(|f| f.game)
}

struct Ctx<'a> {
    doc: &'a str,
}

impl Ctx<'_> {
    /// Line where `key = ` or `[key]` first appears, 1-based.
    fn line_of(&self, key: &str) -> Option<usize> {
        self.doc.lines().position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
                || t.starts_with(&format!("[{key}]"))
        })
        .map(|i| i + 1)
    }

    fn err(&self, code: DiagnosticCode, field: &str, message: impl Into<String>) -> ParseError {
        let top = field.split(['.', '[']).next().unwrap_or(field);
        ParseError { code, field: Some(field.to_string()), line: self.line_of(top), message: message.into() }
    }

    fn missing(&self, field: &str) -> ParseError {
        ParseError {
            code: DiagnosticCode::MissingField,
            field: Some(field.to_string()),
            line: None,
            message: format!("required field `{field}` is missing"),
        }
    }

    fn number(&self, v: &Value, field: &str) -> Result<f64, ParseError> {
        let x = match v {
            Value::Integer(i) => *i as f64,
            Value::Float(f) => *f,
            other => {
                return Err(self.err(
                    DiagnosticCode::WrongType,
                    field,
                    format!("expected a number, found {}", other.type_str()),
                ))
            }
        };
        if !x.is_finite() {
            return Err(self.err(DiagnosticCode::NonFinite, field, format!("payoff {x} is not finite")));
        }
        Ok(x)
    }

    fn array<'v>(&self, v: &'v Value, field: &str) -> Result<&'v Vec<Value>, ParseError> {
        v.as_array().ok_or_else(|| {
            self.err(DiagnosticCode::WrongType, field, format!("expected an array, found {}", v.type_str()))
        })
    }

    fn strings(&self, v: &Value, field: &str) -> Result<Vec<String>, ParseError> {
        self.array(v, field)?
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.as_str().map(str::to_string).ok_or_else(|| {
                    self.err(DiagnosticCode::WrongType, &format!("{field}[{i}]"), "expected a string")
                })
            })
            .collect()
    }
}

pub fn parse_game_file(document: &str) -> Result<GameFile, ParseError> {
    let ctx = Ctx { doc: document };
    if document.trim().is_empty() {
        return Err(ParseError {
            code: DiagnosticCode::Syntax,
            field: None,
            line: None,
            message: "document is empty".to_string(),
        });
    }
    let table: Table = document.parse().map_err(|e: toml::de::Error| ParseError {
        code: DiagnosticCode::Syntax,
        field: None,
        line: e.span().map(|s| document[..s.start.min(document.len())].matches('\n').count() + 1),
        message: e.message().to_string(),
    })?;

    if let Some(key) = table.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(ctx.err(DiagnosticCode::WrongType, key, format!("unknown field `{key}`")));
    }

    let players = match table.get("players") {
        None => return Err(ctx.missing("players")),
        Some(Value::Integer(n)) if *n >= 1 => *n as usize,
        Some(Value::Integer(n)) => {
            return Err(ctx.err(DiagnosticCode::InvalidShape, "players", format!("need at least one player, found {n}")))
        }
        Some(v) => {
            return Err(ctx.err(DiagnosticCode::WrongType, "players", format!("expected an integer, found {}", v.type_str())))
        }
    };

    let strategies_v = table.get("strategies").ok_or_else(|| ctx.missing("strategies"))?;
    let mut counts = Vec::new();
    for (i, v) in ctx.array(strategies_v, "strategies")?.iter().enumerate() {
        match v {
            Value::Integer(c) if *c >= 1 => counts.push(*c as usize),
            _ => {
                return Err(ctx.err(
                    DiagnosticCode::InvalidShape,
                    &format!("strategies[{i}]"),
                    "strategy counts must be positive integers",
                ))
            }
        }
    }
    if counts.len() != players {
        return Err(ctx.err(
            DiagnosticCode::LengthMismatch,
            "strategies",
            format!("{} strategy counts for {players} players", counts.len()),
        ));
    }
    let outcomes = counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .ok_or_else(|| ctx.err(DiagnosticCode::InvalidShape, "strategies", "outcome space is too large"))?;

    let payoffs_v = table.get("payoffs").ok_or_else(|| ctx.missing("payoffs"))?;
    let rows = ctx.array(payoffs_v, "payoffs")?;
    if rows.len() != players {
        return Err(ctx.err(
            DiagnosticCode::LengthMismatch,
            "payoffs",
            format!("{} payoff arrays for {players} players", rows.len()),
        ));
    }
    let mut payoffs = Vec::with_capacity(players);
    for (p, row) in rows.iter().enumerate() {
        let field = format!("payoffs[{p}]");
        let entries = ctx.array(row, &field)?;
        if entries.len() != outcomes {
            return Err(ctx.err(
                DiagnosticCode::LengthMismatch,
                &field,
                format!("{} payoffs declared, strategies {counts:?} need {outcomes}", entries.len()),
            ));
        }
        payoffs.push(
            entries
                .iter()
                .enumerate()
                .map(|(k, v)| ctx.number(v, &format!("payoffs[{p}][{k}]")))
                .collect::<Result<Vec<f64>, _>>()?,
        );
    }
    let mut game = Game::new(counts, payoffs)
        .map_err(|e| ctx.err(DiagnosticCode::InvalidShape, "payoffs", e.to_string()))?;

    if let Some(names) = table.get("names") {
        let t = names
            .as_table()
            .ok_or_else(|| ctx.err(DiagnosticCode::WrongType, "names", "expected a table"))?;
        let mut labels = Labels::default();
        if let Some(v) = t.get("players") {
            labels.players = ctx.strings(v, "names.players")?;
        }
        if let Some(v) = t.get("strategies") {
            labels.strategies = ctx
                .array(v, "names.strategies")?
                .iter()
                .enumerate()
                .map(|(i, s)| ctx.strings(s, &format!("names.strategies[{i}]")))
                .collect::<Result<_, _>>()?;
        }
        game = game
            .with_labels(labels)
            .map_err(|e| ctx.err(DiagnosticCode::InvalidShape, "names", e.to_string()))?;
    }

    let mut metadata = Metadata::default();
    if let Some(meta) = table.get("metadata") {
        let t = meta
            .as_table()
            .ok_or_else(|| ctx.err(DiagnosticCode::WrongType, "metadata", "expected a table"))?;
        let text = |key: &str| -> Result<Option<String>, ParseError> {
            t.get(key)
                .map(|v| {
                    v.as_str().map(str::to_string).ok_or_else(|| {
                        ctx.err(DiagnosticCode::WrongType, &format!("metadata.{key}"), "expected a string")
                    })
                })
                .transpose()
        };
        metadata.title = text("title")?;
        metadata.source = text("source")?;
    }

    Ok(GameFile { game, metadata })
}

/// Rounds to 12 significant digits and normalises `-0` to `0`.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Decimal text for `x` with at most 12 significant digits; valid as a TOML
/// and JSON number.
pub fn format_number(x: f64) -> String {
    let r = round12(x);
    let a = r.abs();
    if a != 0.0 && !(1e-5..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

fn string_list(items: &[String]) -> String {
    items.iter().map(|s| quote(s)).collect::<Vec<_>>().join(", ")
}

pub fn emit_game_file(game: &Game, metadata: &Metadata) -> String {
    let mut out = String::new();
    writeln!(out, "players = {}", game.num_players()).unwrap();
    let counts: Vec<String> = game.strategy_counts().iter().map(usize::to_string).collect();
    writeln!(out, "strategies = [{}]", counts.join(", ")).unwrap();
    writeln!(out, "payoffs = [").unwrap();
    for tensor in game.all_payoffs() {
        let nums: Vec<String> = tensor.iter().map(|v| format_number(*v)).collect();
        writeln!(out, "  [{}],", nums.join(", ")).unwrap();
    }
    writeln!(out, "]").unwrap();
    if let Some(labels) = game.labels() {
        writeln!(out, "\n[names]").unwrap();
        if !labels.players.is_empty() {
            writeln!(out, "players = [{}]", string_list(&labels.players)).unwrap();
        }
        if !labels.strategies.is_empty() {
            let inner: Vec<String> = labels.strategies.iter().map(|s| format!("[{}]", string_list(s))).collect();
            writeln!(out, "strategies = [{}]", inner.join(", ")).unwrap();
        }
    }
    if metadata.title.is_some() || metadata.source.is_some() {
        writeln!(out, "\n[metadata]").unwrap();
        if let Some(t) = &metadata.title {
            writeln!(out, "title = {}", quote(t)).unwrap();
        }
        if let Some(s) = &metadata.source {
            writeln!(out, "source = {}", quote(s)).unwrap();
        }
    }
    out
}
