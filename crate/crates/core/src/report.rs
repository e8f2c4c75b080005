//! End-to-end analysis: audit, transformation, solving, equilibria and the
//! expected-value identity, rendered as text or JSON.
//!
//! Every float in an [`AnalysisReport`] is rounded to 12 significant digits,
//! and magnitudes below `1e-12` are written as `0`, so that the text and JSON
//! renderings are stable across runs.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibrium::{pure_nash, support_enumeration_2p, EnumerationOptions, EquilibriumSet, Method};
use crate::game::{Game, MixedStrategy, StrategyProfile, DEFAULT_TOLERANCE};
use crate::gamefile::{format_number, round12, Metadata};
use crate::minimax::{
    guaranteed_value, security_levels, solve_matrix_game, solve_zero_sum_2p, value_identity_report, Maximin,
    SolverOptions,
};
use crate::transform::{augment_with_passive_player, transform_game_with_tolerance, TransformResult};

/// Values below this magnitude are reported as exactly zero.
pub const SNAP: f64 = 1e-12;

/// Tolerance for the expected-value identity self-check.
const IDENTITY_TOL: f64 = 1e-9;

/// Number of seeded random profiles used to re-check the value identity.
const RANDOM_PROFILES: usize = 8;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Tolerance for the zero-sum and constant-sum predicates.
    pub tolerance: f64,
    pub solver: SolverOptions,
    pub enumeration: EnumerationOptions,
    /// Pure-profile scans are skipped above this many joint outcomes.
    pub max_pure_outcomes: usize,
    /// Maximin LPs are skipped when a player faces more opponent profiles.
    pub max_lp_rows: usize,
    /// Labelled profiles to evaluate. The uniform profile is used when empty.
    pub profiles: Vec<(String, StrategyProfile)>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tolerance: DEFAULT_TOLERANCE,
            solver: SolverOptions::default(),
            enumeration: EnumerationOptions::default(),
            max_pure_outcomes: 100_000,
            max_lp_rows: 2_000,
            profiles: Vec::new(),
            seed: 0,
        }
    }
}

fn clean(x: f64) -> f64 {
    if x.abs() < SNAP {
        0.0
    } else {
        round12(x)
    }
}

fn clean_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| clean(*x)).collect()
}

fn clean_profile(p: &StrategyProfile) -> Vec<Vec<f64>> {
    p.strategies().iter().map(|s| clean_vec(s.weights())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Section<T> {
    Done(T),
    Skipped { reason: String },
}

impl<T> Section<T> {
    pub fn done(&self) -> Option<&T> {
        match self {
            Section::Done(t) => Some(t),
            Section::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Audit {
    pub zero_sum: bool,
    pub constant_sum: bool,
    /// Common total when the game is constant-sum.
    pub constant: Option<f64>,
    pub sum_min: f64,
    pub sum_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformSection {
    /// `x₀`, flattened in outcome order.
    pub passive_payoff: Vec<f64>,
    /// `m·x₀`, the passive player's payoff in the augmented game.
    pub passive_player_payoff: Vec<f64>,
    pub transformed_payoffs: Vec<Vec<f64>>,
    /// `max_ω |Σᵢ x̃ᵢ(ω)|` over the active players.
    pub max_abs_residual: f64,
    pub transformed_zero_sum: bool,
    /// Range of the total over all `m+1` players of the augmented game.
    pub augmented_sum_min: f64,
    pub augmented_sum_max: f64,
    pub augmented_constant_sum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityLevel {
    pub player: usize,
    pub value: f64,
    pub strategy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueBounds {
    /// `sup_{p₁} inf_{p₂} E{x₁}`
    pub lower: f64,
    /// `inf_{p₂} sup_{p₁} E{x₁}`
    pub upper: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSumSolution {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub row_strategy: Vec<f64>,
    pub column_strategy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSection {
    /// `two_player` or `security_levels` (three or more players: the upper
    /// value is not computed).
    pub kind: String,
    pub original_security: Vec<SecurityLevel>,
    pub transformed_security: Vec<SecurityLevel>,
    /// Player 1's lower and upper values in the original game.
    pub original_bounds: Option<ValueBounds>,
    pub transformed_solution: Option<ZeroSumSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumEntry {
    pub profile: Vec<Vec<f64>>,
    pub payoffs: Vec<f64>,
    pub max_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub method: Method,
    pub degenerate: bool,
    pub skipped_singular: usize,
    pub entries: Vec<EquilibriumEntry>,
}

impl From<&EquilibriumSet> for EquilibriumReport {
    fn from(set: &EquilibriumSet) -> Self {
        EquilibriumReport {
            method: set.method,
            degenerate: set.degenerate,
            skipped_singular: set.skipped_singular,
            entries: set
                .entries
                .iter()
                .map(|e| EquilibriumEntry {
                    profile: clean_profile(&e.profile),
                    payoffs: clean_vec(&e.payoffs),
                    max_regret: clean(e.max_regret),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriaSection {
    pub original_pure: Section<EquilibriumReport>,
    pub transformed_pure: Section<EquilibriumReport>,
    pub original_mixed: Section<EquilibriumReport>,
    pub transformed_mixed: Section<EquilibriumReport>,
    /// Whether the original and transformed games have the same equilibrium
    /// profiles (mixed sets when available, otherwise pure).
    pub same_profiles: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueIdentityRow {
    pub label: String,
    pub profile: Vec<Vec<f64>>,
    pub e_original: Vec<f64>,
    pub e_passive: f64,
    pub e_transformed: Vec<f64>,
    pub passive_player_payoff: f64,
    pub residual: f64,
    pub regret_original: f64,
    pub regret_transformed: f64,
    /// Per player: whether this strategy guarantees the player's security
    /// level in the transformed game.
    pub secures_transformed_value: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfChecks {
    pub seed: u64,
    pub random_profiles: usize,
    pub max_identity_residual: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub title: Option<String>,
    pub players: usize,
    pub strategies: Vec<usize>,
    pub strategy_names: Option<Vec<Vec<String>>>,
    pub tolerance: f64,
    pub audit: Audit,
    pub transform: TransformSection,
    pub solve: Section<SolveSection>,
    pub equilibria: EquilibriaSection,
    pub value_identity: Vec<ValueIdentityRow>,
    pub self_checks: SelfChecks,
}

struct Checks {
    failures: Vec<String>,
}

impl Checks {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn security_rows(levels: &[Maximin]) -> Vec<SecurityLevel> {
    levels
        .iter()
        .enumerate()
        .map(|(player, m)| SecurityLevel { player, value: clean(m.value), strategy: clean_vec(m.strategy.weights()) })
        .collect()
}

fn random_profile(game: &Game, rng: &mut ChaCha8Rng) -> StrategyProfile {
    StrategyProfile::new(
        game.strategy_counts()
            .iter()
            .map(|&c| {
                let w: Vec<f64> = (0..c).map(|_| rng.gen::<f64>() + 1e-6).collect();
                let s: f64 = w.iter().sum();
                MixedStrategy::from_solver(w.into_iter().map(|v| v / s).collect())
            })
            .collect(),
    )
}

fn max_opponent_profiles(game: &Game) -> usize {
    game.strategy_counts().iter().map(|&c| game.num_outcomes() / c).max().unwrap_or(1)
}

struct Solved {
    section: Section<SolveSection>,
    transformed_levels: Option<Vec<Maximin>>,
    optimal_profile: Option<StrategyProfile>,
}

fn solve_stage(game: &Game, tr: &TransformResult, config: &PipelineConfig, checks: &mut Checks) -> Solved {
    let rows = max_opponent_profiles(game);
    if rows > config.max_lp_rows {
        return Solved {
            section: Section::Skipped {
                reason: format!("{rows} opponent profiles exceed the LP row cap of {}", config.max_lp_rows),
            },
            transformed_levels: None,
            optimal_profile: None,
        };
    }
    let t = &tr.transformed_game;
    let outcome = (|| -> Result<Solved, crate::error::SolveError> {
        let original = security_levels(game, &config.solver)?;
        let transformed = security_levels(t, &config.solver)?;
        for (name, g, levels) in [("original", game, &original), ("transformed", t, &transformed)] {
            for (p, m) in levels.iter().enumerate() {
                let g_value = guaranteed_value(g, p, &m.strategy)?;
                checks.require(g_value >= m.value - config.solver.gap_tol, || {
                    format!("{name} security strategy of player {p} guarantees {g_value}, below {}", m.value)
                });
            }
        }
        let mut section = SolveSection {
            kind: if game.num_players() == 2 { "two_player" } else { "security_levels" }.to_string(),
            original_security: security_rows(&original),
            transformed_security: security_rows(&transformed),
            original_bounds: None,
            transformed_solution: None,
        };
        let mut optimal_profile =
            Some(StrategyProfile::new(transformed.iter().map(|m| m.strategy.clone()).collect()));
        if game.num_players() == 2 {
            let b = solve_matrix_game(&game.matrix(0), &config.solver)?;
            let upper = b.upper_value.unwrap_or(f64::NAN);
            checks.require(b.lower_value <= upper + config.solver.gap_tol, || {
                format!("original lower value {} exceeds upper value {upper}", b.lower_value)
            });
            section.original_bounds = Some(ValueBounds {
                lower: clean(b.lower_value),
                upper: clean(upper),
                gap: clean(upper - b.lower_value),
            });
            let z = solve_zero_sum_2p(t, &config.solver)?;
            let row = z.maximin_strategy.clone();
            let col = z.minimax_strategy.clone().expect("two-player solution has a column strategy");
            section.transformed_solution = Some(ZeroSumSolution {
                value: clean(z.lower_value),
                lower: clean(z.lower_value),
                upper: clean(z.upper_value.unwrap_or(f64::NAN)),
                gap: clean(z.duality_gap.unwrap_or(0.0)),
                row_strategy: clean_vec(row.weights()),
                column_strategy: clean_vec(col.weights()),
            });
            optimal_profile = Some(StrategyProfile::new(vec![row, col]));
        }
        Ok(Solved { section: Section::Done(section), transformed_levels: Some(transformed), optimal_profile })
    })();
    outcome.unwrap_or_else(|e| Solved {
        section: Section::Skipped { reason: format!("solver error: {e}") },
        transformed_levels: None,
        optimal_profile: None,
    })
}

fn pure_stage(game: &Game, config: &PipelineConfig, checks: &mut Checks, name: &str) -> Section<EquilibriumReport> {
    if game.num_outcomes() > config.max_pure_outcomes {
        return Section::Skipped {
            reason: format!(
                "{} joint outcomes exceed the pure-scan cap of {}",
                game.num_outcomes(),
                config.max_pure_outcomes
            ),
        };
    }
    let set = pure_nash(game, config.tolerance);
    for e in &set.entries {
        checks.require(e.max_regret <= config.tolerance, || format!("{name} pure equilibrium with regret {}", e.max_regret));
    }
    Section::Done((&set).into())
}

fn mixed_stage(game: &Game, config: &PipelineConfig, checks: &mut Checks, name: &str) -> (Section<EquilibriumReport>, Option<EquilibriumSet>) {
    if game.num_players() != 2 {
        return (
            Section::Skipped { reason: format!("support enumeration needs 2 players, game has {}", game.num_players()) },
            None,
        );
    }
    match support_enumeration_2p(game, &config.enumeration) {
        Ok(set) => {
            for e in &set.entries {
                checks.require(e.max_regret <= config.enumeration.regret_tol, || {
                    format!("{name} equilibrium with regret {}", e.max_regret)
                });
            }
            (Section::Done((&set).into()), Some(set))
        }
        Err(e) => (Section::Skipped { reason: e.to_string() }, None),
    }
}

fn same_profiles(a: &[EquilibriumEntry], b: &[EquilibriumEntry]) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| {
            b.iter().any(|y| {
                x.profile.iter().flatten().zip(y.profile.iter().flatten()).all(|(u, v)| (u - v).abs() <= 1e-6)
            })
        })
}

pub fn run_pipeline(game: &Game, metadata: &Metadata, config: &PipelineConfig) -> AnalysisReport {
    let mut checks = Checks { failures: Vec::new() };
    let m = game.num_players();

    let cs = game.constant_sum(config.tolerance);
    let audit = Audit {
        zero_sum: game.is_zero_sum(config.tolerance),
        constant_sum: cs.constant.is_some(),
        constant: cs.constant.map(clean),
        sum_min: clean(cs.min_total),
        sum_max: clean(cs.max_total),
    };

    let tr = transform_game_with_tolerance(game, config.tolerance);
    checks.require(tr.max_abs_residual <= config.tolerance, || {
        format!("transformed payoffs sum to {} somewhere", tr.max_abs_residual)
    });
    let augmented = augment_with_passive_player(game);
    let acs = augmented.constant_sum(config.tolerance);
    let transform = TransformSection {
        passive_payoff: clean_vec(&tr.passive_payoff),
        passive_player_payoff: clean_vec(augmented.payoffs(0)),
        transformed_payoffs: tr.transformed_game.all_payoffs().iter().map(|t| clean_vec(t)).collect(),
        max_abs_residual: clean(tr.max_abs_residual),
        transformed_zero_sum: tr.transformed_game.is_zero_sum(config.tolerance),
        augmented_sum_min: clean(acs.min_total),
        augmented_sum_max: clean(acs.max_total),
        augmented_constant_sum: acs.constant.is_some(),
    };

    let solved = solve_stage(game, &tr, config, &mut checks);

    let original_pure = pure_stage(game, config, &mut checks, "original");
    let transformed_pure = pure_stage(&tr.transformed_game, config, &mut checks, "transformed");
    let (original_mixed, _) = mixed_stage(game, config, &mut checks, "original");
    let (transformed_mixed, transformed_set) = mixed_stage(&tr.transformed_game, config, &mut checks, "transformed");
    let game_value = solved.section.done().and_then(|s| s.transformed_solution.as_ref()).map(|z| z.value);
    if let (Some(set), Some(value)) = (&transformed_set, game_value) {
        for e in &set.entries {
            checks.require((e.payoffs[0] - value).abs() <= 1e-6, || {
                format!("transformed equilibrium payoff {} differs from game value {value}", e.payoffs[0])
            });
        }
    }
    let same = match (&original_mixed, &transformed_mixed, &original_pure, &transformed_pure) {
        (Section::Done(a), Section::Done(b), _, _) => Some(same_profiles(&a.entries, &b.entries)),
        (_, _, Section::Done(a), Section::Done(b)) => Some(same_profiles(&a.entries, &b.entries)),
        _ => None,
    };
    let equilibria = EquilibriaSection { original_pure, transformed_pure, original_mixed, transformed_mixed, same_profiles: same };

    // Value identity rows: requested profiles, then the solver's profile.
    let mut rows_in: Vec<(String, StrategyProfile)> = if config.profiles.is_empty() {
        vec![("uniform".to_string(), StrategyProfile::uniform(game))]
    } else {
        config.profiles.clone()
    };
    if let Some(p) = &solved.optimal_profile {
        rows_in.push(("solver optimum (transformed)".to_string(), p.clone()));
    }
    let mut value_identity = Vec::new();
    let mut max_identity_residual: f64 = 0.0;
    for (label, profile) in &rows_in {
        let row = (|| -> Result<ValueIdentityRow, crate::error::GameError> {
            let vi = value_identity_report(game, &tr, profile)?;
            let secures = match &solved.transformed_levels {
                Some(levels) => Some(
                    levels
                        .iter()
                        .enumerate()
                        .map(|(p, lvl)| {
                            guaranteed_value(&tr.transformed_game, p, profile.get(p))
                                .map(|g| g >= lvl.value - config.solver.gap_tol)
                        })
                        .collect::<Result<Vec<bool>, _>>()?,
                ),
                None => None,
            };
            Ok(ValueIdentityRow {
                label: label.clone(),
                profile: clean_profile(profile),
                e_original: clean_vec(&vi.e_original),
                e_passive: clean(vi.e_passive),
                e_transformed: clean_vec(&vi.e_transformed),
                passive_player_payoff: clean(vi.passive_player_payoff),
                residual: vi.max_residual,
                regret_original: clean(crate::equilibrium::max_regret(game, profile)?),
                regret_transformed: clean(crate::equilibrium::max_regret(&tr.transformed_game, profile)?),
                secures_transformed_value: secures,
            })
        })();
        match row {
            Ok(mut r) => {
                max_identity_residual = max_identity_residual.max(r.residual);
                checks.require(r.residual <= IDENTITY_TOL, || format!("value identity residual {} at `{label}`", r.residual));
                r.residual = clean(r.residual);
                value_identity.push(r);
            }
            Err(e) => checks.failures.push(format!("profile `{label}`: {e}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for i in 0..RANDOM_PROFILES {
        let p = random_profile(game, &mut rng);
        match value_identity_report(game, &tr, &p) {
            Ok(vi) => {
                max_identity_residual = max_identity_residual.max(vi.max_residual);
                checks.require(vi.max_residual <= IDENTITY_TOL, || {
                    format!("value identity residual {} at random profile {i}", vi.max_residual)
                });
            }
            Err(e) => checks.failures.push(format!("random profile {i}: {e}")),
        }
    }

    AnalysisReport {
        title: metadata.title.clone(),
        players: m,
        strategies: game.strategy_counts().to_vec(),
        strategy_names: game.labels().map(|l| l.strategies.clone()).filter(|s| !s.is_empty()),
        tolerance: config.tolerance,
        audit,
        transform,
        solve: solved.section,
        equilibria,
        value_identity,
        self_checks: SelfChecks {
            seed: config.seed,
            random_profiles: RANDOM_PROFILES,
            max_identity_residual: clean(max_identity_residual),
            passed: checks.failures.is_empty(),
            failures: checks.failures,
        },
    }
}

fn fmt_list(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format_number(*x)).collect::<Vec<_>>().join(", "))
}

fn fmt_profile(p: &[Vec<f64>]) -> String {
    p.iter().map(|s| fmt_list(s)).collect::<Vec<_>>().join(" x ")
}

/// Writes a payoff tensor: a matrix for two players, one line per outcome
/// otherwise.
fn fmt_tensor(out: &mut String, indent: &str, counts: &[usize], t: &[f64]) {
    if counts.len() == 2 {
        for row in t.chunks(counts[1]) {
            let cells: Vec<String> = row.iter().map(|v| format!("{:>10}", format_number(*v))).collect();
            writeln!(out, "{indent}{}", cells.join(" ")).unwrap();
        }
    } else {
        let shape = crate::game::Shape::new(counts.to_vec()).expect("report shape is valid");
        for (k, o) in shape.outcomes().enumerate() {
            let idx: Vec<String> = o.iter().map(usize::to_string).collect();
            writeln!(out, "{indent}({}) {}", idx.join(","), format_number(t[k])).unwrap();
        }
    }
}

fn fmt_opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "n/a",
    }
}

pub fn render_audit(r: &AnalysisReport, out: &mut String) {
    writeln!(out, "audit").unwrap();
    writeln!(out, "  zero-sum: {}", r.audit.zero_sum).unwrap();
    match r.audit.constant {
        Some(c) => writeln!(out, "  constant-sum: true (total {})", format_number(c)).unwrap(),
        None => writeln!(out, "  constant-sum: false").unwrap(),
    }
    writeln!(out, "  total payoff range: [{}, {}]", format_number(r.audit.sum_min), format_number(r.audit.sum_max)).unwrap();
}

pub fn render_transform(r: &AnalysisReport, out: &mut String) {
    let t = &r.transform;
    writeln!(out, "transform").unwrap();
    writeln!(out, "  passive payoff x0:").unwrap();
    fmt_tensor(out, "    ", &r.strategies, &t.passive_payoff);
    writeln!(out, "  passive player payoff m*x0:").unwrap();
    fmt_tensor(out, "    ", &r.strategies, &t.passive_player_payoff);
    for (i, p) in t.transformed_payoffs.iter().enumerate() {
        writeln!(out, "  transformed payoff player {}:", i + 1).unwrap();
        fmt_tensor(out, "    ", &r.strategies, p);
    }
    writeln!(out, "  active total residual: {}", format_number(t.max_abs_residual)).unwrap();
    writeln!(out, "  transformed zero-sum: {}", t.transformed_zero_sum).unwrap();
    writeln!(
        out,
        "  augmented total range: [{}, {}] (constant-sum: {})",
        format_number(t.augmented_sum_min),
        format_number(t.augmented_sum_max),
        t.augmented_constant_sum
    )
    .unwrap();
}

pub fn render_solve(r: &AnalysisReport, out: &mut String) {
    writeln!(out, "solve").unwrap();
    let s = match &r.solve {
        Section::Skipped { reason } => {
            writeln!(out, "  skipped: {reason}").unwrap();
            return;
        }
        Section::Done(s) => s,
    };
    for (name, levels) in [("original", &s.original_security), ("transformed", &s.transformed_security)] {
        writeln!(out, "  {name} security levels:").unwrap();
        for l in levels {
            writeln!(out, "    player {}: {} with {}", l.player + 1, format_number(l.value), fmt_list(&l.strategy)).unwrap();
        }
    }
    if let Some(b) = &s.original_bounds {
        writeln!(
            out,
            "  original player 1 lower/upper value: {} <= {} (gap {})",
            format_number(b.lower),
            format_number(b.upper),
            format_number(b.gap)
        )
        .unwrap();
    }
    if let Some(z) = &s.transformed_solution {
        writeln!(out, "  transformed game value: {} (gap {})", format_number(z.value), format_number(z.gap)).unwrap();
        writeln!(out, "    row strategy: {}", fmt_list(&z.row_strategy)).unwrap();
        writeln!(out, "    column strategy: {}", fmt_list(&z.column_strategy)).unwrap();
    }
}

fn render_eq_section(out: &mut String, name: &str, s: &Section<EquilibriumReport>) {
    match s {
        Section::Skipped { reason } => writeln!(out, "  {name}: skipped: {reason}").unwrap(),
        Section::Done(e) => {
            writeln!(
                out,
                "  {name}: {} found{}",
                e.entries.len(),
                if e.degenerate { " (degenerate game)" } else { "" }
            )
            .unwrap();
            for entry in &e.entries {
                writeln!(
                    out,
                    "    {} payoffs {} regret {}",
                    fmt_profile(&entry.profile),
                    fmt_list(&entry.payoffs),
                    format_number(entry.max_regret)
                )
                .unwrap();
            }
        }
    }
}

pub fn render_equilibria(r: &AnalysisReport, out: &mut String) {
    writeln!(out, "equilibria").unwrap();
    render_eq_section(out, "original pure", &r.equilibria.original_pure);
    render_eq_section(out, "transformed pure", &r.equilibria.transformed_pure);
    render_eq_section(out, "original mixed", &r.equilibria.original_mixed);
    render_eq_section(out, "transformed mixed", &r.equilibria.transformed_mixed);
    writeln!(out, "  same equilibrium profiles: {}", fmt_opt_bool(r.equilibria.same_profiles)).unwrap();
}

pub fn render_value_identity(r: &AnalysisReport, out: &mut String) {
    writeln!(out, "expected values").unwrap();
    for row in &r.value_identity {
        writeln!(out, "  {}: {}", row.label, fmt_profile(&row.profile)).unwrap();
        writeln!(out, "    original:    {}", fmt_list(&row.e_original)).unwrap();
        writeln!(out, "    passive x0:  {}", format_number(row.e_passive)).unwrap();
        writeln!(out, "    transformed: {}", fmt_list(&row.e_transformed)).unwrap();
        writeln!(out, "    passive player: {}", format_number(row.passive_player_payoff)).unwrap();
        writeln!(
            out,
            "    regret original/transformed: {} / {}",
            format_number(row.regret_original),
            format_number(row.regret_transformed)
        )
        .unwrap();
        if let Some(s) = &row.secures_transformed_value {
            let flags: Vec<&str> = s.iter().map(|b| if *b { "yes" } else { "no" }).collect();
            writeln!(out, "    secures transformed security level: {}", flags.join(", ")).unwrap();
        }
    }
}

pub fn render_self_checks(r: &AnalysisReport, out: &mut String) {
    let c = &r.self_checks;
    writeln!(out, "self-checks (seed {}, {} random profiles)", c.seed, c.random_profiles).unwrap();
    writeln!(out, "  max identity residual: {}", format_number(c.max_identity_residual)).unwrap();
    writeln!(out, "  status: {}", if c.passed { "passed" } else { "FAILED" }).unwrap();
    for f in &c.failures {
        writeln!(out, "  - {f}").unwrap();
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    if let Some(t) = &r.title {
        writeln!(out, "{t}").unwrap();
    }
    let counts: Vec<String> = r.strategies.iter().map(usize::to_string).collect();
    writeln!(out, "{} players, strategies {}, tolerance {}", r.players, counts.join("x"), format_number(r.tolerance)).unwrap();
    if let Some(names) = &r.strategy_names {
        for (i, n) in names.iter().enumerate() {
            writeln!(out, "  player {} strategies: {}", i + 1, n.join(", ")).unwrap();
        }
    }
    out.push('\n');
    render_audit(r, &mut out);
    out.push('\n');
    render_transform(r, &mut out);
    out.push('\n');
    render_solve(r, &mut out);
    out.push('\n');
    render_equilibria(r, &mut out);
    out.push('\n');
    render_value_identity(r, &mut out);
    out.push('\n');
    render_self_checks(r, &mut out);
    out
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gamefile::parse_game_file;

    fn pd_report(profiles: Vec<(String, StrategyProfile)>) -> AnalysisReport {
        let f = parse_game_file(fixtures::PRISONERS_DILEMMA).unwrap();
        let config = PipelineConfig { profiles, ..PipelineConfig::default() };
        run_pipeline(&f.game, &f.metadata, &config)
    }

    #[test]
    fn pd_report_contents() {
        let f = parse_game_file(fixtures::PRISONERS_DILEMMA).unwrap();
        let g = &f.game;
        let r = pd_report(vec![
            ("cooperate".into(), StrategyProfile::pure(g, &[0, 0])),
            ("uniform".into(), StrategyProfile::uniform(g)),
        ]);
        assert!(r.self_checks.passed, "{:?}", r.self_checks.failures);
        assert!(!r.audit.zero_sum && !r.audit.constant_sum);
        assert_eq!(r.transform.passive_payoff, vec![0.6, 5.0, 5.0, 5.0]);
        assert_eq!(r.transform.transformed_payoffs[0], vec![0.0, -5.0, 5.0, 0.0]);
        assert_eq!(r.transform.passive_player_payoff, vec![1.2, 10.0, 10.0, 10.0]);
        let s = r.solve.done().unwrap();
        assert_eq!(s.transformed_solution.as_ref().unwrap().value, 0.0);
        assert_eq!(r.value_identity[0].e_original, vec![-0.6, -0.6]);
        assert_eq!(r.value_identity[1].e_original, vec![-3.9, -3.9]);
        assert_eq!(r.value_identity[1].e_passive, 3.9);
        assert_eq!(r.value_identity[1].e_transformed, vec![0.0, 0.0]);
        assert_eq!(r.value_identity[1].secures_transformed_value, Some(vec![false, false]));
        assert_eq!(r.value_identity[2].secures_transformed_value, Some(vec![true, true]));
        // Both games have mutual defection as their only equilibrium.
        assert_eq!(r.equilibria.same_profiles, Some(true));
        let text = render_text(&r);
        assert!(text.contains("transformed game value: 0 (gap 0)"), "{text}");
    }

    #[test]
    fn all_zero_three_player() {
        let g = Game::new(vec![2, 2, 2], vec![vec![0.0; 8]; 3]).unwrap();
        let r = run_pipeline(&g, &Metadata::default(), &PipelineConfig::default());
        assert!(r.audit.zero_sum && r.audit.constant_sum);
        assert!(r.transform.passive_payoff.iter().all(|v| *v == 0.0));
        assert_eq!(r.transform.transformed_payoffs, g.all_payoffs().to_vec());
        let s = r.solve.done().unwrap();
        assert_eq!(s.kind, "security_levels");
        assert!(s.transformed_security.iter().all(|l| l.value == 0.0));
        assert!(matches!(r.equilibria.original_mixed, Section::Skipped { .. }));
        assert!(r.self_checks.passed);
    }

    #[test]
    fn random_three_player_passes_self_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let payoffs = (0..3).map(|_| (0..24).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect();
        let g = Game::new(vec![2, 3, 4], payoffs).unwrap();
        let r = run_pipeline(&g, &Metadata::default(), &PipelineConfig { seed: 7, ..PipelineConfig::default() });
        assert!(r.self_checks.passed, "{:?}", r.self_checks.failures);
        assert!(r.transform.max_abs_residual <= 1e-9);
        assert!(!r.transform.augmented_constant_sum);
    }

    #[test]
    fn caps_skip_sections_with_reasons() {
        let g = Game::new(vec![7, 2], vec![vec![1.0; 14], vec![0.0; 14]]).unwrap();
        let config = PipelineConfig { max_lp_rows: 3, max_pure_outcomes: 10, ..PipelineConfig::default() };
        let r = run_pipeline(&g, &Metadata::default(), &config);
        let Section::Skipped { reason } = &r.solve else { panic!("solve should be skipped") };
        assert!(reason.contains("cap of 3"));
        let Section::Skipped { reason } = &r.equilibria.original_pure else { panic!() };
        assert!(reason.contains("cap of 10"));
        let Section::Skipped { reason } = &r.equilibria.original_mixed else { panic!() };
        assert!(reason.contains("capped at 6"));
        assert!(r.self_checks.passed);
        assert!(render_text(&r).contains("skipped"));
    }

    #[test]
    fn json_is_deterministic() {
        let a = render_json(&pd_report(Vec::new()));
        let b = render_json(&pd_report(Vec::new()));
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["transform"]["passive_payoff"][0], 0.6);
    }
}
