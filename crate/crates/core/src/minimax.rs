//! Security levels (maximin) via linear programming, exact solution of
//! two-player zero-sum games, and the expected-value identity across the
//! transformation.

use serde::Serialize;

use crate::error::{GameError, SolveError};
use crate::game::{expectation, Game, MixedStrategy, StrategyProfile, DEFAULT_TOLERANCE};
use crate::lp::{simplex_solve_with, Bounds, LinearProgram, LpStatus, Sense, SimplexOptions};
use crate::transform::TransformResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub simplex: SimplexOptions,
    /// Tolerance for the zero-sum precondition.
    pub zero_sum_tol: f64,
    /// Largest `|upper − lower|` accepted on a zero-sum game.
    pub gap_tol: f64,
    /// Resolve ties among optimal strategies by lexicographically maximising
    /// the weights in index order. Costs one extra LP per strategy.
    pub lexicographic_ties: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            simplex: SimplexOptions::default(),
            zero_sum_tol: DEFAULT_TOLERANCE,
            gap_tol: 1e-7,
            lexicographic_ties: true,
        }
    }
}

/// A player's security level and a strategy attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Maximin {
    pub value: f64,
    pub strategy: MixedStrategy,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// `sup_{p₁} inf_{p₂} E{x₁}`.
    pub lower_value: f64,
    /// `inf_{p₂} sup_{p₁} E{x₁}`; two-player games only.
    pub upper_value: Option<f64>,
    pub maximin_strategy: MixedStrategy,
    /// Player 2's strategy attaining the upper value.
    pub minimax_strategy: Option<MixedStrategy>,
    pub duality_gap: Option<f64>,
    pub iterations: usize,
}

/// Flat indices of the outcomes where `player` plays strategy 0, one per
/// pure profile of the opponents, in lexicographic order.
fn opponent_profiles(game: &Game, player: usize) -> impl Iterator<Item = usize> + '_ {
    (0..game.num_outcomes()).filter(move |&k| game.shape().component(k, player) == 0)
}

/// Worst-case expected payoff of `strategy` for `player` over all pure
/// profiles of the opponents.
pub fn guaranteed_value(game: &Game, player: usize, strategy: &MixedStrategy) -> Result<f64, GameError> {
    if player >= game.num_players() {
        return Err(GameError::PlayerOutOfRange { player, players: game.num_players() });
    }
    let n = game.strategy_counts()[player];
    if strategy.len() != n {
        return Err(GameError::ProfileShape { expected: vec![n], found: vec![strategy.len()] });
    }
    let stride = game.shape().stride(player);
    let x = game.payoffs(player);
    Ok(opponent_profiles(game, player)
        .map(|base| (0..n).map(|s| strategy.weights()[s] * x[base + s * stride]).sum::<f64>())
        .fold(f64::INFINITY, f64::min))
}

pub fn maximin(game: &Game, player: usize) -> Result<Maximin, SolveError> {
    maximin_with(game, player, &SolverOptions::default())
}

/// `max_p min_{s₋ᵢ} Σ_s p(s)·xᵢ(s, s₋ᵢ)`: the best payoff `player` can
/// guarantee.
///
/// Only pure opponent profiles need to be constrained. For fixed `p` the
/// expected payoff is multilinear in the opponents' mixed strategies, i.e.
/// affine in each one separately, so minimising one opponent at a time over
/// its simplex can always move to a vertex without increasing the payoff.
/// The minimum over the product of simplices is therefore attained at a pure
/// profile, and this holds for any number of players.
pub fn maximin_with(game: &Game, player: usize, opts: &SolverOptions) -> Result<Maximin, SolveError> {
    if player >= game.num_players() {
        return Err(GameError::PlayerOutOfRange { player, players: game.num_players() }.into());
    }
    let n = game.strategy_counts()[player];
    let stride = game.shape().stride(player);
    let x = game.payoffs(player);

    // Variables: p_0..p_{n-1}, v.
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::maximize(objective).bounds(n, Bounds::FREE);
    for base in opponent_profiles(game, player) {
        let mut row: Vec<f64> = (0..n).map(|s| -x[base + s * stride]).collect();
        row.push(1.0);
        lp.add_constraint(row, Sense::Le, 0.0);
    }
    let mut simplex_row = vec![1.0; n];
    simplex_row.push(0.0);
    lp.add_constraint(simplex_row, Sense::Eq, 1.0);

    let sol = simplex_solve_with(&lp, &opts.simplex)?;
    expect_optimal(sol.status)?;
    let value = sol.value;
    let mut iterations = sol.iterations;
    let mut weights = sol.x[..n].to_vec();

    if opts.lexicographic_ties && n > 1 {
        let mut row = vec![0.0; n + 1];
        row[n] = 1.0;
        lp.add_constraint(row, Sense::Ge, value);
        for s in 0..n - 1 {
            let mut obj = vec![0.0; n + 1];
            obj[s] = 1.0;
            lp.objective = obj;
            let sol = match simplex_solve_with(&lp, &opts.simplex) {
                Ok(sol) if sol.status == LpStatus::Optimal => sol,
                // The unrefined optimum is still valid.
                _ => break,
            };
            iterations += sol.iterations;
            weights = sol.x[..n].to_vec();
            let mut fix = vec![0.0; n + 1];
            fix[s] = 1.0;
            lp.add_constraint(fix, Sense::Ge, sol.value);
        }
    }

    Ok(Maximin { value, strategy: MixedStrategy::from_solver(weights), iterations })
}

fn expect_optimal(status: LpStatus) -> Result<(), SolveError> {
    match status {
        LpStatus::Optimal => Ok(()),
        LpStatus::Infeasible => Err(SolveError::UnexpectedStatus("infeasible")),
        LpStatus::Unbounded => Err(SolveError::UnexpectedStatus("unbounded")),
    }
}

/// Security level of every player. For three or more players this is the
/// only value offered: the upper value is not computed.
pub fn security_levels(game: &Game, opts: &SolverOptions) -> Result<Vec<Maximin>, SolveError> {
    (0..game.num_players()).map(|p| maximin_with(game, p, opts)).collect()
}

/// Lower and upper values of the matrix game where the row player receives
/// `a` and the column player receives `−a`.
///
/// On any two-player game, passing player 1's matrix checks the inequality
/// `sup inf ≤ inf sup` for player 1's payoff.
pub fn solve_matrix_game(a: &[Vec<f64>], opts: &SolverOptions) -> Result<SolveResult, SolveError> {
    let game = Game::zero_sum_matrix(a)?;
    solve_two_sided(&game, opts)
}

fn solve_two_sided(game: &Game, opts: &SolverOptions) -> Result<SolveResult, SolveError> {
    let row = maximin_with(game, 0, opts)?;
    let col = maximin_with(game, 1, opts)?;
    // Column player's security level in −x₁ is −inf_q sup_p E{x₁}.
    let upper = -col.value;
    Ok(SolveResult {
        lower_value: row.value,
        upper_value: Some(upper),
        maximin_strategy: row.strategy,
        minimax_strategy: Some(col.strategy),
        duality_gap: Some(upper - row.value),
        iterations: row.iterations + col.iterations,
    })
}

/// Solves a two-player zero-sum game.
///
/// Fails with [`SolveError::NotZeroSum`] when the payoffs do not cancel; such
/// games should be transformed first.
pub fn solve_zero_sum_2p(game: &Game, opts: &SolverOptions) -> Result<SolveResult, SolveError> {
    if game.num_players() != 2 {
        return Err(SolveError::NotTwoPlayer(game.num_players()));
    }
    if !game.is_zero_sum(opts.zero_sum_tol) {
        let residual = game.total_payoffs().iter().map(|s| s.abs()).fold(0.0, f64::max);
        return Err(SolveError::NotZeroSum { residual });
    }
    let result = solve_two_sided(game, opts)?;
    let gap = result.duality_gap.unwrap_or(0.0);
    if gap.abs() > opts.gap_tol {
        return Err(SolveError::DualityGap { gap, tol: opts.gap_tol });
    }
    Ok(result)
}

/// Expected payoffs before and after the transformation under one profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueIdentity {
    pub e_original: Vec<f64>,
    /// `E{x₀}`.
    pub e_passive: f64,
    pub e_transformed: Vec<f64>,
    /// `m·E{x₀}`, the passive player's own expected payoff.
    pub passive_player_payoff: f64,
    /// `max_i |e_transformed[i] − (e_original[i] + e_passive)|`.
    pub max_residual: f64,
}

pub fn value_identity_report(
    original: &Game,
    result: &TransformResult,
    profile: &StrategyProfile,
) -> Result<ValueIdentity, GameError> {
    let e_original = original.expected_utilities(profile)?;
    let e_transformed = result.transformed_game.expected_utilities(profile)?;
    let e_passive = expectation(original, &result.passive_payoff, profile);
    let max_residual = e_original
        .iter()
        .zip(&e_transformed)
        .map(|(o, t)| (t - (o + e_passive)).abs())
        .fold(0.0, f64::max);
    Ok(ValueIdentity {
        e_original,
        e_passive,
        e_transformed,
        passive_player_payoff: original.num_players() as f64 * e_passive,
        max_residual,
    })
}
