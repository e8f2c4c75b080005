//! Nash equilibria of small games: a pure-profile scan for any number of
//! players and support enumeration for two-player games.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{EquilibriumError, GameError};
use crate::game::{Game, MixedStrategy, StrategyProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PureScan,
    SupportEnumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    pub payoffs: Vec<f64>,
    /// Largest gain any player gets from a unilateral pure deviation.
    pub max_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub entries: Vec<Equilibrium>,
    pub method: Method,
    /// Some equilibrium has more pure best responses than support for a
    /// player; the set may contain only representatives of a continuum.
    pub degenerate: bool,
    /// Support pairs whose indifference system was singular.
    pub skipped_singular: usize,
}

impl EquilibriumSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_profile(&self, profile: &StrategyProfile, tol: f64) -> bool {
        self.entries.iter().any(|e| e.profile.max_abs_diff(profile) <= tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationOptions {
    /// Largest strategy count per player accepted by support enumeration.
    pub max_strategies: usize,
    pub regret_tol: f64,
    pub singular_tol: f64,
    pub dedup_tol: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { max_strategies: 6, regret_tol: 1e-8, singular_tol: 1e-10, dedup_tol: 1e-6 }
    }
}

/// Best pure reply for `player` against the others in `profile`: the value
/// and the smallest maximising index.
pub fn best_response_value(game: &Game, player: usize, profile: &StrategyProfile) -> Result<(f64, usize), GameError> {
    let dev = game.deviation_payoffs(player, profile)?;
    let best = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let index = dev.iter().position(|v| *v >= best - 1e-12).unwrap_or(0);
    Ok((best, index))
}

/// Largest unilateral pure-deviation gain over all players.
pub fn max_regret(game: &Game, profile: &StrategyProfile) -> Result<f64, GameError> {
    let current = game.expected_utilities(profile)?;
    let mut worst: f64 = 0.0;
    for (player, value) in current.iter().enumerate() {
        let (best, _) = best_response_value(game, player, profile)?;
        worst = worst.max(best - value);
    }
    Ok(worst)
}

/// Orders profiles the way pure outcomes are enumerated: more weight on a
/// lower-indexed strategy sorts first.
fn profile_order(a: &StrategyProfile, b: &StrategyProfile) -> Ordering {
    for (x, y) in a.flat_weights().iter().zip(b.flat_weights()) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Every joint pure outcome where no player gains more than `tol` by a
/// unilateral pure deviation.
pub fn pure_nash(game: &Game, tol: f64) -> EquilibriumSet {
    let shape = game.shape();
    let mut entries = Vec::new();
    let mut degenerate = false;
    for k in 0..game.num_outcomes() {
        let mut regret: f64 = 0.0;
        let mut ties = false;
        for player in 0..game.num_players() {
            let x = game.payoffs(player);
            let stride = shape.stride(player);
            let own = shape.component(k, player);
            let base = k - own * stride;
            for s in 0..game.strategy_counts()[player] {
                let gain = x[base + s * stride] - x[k];
                regret = regret.max(gain);
                if s != own && gain.abs() <= tol {
                    ties = true;
                }
            }
        }
        if regret <= tol {
            degenerate |= ties;
            let outcome = shape.outcome_of(k);
            entries.push(Equilibrium {
                profile: StrategyProfile::pure(game, &outcome),
                payoffs: game.all_payoffs().iter().map(|t| t[k]).collect(),
                max_regret: regret,
            });
        }
    }
    EquilibriumSet { entries, method: Method::PureScan, degenerate, skipped_singular: 0 }
}

/// Solves `m·x = b` in place by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `singular_tol`.
fn solve_linear(mut m: Vec<Vec<f64>>, mut b: Vec<f64>, singular_tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < singular_tol {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Some(x)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Weights on `own` that make the opponent indifferent across `other`.
///
/// `payoff(i, j)` is the opponent's payoff when this player plays `own[i]`
/// and the opponent plays `other[j]`.
fn indifference(
    own: &[usize],
    other: &[usize],
    n_own: usize,
    payoff: impl Fn(usize, usize) -> f64,
    singular_tol: f64,
) -> Option<Vec<f64>> {
    let k = own.len();
    let mut m = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (r, &j) in other.iter().enumerate() {
        for (c, &i) in own.iter().enumerate() {
            m[r][c] = payoff(i, j);
        }
        m[r][k] = -1.0;
    }
    for c in 0..k {
        m[k][c] = 1.0;
    }
    b[k] = 1.0;
    let sol = solve_linear(m, b, singular_tol)?;
    let mut weights = vec![0.0; n_own];
    for (c, &i) in own.iter().enumerate() {
        weights[i] = sol[c];
    }
    Some(weights)
}

/// Mixed Nash equilibria of a two-player game by support enumeration over
/// equal-size support pairs.
pub fn support_enumeration_2p(game: &Game, opts: &EnumerationOptions) -> Result<EquilibriumSet, EquilibriumError> {
    if game.num_players() != 2 {
        return Err(EquilibriumError::NotTwoPlayer(game.num_players()));
    }
    let (rows, cols) = (game.strategy_counts()[0], game.strategy_counts()[1]);
    if rows > opts.max_strategies || cols > opts.max_strategies {
        return Err(EquilibriumError::SizeCap { cap: opts.max_strategies, counts: vec![rows, cols] });
    }
    let a = game.payoffs(0);
    let b = game.payoffs(1);
    let at = |i: usize, j: usize| i * cols + j;

    let mut entries: Vec<Equilibrium> = Vec::new();
    let mut skipped_singular = 0;
    let mut degenerate = false;
    for k in 1..=rows.min(cols) {
        let row_sets = combinations(rows, k);
        let col_sets = combinations(cols, k);
        for rs in &row_sets {
            for cs in &col_sets {
                // Row weights make the column player indifferent on `cs`, and vice versa.
                let p = indifference(rs, cs, rows, |i, j| b[at(i, j)], opts.singular_tol);
                let q = indifference(cs, rs, cols, |j, i| a[at(i, j)], opts.singular_tol);
                let (Some(p), Some(q)) = (p, q) else {
                    skipped_singular += 1;
                    continue;
                };
                if p.iter().chain(&q).any(|w| *w < -1e-9) {
                    continue;
                }
                let profile = StrategyProfile::new(vec![
                    MixedStrategy::from_solver(p),
                    MixedStrategy::from_solver(q),
                ]);
                let regret = max_regret(game, &profile)?;
                if regret > opts.regret_tol {
                    continue;
                }
                if entries.iter().any(|e| e.profile.max_abs_diff(&profile) < opts.dedup_tol) {
                    continue;
                }
                degenerate |= has_extra_best_responses(game, &profile, opts.regret_tol)?;
                entries.push(Equilibrium {
                    payoffs: game.expected_utilities(&profile)?,
                    profile,
                    max_regret: regret,
                });
            }
        }
    }
    entries.sort_by(|x, y| profile_order(&x.profile, &y.profile));
    Ok(EquilibriumSet { entries, method: Method::SupportEnumeration, degenerate, skipped_singular })
}

fn has_extra_best_responses(game: &Game, profile: &StrategyProfile, tol: f64) -> Result<bool, GameError> {
    for player in 0..game.num_players() {
        let dev = game.deviation_payoffs(player, profile)?;
        let best = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best_responses = dev.iter().filter(|v| **v >= best - tol).count();
        if best_responses > profile.get(player).support(1e-12).len() {
            return Ok(true);
        }
    }
    Ok(false)
}
