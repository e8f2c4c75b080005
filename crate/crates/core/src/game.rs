//! Finite normal-form games, mixed strategies and expected utility.
//!
//! Payoff tensors are stored dense and row-major in player order: player 0's
//! strategy index varies slowest. Joint outcomes are always visited in that
//! same lexicographic order.

use serde::Serialize;

use crate::error::GameError;

/// Default tolerance for the zero-sum / constant-sum predicates and for
/// validating that mixed strategy weights sum to one.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Optional human-readable names for players and their strategies.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Labels {
    pub players: Vec<String>,
    pub strategies: Vec<Vec<String>>,
}

/// Shape of a joint outcome space `Ω₁ × ⋯ × Ωₘ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Shape {
    counts: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Shape {
    pub fn new(counts: Vec<usize>) -> Result<Self, GameError> {
        if counts.is_empty() {
            return Err(GameError::NoPlayers);
        }
        if let Some(player) = counts.iter().position(|&c| c == 0) {
            return Err(GameError::EmptyStrategySet { player });
        }
        let mut strides = vec![1; counts.len()];
        for i in (0..counts.len() - 1).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        let len = counts.iter().product();
        Ok(Shape { counts, strides, len })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_players(&self) -> usize {
        self.counts.len()
    }

    /// Number of joint pure outcomes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    pub fn index_of(&self, outcome: &[usize]) -> usize {
        debug_assert_eq!(outcome.len(), self.counts.len());
        outcome.iter().zip(&self.strides).map(|(s, st)| s * st).sum()
    }

    /// Strategy chosen by `player` in the outcome at flat `index`.
    pub fn component(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.counts[player]
    }

    pub fn outcome_of(&self, index: usize) -> Vec<usize> {
        (0..self.counts.len()).map(|p| self.component(index, p)).collect()
    }

    /// Iterates all joint outcomes in lexicographic order.
    pub fn outcomes(&self) -> Outcomes<'_> {
        Outcomes { counts: &self.counts, next: Some(vec![0; self.counts.len()]) }
    }
}

/// Odometer over the joint outcomes of a [`Shape`].
pub struct Outcomes<'a> {
    counts: &'a [usize],
    next: Option<Vec<usize>>,
}

impl Iterator for Outcomes<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.counts[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

/// A finite normal-form game with `m` players.
///
/// `payoffs[i][k]` is the payoff to player `i` at the `k`-th joint outcome
/// (see [`Shape`] for the layout). A player with a single strategy is legal;
/// that is how a passive player is represented.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Game {
    shape: Shape,
    payoffs: Vec<Vec<f64>>,
    labels: Option<Labels>,
}

impl Game {
    pub fn new(strategy_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let shape = Shape::new(strategy_counts)?;
        if payoffs.len() != shape.num_players() {
            return Err(GameError::PayoffCount {
                expected: shape.num_players(),
                found: payoffs.len(),
            });
        }
        for (player, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != shape.len() {
                return Err(GameError::PayoffLength {
                    player,
                    expected: shape.len(),
                    found: tensor.len(),
                });
            }
            if let Some(index) = tensor.iter().position(|v| !v.is_finite()) {
                return Err(GameError::NonFinitePayoff { player, index });
            }
        }
        Ok(Game { shape, payoffs, labels: None })
    }

    /// Builds a two-player game from row-major payoff matrices.
    pub fn bimatrix(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Self, GameError> {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let flatten = |m: &[Vec<f64>], player| -> Result<Vec<f64>, GameError> {
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(GameError::PayoffLength {
                    player,
                    expected: rows * cols,
                    found: m.iter().map(Vec::len).sum(),
                });
            }
            Ok(m.iter().flatten().copied().collect())
        };
        Game::new(vec![rows, cols], vec![flatten(a, 0)?, flatten(b, 1)?])
    }

    /// Two-player zero-sum game with row player payoffs `a`.
    pub fn zero_sum_matrix(a: &[Vec<f64>]) -> Result<Self, GameError> {
        let neg: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        Game::bimatrix(a, &neg)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self, GameError> {
        let m = self.num_players();
        let ok = (labels.players.is_empty() || labels.players.len() == m)
            && (labels.strategies.is_empty()
                || (labels.strategies.len() == m
                    && labels
                        .strategies
                        .iter()
                        .zip(self.strategy_counts())
                        .all(|(names, &c)| names.len() == c)));
        if !ok {
            return Err(GameError::LabelShape);
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn num_players(&self) -> usize {
        self.shape.num_players()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        self.shape.counts()
    }

    pub fn num_outcomes(&self) -> usize {
        self.shape.len()
    }

    pub fn payoffs(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    pub fn all_payoffs(&self) -> &[Vec<f64>] {
        &self.payoffs
    }

    pub fn payoff(&self, player: usize, outcome: &[usize]) -> f64 {
        self.payoffs[player][self.shape.index_of(outcome)]
    }

    /// Sum of all players' payoffs at each joint outcome.
    pub fn total_payoffs(&self) -> Vec<f64> {
        (0..self.num_outcomes())
            .map(|k| self.payoffs.iter().map(|t| t[k]).sum())
            .collect()
    }

    /// Payoff matrix of a two-player game for `player`, rows indexed by
    /// player 0's strategies.
    pub fn matrix(&self, player: usize) -> Vec<Vec<f64>> {
        let cols = self.strategy_counts().get(1).copied().unwrap_or(1);
        self.payoffs[player].chunks(cols).map(<[f64]>::to_vec).collect()
    }

    fn check_player(&self, player: usize) -> Result<(), GameError> {
        if player >= self.num_players() {
            return Err(GameError::PlayerOutOfRange { player, players: self.num_players() });
        }
        Ok(())
    }

    fn check_profile(&self, profile: &StrategyProfile) -> Result<(), GameError> {
        if profile.len() != self.num_players() {
            return Err(GameError::ProfileShape {
                expected: self.strategy_counts().to_vec(),
                found: profile.strategies().iter().map(MixedStrategy::len).collect(),
            });
        }
        if profile
            .strategies()
            .iter()
            .zip(self.strategy_counts())
            .any(|(s, &c)| s.len() != c)
        {
            return Err(GameError::ProfileShape {
                expected: self.strategy_counts().to_vec(),
                found: profile.strategies().iter().map(MixedStrategy::len).collect(),
            });
        }
        Ok(())
    }

    /// Probability of each joint outcome under the product measure `profile`.
    fn outcome_weight(&self, profile: &StrategyProfile, index: usize, skip: Option<usize>) -> f64 {
        let mut w = 1.0;
        for (p, s) in profile.strategies().iter().enumerate() {
            if Some(p) == skip {
                continue;
            }
            w *= s.weights()[self.shape.component(index, p)];
        }
        w
    }

    /// `E_{p₁×⋯×pₘ}{xᵢ}`: the sum over joint outcomes of the payoff times the
    /// product of the players' weights.
    pub fn expected_utility(&self, player: usize, profile: &StrategyProfile) -> Result<f64, GameError> {
        self.check_player(player)?;
        self.check_profile(profile)?;
        Ok(expectation(self, &self.payoffs[player], profile))
    }

    /// Expected utilities for every player under `profile`.
    pub fn expected_utilities(&self, profile: &StrategyProfile) -> Result<Vec<f64>, GameError> {
        self.check_profile(profile)?;
        Ok(self.payoffs.iter().map(|t| expectation(self, t, profile)).collect())
    }

    /// Expected utility to `player` of each of their pure strategies while the
    /// other players follow `profile`.
    pub fn deviation_payoffs(&self, player: usize, profile: &StrategyProfile) -> Result<Vec<f64>, GameError> {
        self.check_player(player)?;
        self.check_profile(profile)?;
        let mut out = vec![0.0; self.strategy_counts()[player]];
        for k in 0..self.num_outcomes() {
            let w = self.outcome_weight(profile, k, Some(player));
            out[self.shape.component(k, player)] += w * self.payoffs[player][k];
        }
        Ok(out)
    }

    /// True iff `|Σᵢ xᵢ(ω)| ≤ tol` at every joint outcome.
    pub fn is_zero_sum(&self, tol: f64) -> bool {
        self.total_payoffs().iter().all(|s| s.abs() <= tol)
    }

    /// Checks the conservation law `Σᵢ xᵢ ∈ ℝ1`.
    pub fn constant_sum(&self, tol: f64) -> ConstantSum {
        let totals = self.total_payoffs();
        let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let constant = if max - min <= tol {
            Some(totals.iter().sum::<f64>() / totals.len() as f64)
        } else {
            None
        };
        ConstantSum { constant, min_total: min, max_total: max }
    }

    pub fn is_constant_sum(&self, tol: f64) -> bool {
        self.constant_sum(tol).constant.is_some()
    }

    /// Copy of this game with different payoff tensors of the same shape.
    pub fn with_payoffs(&self, payoffs: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let mut g = Game::new(self.strategy_counts().to_vec(), payoffs)?;
        g.labels = self.labels.clone();
        Ok(g)
    }
}

/// Expectation of an arbitrary tensor of the game's shape under `profile`.
pub(crate) fn expectation(game: &Game, tensor: &[f64], profile: &StrategyProfile) -> f64 {
    let mut acc = 0.0;
    for (k, v) in tensor.iter().enumerate() {
        let w = game.outcome_weight(profile, k, None);
        if w != 0.0 {
            acc += w * v;
        }
    }
    acc
}

/// Result of the constant-sum test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantSum {
    /// Mean total `β` when the totals are constant within tolerance.
    pub constant: Option<f64>,
    pub min_total: f64,
    pub max_total: f64,
}

/// Probability vector over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(weights: Vec<f64>) -> Result<Self, GameError> {
        Self::with_tolerance(weights, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(weights: Vec<f64>, tol: f64) -> Result<Self, GameError> {
        if weights.is_empty() {
            return Err(GameError::EmptyStrategy);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(GameError::NegativeWeight);
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(GameError::WeightSum { sum });
        }
        Ok(MixedStrategy(weights))
    }

    pub fn pure(count: usize, index: usize) -> Self {
        assert!(index < count, "pure strategy {index} out of range for {count} strategies");
        let mut w = vec![0.0; count];
        w[index] = 1.0;
        MixedStrategy(w)
    }

    pub fn uniform(count: usize) -> Self {
        assert!(count > 0);
        MixedStrategy(vec![1.0 / count as f64; count])
    }

    /// Clamps negative and sub-1e-12 entries from numerical solvers to zero
    /// and renormalises.
    pub(crate) fn from_solver(mut weights: Vec<f64>) -> Self {
        for w in &mut weights {
            if *w < 1e-12 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum > 0.0 {
            for w in &mut weights {
                *w /= sum;
            }
        } else {
            weights = vec![1.0 / weights.len() as f64; weights.len()];
        }
        MixedStrategy(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices with weight above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, w)| **w > tol).map(|(i, _)| i).collect()
    }

    pub fn is_pure(&self) -> Option<usize> {
        let s = self.support(0.0);
        (s.len() == 1 && self.0[s[0]] == 1.0).then(|| s[0])
    }
}

/// One mixed strategy per player; induces the product measure `p₁×⋯×pₘ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct StrategyProfile(Vec<MixedStrategy>);

impl StrategyProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        StrategyProfile(strategies)
    }

    pub fn pure(game: &Game, outcome: &[usize]) -> Self {
        StrategyProfile(
            game.strategy_counts()
                .iter()
                .zip(outcome)
                .map(|(&c, &s)| MixedStrategy::pure(c, s))
                .collect(),
        )
    }

    pub fn uniform(game: &Game) -> Self {
        StrategyProfile(game.strategy_counts().iter().map(|&c| MixedStrategy::uniform(c)).collect())
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, player: usize) -> &MixedStrategy {
        &self.0[player]
    }

    /// Same profile with `player`'s strategy replaced.
    pub fn replaced(&self, player: usize, strategy: MixedStrategy) -> Self {
        let mut s = self.0.clone();
        s[player] = strategy;
        StrategyProfile(s)
    }

    /// All weights, player by player; used for lexicographic ordering.
    pub fn flat_weights(&self) -> Vec<f64> {
        self.0.iter().flat_map(|s| s.weights().iter().copied()).collect()
    }

    pub fn max_abs_diff(&self, other: &StrategyProfile) -> f64 {
        self.flat_weights()
            .iter()
            .zip(other.flat_weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
