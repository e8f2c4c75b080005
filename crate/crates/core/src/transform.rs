//! The conservation transformation `T(x) = x + x₀` with
//! `x₀ = −(1/m) Σᵢ xᵢ`, and the augmented game carrying the passive player.
//!
//! After the transformation the active players' payoffs sum to zero at every
//! joint outcome. The passive player has a single strategy and receives
//! `m·x₀ = −Σᵢ xᵢ`, absorbing whatever the active players' totals lacked.

use serde::Serialize;

use crate::error::GameError;
use crate::game::{Game, Labels, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformResult {
    /// `x₀` at every joint outcome, same layout as the payoff tensors.
    pub passive_payoff: Vec<f64>,
    pub transformed_game: Game,
    pub original_was_zero_sum: bool,
    pub original_was_constant_sum: bool,
    /// `max_ω |Σᵢ x̃ᵢ(ω)|`.
    pub max_abs_residual: f64,
}

/// `x₀(ω) = −(1/m) Σᵢ xᵢ(ω)`.
pub fn compute_passive_payoff(game: &Game) -> Vec<f64> {
    let m = game.num_players() as f64;
    game.total_payoffs().into_iter().map(|s| -s / m).collect()
}

pub fn transform_game(game: &Game) -> TransformResult {
    transform_game_with_tolerance(game, DEFAULT_TOLERANCE)
}

/// Applies `T` to every player; the audit flags use `tol`.
pub fn transform_game_with_tolerance(game: &Game, tol: f64) -> TransformResult {
    let x0 = compute_passive_payoff(game);
    let payoffs: Vec<Vec<f64>> = game
        .all_payoffs()
        .iter()
        .map(|x| x.iter().zip(&x0).map(|(xi, p)| xi + p).collect())
        .collect();
    let transformed_game = game
        .with_payoffs(payoffs)
        .expect("transformed payoffs keep the original shape and stay finite");
    let max_abs_residual = transformed_game
        .total_payoffs()
        .iter()
        .map(|s| s.abs())
        .fold(0.0, f64::max);
    TransformResult {
        passive_payoff: x0,
        transformed_game,
        original_was_zero_sum: game.is_zero_sum(tol),
        original_was_constant_sum: game.is_constant_sum(tol),
        max_abs_residual,
    }
}

/// Recovers the original payoffs `xᵢ = x̃ᵢ − x₀` from a transform result.
pub fn invert(result: &TransformResult) -> Result<Game, GameError> {
    let payoffs = result
        .transformed_game
        .all_payoffs()
        .iter()
        .map(|t| t.iter().zip(&result.passive_payoff).map(|(a, b)| a - b).collect())
        .collect();
    result.transformed_game.with_payoffs(payoffs)
}

/// Builds the `(m+1)`-player game `Ω₀ × Ω` with the passive player at index 0.
///
/// The passive player has one strategy and payoff `m·x₀`; players `1..=m`
/// carry the transformed payoffs `x̃ᵢ`. The flat outcome layout is unchanged
/// because the leading axis has length one.
pub fn augment_with_passive_player(game: &Game) -> Game {
    let result = transform_game(game);
    let m = game.num_players() as f64;
    let mut counts = Vec::with_capacity(game.num_players() + 1);
    counts.push(1);
    counts.extend_from_slice(game.strategy_counts());
    let mut payoffs = Vec::with_capacity(game.num_players() + 1);
    payoffs.push(result.passive_payoff.iter().map(|v| m * v).collect());
    payoffs.extend(result.transformed_game.all_payoffs().iter().cloned());
    let augmented = Game::new(counts, payoffs).expect("augmented shape is consistent");
    match game.labels() {
        Some(labels) => {
            let mut l = Labels::default();
            if !labels.players.is_empty() {
                l.players.push("passive".to_string());
                l.players.extend(labels.players.iter().cloned());
            }
            if !labels.strategies.is_empty() {
                l.strategies.push(vec!["0".to_string()]);
                l.strategies.extend(labels.strategies.iter().cloned());
            }
            augmented.clone().with_labels(l).unwrap_or(augmented)
        }
        None => augmented,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::prisoners_dilemma;
    use crate::game::StrategyProfile;
    use proptest::prelude::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn pd_passive_payoff_and_transform() {
        let pd = prisoners_dilemma();
        assert_close(&compute_passive_payoff(&pd), &[0.6, 5.0, 5.0, 5.0], 1e-12);
        let r = transform_game(&pd);
        assert_close(r.transformed_game.payoffs(0), &[0.0, -5.0, 5.0, 0.0], 1e-12);
        assert_close(r.transformed_game.payoffs(1), &[0.0, 5.0, -5.0, 0.0], 1e-12);
        assert!(!r.original_was_zero_sum);
        assert!(!r.original_was_constant_sum);
        assert!(r.max_abs_residual <= 1e-12);
    }

    #[test]
    fn zero_sum_input_is_fixed() {
        let g = Game::zero_sum_matrix(&[vec![2.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let r = transform_game(&g);
        assert!(r.passive_payoff.iter().all(|v| *v == 0.0));
        assert_eq!(r.transformed_game.all_payoffs(), g.all_payoffs());
        assert!(r.original_was_zero_sum && r.original_was_constant_sum);
    }

    #[test]
    fn pd_augmented_detective() {
        let pd = prisoners_dilemma();
        let aug = augment_with_passive_player(&pd);
        assert_eq!(aug.strategy_counts(), &[1, 2, 2]);
        assert_close(aug.payoffs(0), &[1.2, 10.0, 10.0, 10.0], 1e-12);
        assert_close(aug.payoffs(1), &[0.0, -5.0, 5.0, 0.0], 1e-12);
        // The (m+1)-player total is m·x₀, which is not constant here.
        assert!(!aug.is_constant_sum(DEFAULT_TOLERANCE));
        let zs = Game::zero_sum_matrix(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!(augment_with_passive_player(&zs).payoffs(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_player_transform() {
        let g = Game::new(vec![3], vec![vec![1.0, -2.0, 4.0]]).unwrap();
        let r = transform_game(&g);
        assert_eq!(r.passive_payoff, vec![-1.0, 2.0, -4.0]);
        assert!(r.transformed_game.payoffs(0).iter().all(|v| *v == 0.0));
    }

    fn arb_game() -> impl Strategy<Value = Game> {
        (1usize..=4)
            .prop_flat_map(|m| prop::collection::vec(1usize..=4, m))
            .prop_flat_map(|counts| {
                let len: usize = counts.iter().product();
                let m = counts.len();
                (Just(counts), prop::collection::vec(prop::collection::vec(-10.0f64..10.0, len), m))
            })
            .prop_map(|(counts, payoffs)| Game::new(counts, payoffs).unwrap())
    }

    proptest! {
        #[test]
        fn passive_payoff_cancels_totals(g in arb_game()) {
            let x0 = compute_passive_payoff(&g);
            let m = g.num_players() as f64;
            for (k, total) in g.total_payoffs().iter().enumerate() {
                prop_assert!((m * x0[k] + total).abs() <= 1e-9);
            }
            let aug = augment_with_passive_player(&g);
            for (k, total) in g.total_payoffs().iter().enumerate() {
                prop_assert!((aug.payoffs(0)[k] + total).abs() <= 1e-9);
            }
        }

        #[test]
        fn closure_idempotence_and_inverse(g in arb_game()) {
            let r = transform_game(&g);
            prop_assert!(r.max_abs_residual <= 1e-9);
            prop_assert!(r.transformed_game.is_zero_sum(1e-9));
            let again = transform_game(&r.transformed_game);
            prop_assert!(again.passive_payoff.iter().all(|v| v.abs() <= 1e-12));
            for (a, b) in again.transformed_game.all_payoffs().iter().zip(r.transformed_game.all_payoffs()) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
            let back = invert(&r).unwrap();
            for (a, b) in back.all_payoffs().iter().zip(g.all_payoffs()) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn difference_identity(g in arb_game()) {
            let r = transform_game(&g);
            let m = g.num_players();
            for i in 0..m {
                for k in 0..g.num_outcomes() {
                    let others: f64 = (0..m).filter(|&j| j != i).map(|j| g.payoffs(j)[k]).sum();
                    let rhs = ((m as f64 - 1.0) * g.payoffs(i)[k] - others) / m as f64;
                    prop_assert!((r.transformed_game.payoffs(i)[k] - rhs).abs() <= 1e-9);
                }
            }
        }

        #[test]
        fn augmentation_preserves_active_utilities(g in arb_game(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let profile = StrategyProfile::new(g.strategy_counts().iter().map(|&c| {
                let w: Vec<f64> = (0..c).map(|_| rng.gen::<f64>() + 1e-3).collect();
                let s: f64 = w.iter().sum();
                crate::game::MixedStrategy::new(w.into_iter().map(|v| v / s).collect()).unwrap()
            }).collect());
            let r = transform_game(&g);
            let aug = augment_with_passive_player(&g);
            let mut aug_strats = vec![crate::game::MixedStrategy::pure(1, 0)];
            aug_strats.extend(profile.strategies().iter().cloned());
            let aug_profile = StrategyProfile::new(aug_strats);
            for i in 0..g.num_players() {
                let a = aug.expected_utility(i + 1, &aug_profile).unwrap();
                let t = r.transformed_game.expected_utility(i, &profile).unwrap();
                prop_assert!((a - t).abs() <= 1e-12);
            }
        }
    }
}
