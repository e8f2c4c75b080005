//! Duality, certificates and cross-module consistency on random games.

mod common;

use proptest::prelude::*;
use rand::Rng;
use zerosum::equilibrium::{best_response_value, pure_nash, support_enumeration_2p, EnumerationOptions};
use zerosum::minimax::{guaranteed_value, maximin, solve_matrix_game, solve_zero_sum_2p, value_identity_report, SolverOptions};
use zerosum::{transform_game, Game, MixedStrategy, StrategyProfile};

#[test]
fn strong_duality_on_zero_sum_games() {
    let mut rng = common::rng(31);
    let opts = SolverOptions::default();
    for _ in 0..150 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let g = common::random_zero_sum(&mut rng, r, c);
        let s = solve_zero_sum_2p(&g, &opts).unwrap();
        assert!(s.duality_gap.unwrap().abs() <= 1e-7);
        // Both strategies certify the value against every pure reply.
        assert!(guaranteed_value(&g, 0, &s.maximin_strategy).unwrap() >= s.lower_value - 1e-7);
        let col = s.minimax_strategy.unwrap();
        assert!(guaranteed_value(&g, 1, &col).unwrap() >= -s.upper_value.unwrap() - 1e-7);
    }
}

#[test]
fn weak_duality_on_general_games() {
    let mut rng = common::rng(32);
    for _ in 0..150 {
        let counts = vec![rng.gen_range(1..=6), rng.gen_range(1..=6)];
        let g = common::random_game(&mut rng, counts);
        let s = solve_matrix_game(&g.matrix(0), &SolverOptions::default()).unwrap();
        assert!(s.lower_value <= s.upper_value.unwrap() + 1e-7);
    }
}

#[test]
fn security_levels_are_certified_for_many_players() {
    let mut rng = common::rng(33);
    for _ in 0..40 {
        let m = rng.gen_range(2..=4);
        let counts: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=3)).collect();
        let g = common::random_game(&mut rng, counts);
        for p in 0..m {
            let r = maximin(&g, p).unwrap();
            let guaranteed = guaranteed_value(&g, p, &r.strategy).unwrap();
            assert!(guaranteed >= r.value - 1e-7);
            // No pure strategy beats the LP optimum.
            for s in 0..g.strategy_counts()[p] {
                let pure = MixedStrategy::pure(g.strategy_counts()[p], s);
                assert!(guaranteed_value(&g, p, &pure).unwrap() <= r.value + 1e-9);
            }
        }
    }
}

/// Every 2-player game with counts ≤ 3 and payoffs in {−2..2}: the pure
/// scan's equilibria all appear among the support-enumeration output.
#[test]
fn support_enumeration_contains_pure_scan() {
    let mut rng = common::rng(34);
    let opts = EnumerationOptions::default();
    for _ in 0..400 {
        let (r, c) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a: Vec<f64> = (0..r * c).map(|_| rng.gen_range(-2..=2) as f64).collect();
        let b: Vec<f64> = (0..r * c).map(|_| rng.gen_range(-2..=2) as f64).collect();
        let g = Game::new(vec![r, c], vec![a, b]).unwrap();
        let pure = pure_nash(&g, 1e-9);
        let all = support_enumeration_2p(&g, &opts).unwrap();
        for e in &pure.entries {
            assert!(all.contains_profile(&e.profile, 1e-9), "{g:?} missing {:?}", e.profile);
        }
        for e in &all.entries {
            assert!(e.max_regret <= 1e-8);
            for p in 0..2 {
                let (br, _) = best_response_value(&g, p, &e.profile).unwrap();
                assert!(br - e.payoffs[p] <= 1e-8);
            }
        }
        // Nash's theorem: at least one equilibrium exists in non-degenerate games.
        if !all.degenerate {
            assert!(!all.is_empty());
        }
    }
}

#[test]
fn zero_sum_equilibrium_payoffs_equal_game_value() {
    let mut rng = common::rng(35);
    for _ in 0..80 {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let g = common::random_zero_sum(&mut rng, r, c);
        let value = solve_zero_sum_2p(&g, &SolverOptions::default()).unwrap().lower_value;
        let eq = support_enumeration_2p(&g, &EnumerationOptions::default()).unwrap();
        assert!(!eq.is_empty());
        for e in &eq.entries {
            assert!((e.payoffs[0] - value).abs() <= 1e-6);
        }
    }
}

fn arb_profile_game() -> impl Strategy<Value = (Game, StrategyProfile)> {
    (2usize..=3)
        .prop_flat_map(|m| prop::collection::vec(1usize..=3, m))
        .prop_flat_map(|counts| {
            let len: usize = counts.iter().product();
            let m = counts.len();
            let weights: Vec<_> = counts.iter().map(|&c| prop::collection::vec(0.01f64..1.0, c)).collect();
            (Just(counts), prop::collection::vec(prop::collection::vec(-10.0f64..10.0, len), m), weights)
        })
        .prop_map(|(counts, payoffs, weights)| {
            let g = Game::new(counts, payoffs).unwrap();
            let p = StrategyProfile::new(
                weights
                    .into_iter()
                    .map(|w| {
                        let s: f64 = w.iter().sum();
                        MixedStrategy::new(w.into_iter().map(|v| v / s).collect()).unwrap()
                    })
                    .collect(),
            );
            (g, p)
        })
}

proptest! {
    #[test]
    fn value_identity_holds((g, p) in arb_profile_game()) {
        let r = transform_game(&g);
        let vi = value_identity_report(&g, &r, &p).unwrap();
        for i in 0..g.num_players() {
            prop_assert!((vi.e_transformed[i] - (vi.e_original[i] + vi.e_passive)).abs() <= 1e-9);
        }
        // Transformed expected payoffs always cancel.
        prop_assert!(vi.e_transformed.iter().sum::<f64>().abs() <= 1e-9);
    }

    #[test]
    fn expected_utility_is_multilinear((g, p) in arb_profile_game(), t in 0.0f64..1.0, other in 0usize..3) {
        let player = other % g.num_players();
        let n = g.strategy_counts()[player];
        let alt = MixedStrategy::pure(n, n - 1);
        let mixed: Vec<f64> = p.get(player).weights().iter().zip(alt.weights()).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let combo = p.replaced(player, MixedStrategy::new(mixed).unwrap());
        let lhs = g.expected_utilities(&combo).unwrap();
        let e1 = g.expected_utilities(&p).unwrap();
        let e2 = g.expected_utilities(&p.replaced(player, alt)).unwrap();
        for i in 0..g.num_players() {
            prop_assert!((lhs[i] - (t * e1[i] + (1.0 - t) * e2[i])).abs() <= 1e-9);
        }
    }

    #[test]
    fn uniform_profile_gives_tensor_mean((g, _) in arb_profile_game()) {
        let u = StrategyProfile::uniform(&g);
        for i in 0..g.num_players() {
            let mean = g.payoffs(i).iter().sum::<f64>() / g.num_outcomes() as f64;
            prop_assert!((g.expected_utility(i, &u).unwrap() - mean).abs() <= 1e-9);
        }
        for outcome in g.shape().outcomes() {
            let p = StrategyProfile::pure(&g, &outcome);
            for i in 0..g.num_players() {
                prop_assert_eq!(g.expected_utility(i, &p).unwrap(), g.payoff(i, &outcome));
            }
        }
    }

    #[test]
    fn zero_sum_implies_constant_sum((g, _) in arb_profile_game()) {
        let t = transform_game(&g).transformed_game;
        prop_assert!(t.is_zero_sum(1e-9));
        let cs = t.constant_sum(1e-9);
        prop_assert!(cs.constant.unwrap().abs() <= 1e-9);
    }
}
