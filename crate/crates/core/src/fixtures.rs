//! Game files bundled with the crate.

pub const PRISONERS_DILEMMA: &str = include_str!("../fixtures/prisoners_dilemma.toml");
pub const MATCHING_PENNIES: &str = include_str!("../fixtures/matching_pennies.toml");
pub const ZERO_SUM_2X2: &str = include_str!("../fixtures/zero_sum_2x2.toml");
pub const THREE_PLAYER_NONCONSTANT: &str = include_str!("../fixtures/three_player_nonconstant.toml");

/// `(name, document)` for every bundled fixture.
pub const ALL: [(&str, &str); 4] = [
    ("prisoners_dilemma", PRISONERS_DILEMMA),
    ("matching_pennies", MATCHING_PENNIES),
    ("zero_sum_2x2", ZERO_SUM_2X2),
    ("three_player_nonconstant", THREE_PLAYER_NONCONSTANT),
];

pub fn get(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, doc)| *doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamefile::parse_game;

    #[test]
    fn all_fixtures_parse() {
        for (name, doc) in ALL {
            let g = parse_game(doc).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(g.num_players() >= 2, "{name}");
        }
        assert!(get("matching_pennies").is_some());
        assert!(get("nope").is_none());
    }

    #[test]
    fn fixture_audits() {
        let mp = parse_game(MATCHING_PENNIES).unwrap();
        assert!(mp.is_zero_sum(0.0));
        let zs = parse_game(ZERO_SUM_2X2).unwrap();
        assert!(zs.is_zero_sum(0.0));
        let three = parse_game(THREE_PLAYER_NONCONSTANT).unwrap();
        assert!(!three.is_constant_sum(1e-9));
        assert_eq!(three.total_payoffs(), vec![9.0, 6.0, 6.0, 3.0, 6.0, 3.0, 3.0, 0.0]);
    }
}
