#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerosum::Game;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_game(rng: &mut ChaCha8Rng, counts: Vec<usize>) -> Game {
    let len: usize = counts.iter().product();
    let m = counts.len();
    let payoffs = (0..m).map(|_| (0..len).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect();
    Game::new(counts, payoffs).unwrap()
}

pub fn random_zero_sum(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Game {
    let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect();
    Game::zero_sum_matrix(&a).unwrap()
}

/// Dense Gaussian elimination for the test oracles; `None` if singular.
pub fn solve_dense(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c].abs() < 1e-9 {
            return None;
        }
        m.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / m[i][i]).collect())
}
