//! Analysis toolkit for finite normal-form games.
//!
//! The central operation is the conservation transformation: every player's
//! payoff `xᵢ` is shifted by `x₀ = −(1/m) Σⱼ xⱼ`, which makes any game
//! zero-sum. The shift is the payoff of a passive player with a single
//! strategy. Alongside it the crate provides the solvers needed to compare
//! original and transformed games: LP security levels, exact two-player
//! zero-sum solutions and Nash equilibrium enumeration.

pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod gamefile;
pub mod lp;
pub mod minimax;
pub mod report;
pub mod transform;

pub use error::{DiagnosticCode, EquilibriumError, GameError, LpError, ParseError, SolveError};
pub use game::{Game, Labels, MixedStrategy, StrategyProfile, DEFAULT_TOLERANCE};
pub use transform::{augment_with_passive_player, compute_passive_payoff, transform_game, TransformResult};
