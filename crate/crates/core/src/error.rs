use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("player {player} has no strategies")]
    EmptyStrategySet { player: usize },
    #[error("expected {expected} payoff tensors, found {found}")]
    PayoffCount { expected: usize, found: usize },
    #[error("payoff tensor of player {player} has {found} entries, expected {expected}")]
    PayoffLength { player: usize, expected: usize, found: usize },
    #[error("payoff of player {player} at outcome {index} is not finite")]
    NonFinitePayoff { player: usize, index: usize },
    #[error("labels do not match the game's shape")]
    LabelShape,
    #[error("player {player} out of range for a {players}-player game")]
    PlayerOutOfRange { player: usize, players: usize },
    #[error("profile has shape {found:?}, game has strategy counts {expected:?}")]
    ProfileShape { expected: Vec<usize>, found: Vec<usize> },
    #[error("mixed strategy has no weights")]
    EmptyStrategy,
    #[error("mixed strategy weights must be finite and non-negative")]
    NegativeWeight,
    #[error("mixed strategy weights sum to {sum}, not 1")]
    WeightSum { sum: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program dimensions are inconsistent: {0}")]
    Dimensions(String),
    #[error("linear program has a non-finite coefficient")]
    NonFinite,
    #[error("numerically singular basis: solution violates constraints by {residual:e}")]
    SingularBasis { residual: f64 },
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("expected a 2-player game, found {0} players")]
    NotTwoPlayer(usize),
    #[error("game is not zero-sum (max |Σ payoffs| = {residual:e}); apply the transformation first")]
    NotZeroSum { residual: f64 },
    #[error("duality gap {gap:e} exceeds tolerance {tol:e}")]
    DualityGap { gap: f64, tol: f64 },
    #[error("LP for the maximin problem was {0}; this should not happen for a finite game")]
    UnexpectedStatus(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("support enumeration needs a 2-player game, found {0} players")]
    NotTwoPlayer(usize),
    #[error("support enumeration is capped at {cap} strategies per player, game has {counts:?}")]
    SizeCap { cap: usize, counts: Vec<usize> },
}

/// Stable codes for game-file diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticCode {
    Syntax,
    MissingField,
    WrongType,
    LengthMismatch,
    NonFinite,
    InvalidShape,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "E001-syntax",
            DiagnosticCode::MissingField => "E002-missing-field",
            DiagnosticCode::WrongType => "E003-wrong-type",
            DiagnosticCode::LengthMismatch => "E004-length-mismatch",
            DiagnosticCode::NonFinite => "E005-non-finite",
            DiagnosticCode::InvalidShape => "E006-invalid-shape",
        }
    }
}

/// A game-file diagnostic with its location.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{}{}: {message}", code.as_str(), field.as_ref().map(|f| format!(" at `{f}`")).unwrap_or_default(), line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ParseError {
    pub code: DiagnosticCode,
    pub field: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}
