use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Payload values are stored as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("s = {0} is negative; the branch equation P(w) = s needs s >= 0")]
    NegativeS(f64),
    #[error("degenerate branch: P'(w) = {p_prime} at w = {w} is below the degeneracy threshold")]
    DegenerateBranch { w: f64, p_prime: f64 },
    #[error("fields are defined on different grids")]
    DomainMismatch,
    #[error("min(a_j) has multiplicity {0}; the Dirichlet solver needs multiplicity one")]
    SingularParameters(usize),
    #[error("no convergence after {iterations} sweeps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("ellipticity lost: coefficient {coefficient:e} at node ({i}, {j})")]
    DegeneracyEncountered { i: usize, j: usize, coefficient: f64 },
    #[error("singular point: v = y = 0")]
    SingularPoint,
    #[error("radius sqrt(w + a_{index}) vanishes (w + a = {value:e})")]
    ZeroRadius { index: usize, value: f64 },
    #[error("spanning set is numerically rank deficient")]
    RankDeficient,
    #[error("alpha = {0} must be positive")]
    NonpositiveAlpha(f64),
    #[error("P' <= 0 inside the alpha bracket; sign-change roots found: {roots:?}")]
    DegenerateRegion { roots: Vec<f64> },
    #[error("y = 0 is excluded")]
    YZero,
    #[error("no positive alpha solves the reduced equation")]
    NoPositiveRoot,
    #[error("map vanishes on the loop at sample {0}")]
    ZeroOnLoop(usize),
    #[error("loop under-sampled: angle increment {increment} at sample {index}")]
    UnderSampled { index: usize, increment: f64 },
    #[error("winding sum {0} is not within tolerance of an integer")]
    NonIntegerWinding(f64),
    #[error("loop leaves the grid domain")]
    OutOfDomain,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
