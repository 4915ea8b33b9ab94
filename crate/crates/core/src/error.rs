use thiserror::Error;

use crate::map_model::Rational;

/// Rejections raised while validating a map.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("empty or reversed interval [{lo}, {hi}] in {what}")]
    DegenerateInterval {
        what: String,
        lo: Rational,
        hi: Rational,
    },
    #[error("laps overlap near {at}")]
    OverlappingLaps { at: Rational },
    #[error("gap ({lo}, {hi}) is not covered by a lap and is not the hole")]
    GapNotHole { lo: Rational, hi: Rational },
    #[error("lap {lap} has slope {slope}; expanding laps need |slope| > 1")]
    NonExpandingLap { lap: usize, slope: Rational },
    #[error("lap {lap} maps onto [{lo}, {hi}], which leaves the domain")]
    ImageEscapesDomain {
        lap: usize,
        lo: Rational,
        hi: Rational,
    },
    #[error("domain endpoint {at} is not fixed (maps to {image})")]
    EndpointNotFixed { at: Rational, image: Rational },
    #[error("the hole must lie strictly inside the domain")]
    HoleTouchesBoundary,
    #[error("intervals do not cover the domain: {0}")]
    CoverageMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("orbit of {start} reached a denominator of {bits} bits after {steps} steps")]
    DenominatorBlowup {
        start: String,
        steps: usize,
        bits: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KneadingError {
    #[error("kneading matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkovError {
    #[error("orbit of {0} was truncated; the critical orbits do not define a finite Markov partition")]
    NotMarkov(String),
    #[error("image {image} of chain point {point} is not a chain point")]
    ImageNotInChain { point: String, image: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoBracket { what: String, lo: f64, hi: f64 },
    #[error("no positive root of {0} found")]
    NoRoot(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("need at least {needed} post-burn-in counts above {threshold}, have {have}")]
    InsufficientData {
        needed: usize,
        threshold: u64,
        have: usize,
    },
    #[error("cylinder count {count} exceeds the limit {limit}")]
    CombinatorialBlowup { count: usize, limit: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{field}: invalid rational {value:?} (expected an integer or p/q)")]
    InvalidRational { field: String, value: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expression error at offset {offset}: {message}")]
    Expression { offset: usize, message: String },
}

/// Any failure of the end-to-end analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
