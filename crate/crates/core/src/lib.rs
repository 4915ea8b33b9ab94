//! Exact kneading theory for piecewise-linear expanding interval maps with a
//! hole: weighted kneading determinants, transfer and homological matrices,
//! and the dimension, escape rate and entropy of the repeller.
//!
//! The usual entry point is [`analyze`], which runs the whole pipeline on a
//! [`HoleMap`].

// Errors carry the offending rationals; they are cold and not worth boxing.
#![allow(clippy::result_large_err)]

pub mod corpus;
pub mod error;
pub mod io;
pub mod kneading;
pub mod map_model;
pub mod markov;
pub mod matrix;
pub mod mc;
pub mod pipeline;
pub mod poly;
pub mod spectral;
pub mod symbolic;

pub use error::{
    AnalysisError, KneadingError, MapError, MarkovError, McError, OrbitError, ParseError, SpectralError,
};
pub use io::{MapSpecFile, ReportFile};
pub use kneading::{kneading_determinant, kneading_matrix, r_polynomial, KneadingMatrix};
pub use map_model::{validate_map, HoleMap, Lap, Rational, Side, SidedPoint, ValidatedMap};
pub use markov::{build_bundle, verify_identities, MatrixBundle, VerificationReport};
pub use matrix::{char_poly, PolyMatrix};
pub use mc::{cylinder_dimension, estimate_escape_rate, simulate_survival, SurvivalSeries};
pub use pipeline::{analyze, analyze_validated, Analysis, AnalyzeOptions};
pub use poly::{CyclotomicFactor, Monomial, WeightPoly, WeightRationalFn};
pub use spectral::{moran_dimension, pressure, BetaEvaluator, InvariantReport, SpectralOptions};
pub use symbolic::{kneading_data, Alphabet, Itinerary, KneadingData, OrbitClass, OrbitOptions};
