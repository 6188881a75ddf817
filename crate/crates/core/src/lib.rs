//! Numerical laboratory for an iterated map built from the Montgomery pair
//! correlation kernel `1 - (sin(pi u)/(pi u))^2`.
//!
//! - [`dynamics`]: the map, its derivative, linearizations and Lyapunov functions
//! - [`chaos`]: Lyapunov exponents, histograms, entropies, bifurcation sweeps
//! - [`zeta`]: zeta-zero tables, normalized spacings, pair correlation
//! - [`spectral`]: the tridiagonal discretization and its spacing statistics
//! - [`cli`]: the batch command-line front end

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod reference;
pub mod spectral;
pub mod zeta;

pub use chaos::{
    bifurcation_scan, build_histogram, differential_entropy, exponential_mean, exponential_pdf,
    lyapunov_exponents, lyapunov_series_for, shannon_entropy, BifurcationDiagram,
    ExponentialModel, Histogram, LyapunovSeries,
};
pub use dynamics::{
    iterate, linear_step_large, linear_step_small, lyapunov_function_large,
    lyapunov_function_small, montgomery_kernel, sinc, step, step_derivative, AffineMap,
    LyapunovFunctionParams, Map1D, MapParams, MontgomeryMap, Trajectory,
};
pub use error::{Error, Result};
pub use spectral::{
    build_operator, eigenvalues, unfold_spectrum, wigner_surmise_gue, DiscretizedOperator,
    SpacingStats, Spectrum,
};
pub use zeta::{
    compare_model, error_table, harmonic_reference, load_zeros, normalized_spacings,
    pair_correlation_empirical, zero_density, Convention, ErrorTable, PairCorrelation,
    SpacingEnsemble, ZeroTable,
};
