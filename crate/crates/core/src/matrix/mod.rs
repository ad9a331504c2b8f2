//! Stochastic-matrix arithmetic over exact rationals or binary64.

mod product;
mod scalar;
mod seminorm;
mod stochastic;

pub use product::{
    chain_product, convergence_certificate, is_ergodic, wolfowitz_contraction, Certificate, WolfowitzReport,
    DEFAULT_PRODUCT_CAP,
};
pub use scalar::{parse_rational, render, render_rational, Mode, Rational, Scalar, FLOAT_TOL};
pub use seminorm::{
    apply_indicator, column_bound, erg_coeffs, osc, seminorm, seminorm_realized, ErgodicityCoefficients, Realized,
    MAX_ENUMERATION_DIM,
};
pub use stochastic::{from_ratios, StochasticMatrix};
