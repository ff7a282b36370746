//! Exact symbolic algebra: bivariate rational polynomials, the harmonic
//! polynomial basis used as compatibility test functions, and complex
//! rational polynomials for the complementing-condition computation.

mod complex_poly;
mod harmonic;
mod polynomial;

pub use complex_poly::{
    complementing_check, complementing_condition, complex, format_complex, laplace_neumann_control, poly_divmod,
    ComplementingReport, ComplexPolynomial, ComplexRational,
};
pub use harmonic::{harmonic_basis, HarmonicPolynomial};
pub use polynomial::{ratio, rational, Evaluator, Polynomial};
