//! Positive Ricci curvature of canonical variations: the polynomial
//! `p(λ) = Ric̃(X + λV)`, its discriminant, the search for a certifying `t`
//! and direct eigenvalue certification of a metric.

mod polynomial;
mod search;

pub use polynomial::{
    discriminant, ricci_polynomial, vertical_scale, Normalization, PolynomialForms, RicciPolynomial,
};
pub use search::{
    certify_positivity, discriminant_scan, find_certifying_t, positivity_threshold, CertSource, CertificationReport, DiscriminantReport,
    DiscriminantSample, SearchOptions, Verdict,
};

/// Default margin for positivity verdicts.
pub const DEFAULT_MARGIN: f64 = 1e-6;
