//! Exact Betti numbers of moduli spaces of sheaves on `P^2`, computed through
//! the blow-up `F_1` and wall-crossing between the `F` and `E + F` chambers.
//!
//! Everything is a truncated series in `L` and `q` with big-integer
//! coefficients; see [`series`] for the truncation model.

pub mod betti;
pub mod blowup;
pub mod bounds;
pub mod chern;
pub mod error;
pub mod mozgovoy;
pub mod oracles;
pub mod rank1;
pub mod series;
pub mod wallcross;

pub use betti::{betti_numbers, betti_table, detect_onset, space_series, stable_limit, BettiTable};
pub use blowup::{assemble_g, f_inverse, f_normalized, LambdaTable};
pub use bounds::{bound_c, bound_c0, bound_report, kappa, refined_c0, BoundReport};
pub use error::{Error, Result};
pub use series::{LaurentPoly, QLSeries, Rat, TruncationConfig};
pub use wallcross::{assemble_gtilde, enumerate_terms, DecompTerm};
