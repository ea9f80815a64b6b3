//! Exact-arithmetic machinery for linear forms in logarithms on
//! `G_a x G_m^n`: places and heights of rational points and subspaces,
//! binomial/Matveev polynomial families and their weights, the absolute
//! Siegel lemma, Hilbert-Samuel multidegrees and obstruction subgroups,
//! archimedean/ultrametric parameter systems with the bound evaluators
//! `U0`/`U1`, interpolation and integrality checks, and a self-test
//! suite that verifies every identity with independent oracles.
//!
//! The ground field of the exact core is `Q`. Heights are carried as
//! `(exact argument under the logarithm, float approximation)` so that
//! identities such as the product formula, projective invariance and
//! Schmidt duality are asserted as integer or rational identities.
//! Quantities that are genuinely transcendental (logarithms, real
//! powers) are enclosed in outward-rounded dyadic intervals.

pub mod auxsys;
pub mod bounds;
pub mod error;
pub mod groups;
pub mod heights;
pub mod interp;
pub mod linalg;
pub mod lll;
pub mod polybasis;
pub mod ratio;
pub mod selftest;
pub mod real;
pub mod siegel;

pub use error::{CoreError, Result};
pub use real::RealInterval;
