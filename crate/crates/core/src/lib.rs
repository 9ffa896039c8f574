//! Generalized power series calculus for power-law probability measures.
//!
//! Measures whose tails are mixtures of Pareto densities have Fourier and
//! Cauchy–Stieltjes transforms expanding in real powers drawn from an
//! additive exponent semigroup. This crate implements that calculus: the
//! semigroups, series arithmetic (products, reciprocals, binomial powers,
//! composition, reversion), conversions among tail, Fourier, Stieltjes,
//! reciprocal-Cauchy and Voiculescu representations, the four convolutions,
//! stable-law constructors and numerical oracles that check them.

pub mod cli;
pub mod diophantine;
pub mod error;
pub mod oracles;
pub mod pareto;
pub mod quad;
pub mod semigroup;
pub mod series;
pub mod special;
pub mod stable;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use semigroup::{ExponentIndex, SemigroupSpec};
pub use series::{GenSeries, GrowthBound, Normalization, Variable};
pub use special::Branch;
