//! Operator norms, nuclear norms and explicit measures of weak
//! non-compactness for finite labeled matrices and vector families.
//!
//! Modules, bottom-up:
//! - [`spaces`]: labels, sparse vectors, ℓ^p norms, projections, excess.
//! - [`norms`]: operator norms `‖T‖_{q→p}` with certified brackets.
//! - [`nuclear`]: nuclear norms, trace duality, compressions, block structure.
//! - [`measures`]: truncation formulas over ℓ¹, c₀ and nuclear families.
//! - [`vonneumann`]: central partitions and measures in atomic coordinates.

pub mod error;
mod linalg;
pub mod measures;
pub mod norms;
pub mod nuclear;
pub mod operator;
pub mod spaces;
pub mod vonneumann;

pub use error::{Error, Result};
pub use norms::{NormBracket, NormConfig};
pub use operator::FiniteOperator;
pub use spaces::{Exponent, Field, FiniteVector, Label, Scalar, TruncationPair};
