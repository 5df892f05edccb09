//! Free graded-commutative algebras over the rationals.

mod derivation;
mod monomial;
mod poly;
mod registry;

pub(crate) use derivation::check_rule_degree;
pub use derivation::{apply_derivation_with, Derivation, Missing};
pub use monomial::Monomial;
pub use poly::{rat, ratio, Poly, Rational};
pub use registry::{normalize_word, Gen, GenId, GenKind, GenSpec, GeneratorInfo, Registry};
