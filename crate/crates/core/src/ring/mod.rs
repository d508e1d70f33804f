//! The graded commutative differential ring of field jets.

mod calculus;
mod eom;
mod expr;
mod generator;

#[cfg(test)]
mod tests;

pub use calculus::{equal_mod_dx, euler_operator, integrate_x, is_total_derivative, reduce_mod_dx};
pub use eom::{normalize_with_eom, EomRule, EomSystem};
pub use expr::{derive, multiply, multiply_monomials, Monomial, ScalarExpr};
pub use generator::{Antiderivative, AntiderivativeRegistry, Dir, Field, Freq, Generator};

use crate::grading::Grade;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("not a total x-derivative: {0}")]
    NotExact(String),
    #[error("equation-of-motion rewriting did not terminate")]
    NonTermination,
    #[error("antiderivative {0:?} is already registered")]
    DuplicateName(String),
    #[error("defining expression of {name:?} is not homogeneous of grade {declared}")]
    GradeMismatch { name: String, declared: Grade },
    #[error("a rule for field {0} already exists")]
    OverlappingRule(String),
}
