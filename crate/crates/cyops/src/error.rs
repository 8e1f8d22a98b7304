//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyError {
    #[error("series is not a unit (constant term is zero)")]
    NotAUnit,
    #[error("composition requires the inner series to vanish at the origin")]
    CompositionAtNonzeroPoint,
    #[error("series is not reversible (needs f(0) = 0 and f'(0) != 0)")]
    NotReversible,
    #[error("n-th root requires constant term 1, found {0}")]
    NonUnitConstantTerm(String),
    #[error("no rational function of the requested degrees matches the series")]
    NoRationalFit,
    #[error("irregular singularity at {0}: indicial polynomial degenerates in degree")]
    IrregularSingularity(String),
    #[error("non-integral residue {residue} of 2 a_n/(n+1) at a root of {place}")]
    NonIntegralResidue { residue: String, place: String },
    #[error("symmetric power is degenerate: the solution products are linearly dependent")]
    DegenerateSymmetricPower,
    #[error("no annihilating operator within order {max_order} and coefficient degree {max_deg}")]
    NoOperatorInBounds { max_order: usize, max_deg: usize },
    #[error("operator does not satisfy property (M): indicial polynomial at 0 is {0}, not (T-r)^order")]
    NotMUM(String),
    #[error("operator order {0} is too small for this invariant")]
    OrderTooSmall(usize),
    #[error("operator has no self-dual witness (property (P) fails)")]
    NotSelfDual,
    #[error("exponents at {0} are not all rational; residual factor {1}")]
    IrrationalExponents(String, String),
    #[error("not a symmetric power: Y-invariant {0} differs from 1")]
    NotSymPower(usize),
    #[error("cannot normalize: no rational twist with integral residues kills a_6")]
    CannotNormalize,
    #[error("parse error at byte {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("unknown corpus operator `{0}`")]
    UnknownOperator(String),
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, CyError>;
