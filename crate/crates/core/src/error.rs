use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field spec p={p}, d={d}: {reason}")]
    InvalidFieldSpec {
        p: u32,
        d: usize,
        reason: &'static str,
    },

    #[error("operands belong to different field specs")]
    SpecMismatch,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("first column is not a standard basis vector")]
    NotStandardColumn,

    #[error("matrix code {value} is out of range for this field spec")]
    CodeOutOfRange { value: u64 },

    #[error("expected {expected} matrices, found {found}")]
    WrongMatrixCount { expected: usize, found: usize },

    #[error("first matrix is not the identity")]
    NotIdentityFirst,

    #[error("first column of matrix {0} is not e_{0}")]
    BadFirstColumn(usize),

    #[error("linear combination {0:?} of the matrices is singular")]
    SingularCombination(Vec<u8>),

    #[error("cube has no identity in its first basis vector")]
    NoIdentity,

    #[error("basis change does not keep the identity as first basis vector")]
    IdentityNotPreserved,

    #[error("element must be nonzero")]
    ZeroElement,

    #[error("no element has a primitive right multiplication map")]
    NotRightPrimitive,

    #[error("(p^d - 1)^2 is not divisible by the S/A sum {num}/{den}")]
    NonIntegerAtOrder { num: u64, den: u64 },

    #[error("fixture matching failed: {0}")]
    FixtureMatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}
