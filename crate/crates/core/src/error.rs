use crate::lattice::Weight;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("weight {0:?} is not dominant")]
    NonDominant(Weight),
    #[error("group mismatch between operands")]
    GroupMismatch,
    #[error("weight {weight:?} has rank {got}, expected {expected}")]
    RankMismatch { weight: Weight, expected: usize, got: usize },
    #[error("not a virtual character of this group")]
    NotAVirtualCharacter,
    #[error("virtual character where a genuine representation is required")]
    VirtualCharacter,
    #[error("automorphism does not have finite order on the character lattice (bound {bound})")]
    InfiniteOrder { bound: usize },
    #[error("automorphism does not permute the roots")]
    NotRootAutomorphism,
    #[error("incompatible automorphism data: {0}")]
    IncompatibleAutomorphism(String),
    #[error("V not φ-fixed")]
    NotPhiFixed,
    #[error("intertwiner space stays {dim}-dimensional for an irreducible representation")]
    IntertwinerInconsistent { dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("image of generator `{0}` is not invertible")]
    NonInvertible(String),
    #[error("relator `{0}` does not evaluate to the identity")]
    RelatorViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal contract violation: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
