use thiserror::Error;

use crate::finite_graph::name::VertexName;
use crate::finite_graph::structure::Kind;

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("structure has no vertices")]
    EmptyVertexSet,

    #[error("vertex {0} is not in the structure")]
    UnknownVertex(VertexName),

    #[error("loop at vertex {0}")]
    Loop(VertexName),

    #[error("edge {0} - {1} joins two vertices of the same part")]
    SamePartEdge(VertexName, VertexName),

    #[error("vertex {0} has no part assignment")]
    MissingPart(VertexName),

    #[error("part index {0} is not 0 or 1")]
    BadPart(u8),

    #[error("vertex name {0} occurs in both operands")]
    NameCollision(VertexName),

    #[error("expected a {expected:?} structure, found {found:?}")]
    KindMismatch { expected: Kind, found: Kind },

    #[error("{what} has size {size}, above the cap of {cap}")]
    CapExceeded { what: String, size: u128, cap: u128 },

    #[error("stage {stage} lies beyond the {planned} planned stages")]
    CoverageExceeded { stage: u32, planned: u32 },

    #[error("search budget exhausted while {0}")]
    BudgetExhausted(String),

    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("map leaves {0} unassigned")]
    PartialMap(VertexName),

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("map is not an automorphism of the seed: {0}")]
    NotAutomorphism(String),

    #[error("no witness for {0}")]
    NoWitness(String),

    #[error("no witness for {0}; plan more stages")]
    BeyondHorizon(String),

    #[error(
        "choice {choice} exceeds the witness multiplicity {multiplicity} for {requirement}; \
         a finite image such as K_{{1,1}} admits only the extensions its witnesses allow"
    )]
    ChoiceOutOfRange { choice: usize, multiplicity: usize, requirement: String },

    #[error("invalid vertex name {0:?}")]
    ParseName(String),

    #[error("invalid index set element {0}: elements must be at least 2")]
    BadIndex(u64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ForgeError {
    /// True for errors caused by a resource cap or by a query beyond the planned coverage.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            ForgeError::CapExceeded { .. }
                | ForgeError::CoverageExceeded { .. }
                | ForgeError::BudgetExhausted(_)
                | ForgeError::BeyondHorizon(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, ForgeError>;
