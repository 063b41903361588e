use thiserror::Error;

/// Errors raised by the lattice, arrangement, nested-set and chart routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inner lattice is not contained in the outer lattice")]
    NotContained,
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("zero denominator in torsion value")]
    ZeroDenominator,
    #[error("arrangement has no characters")]
    EmptyArrangement,
    #[error(
        "characters span a sublattice of rank {span_rank} < {rank}: the span has infinite index; \
         restrict the ambient lattice to the intersection of the character lattice with the \
         complex span of the characters and re-submit"
    )]
    InfiniteIndex { rank: usize, span_rank: usize },
    #[error("character #{index} {vector} is not primitive (gcd {gcd})")]
    NotPrimitive { index: usize, vector: String, gcd: String },
    #[error("empty subset")]
    EmptySubset,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("layer is not a point of the arrangement")]
    NotAPoint,
    #[error("subset is not complete in the localized character set")]
    NotComplete,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("layer is not in the layer poset")]
    NotInPoset,
    #[error("layer is not a member of the building set")]
    NotInBuildingSet,
    #[error("invalid building set: {0}")]
    InvalidBuildingSet(String),
    #[error("set of layers is not nested")]
    NotNested,
    #[error("nested set is not maximal")]
    NotMaximal,
    #[error("no element of the nested set is contained in the layer")]
    NoElementContained,
    #[error("layer is not a member of the nested set")]
    NotMember,
    #[error("layer is minimal in the nested set")]
    IsMinimal,
    #[error("basis is not adapted to the nested set")]
    NotAdapted,
    #[error("character is not constant on any member of the nested set")]
    NoConstantLayer,
    #[error("point lies outside the chart domain")]
    OutsideDomain,
    #[error("point lies on the boundary divisor of the chart")]
    OnDivisor,
    #[error("point is not in the overlap of the two charts")]
    NotInOverlap,
    #[error("invalid curve germ: {0}")]
    InvalidGerm(String),
    #[error("curve limit is not in the chart: {0}")]
    LiftFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
