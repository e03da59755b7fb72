use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix determinant {0} is not positive")]
    NonPositiveDeterminant(f64),
    #[error("the identity map fixes every point")]
    IdentityHasAllPoints,
    #[error("point {0} is not in the closed upper half-plane")]
    NotInUpperHalfPlane(String),
    #[error("point {0} is not in the closed unit disc")]
    NotInDisc(String),
    #[error("complex matrix is not the Cayley image of a real map (imaginary residue {0:e})")]
    NotRealUnderCayley(f64),

    #[error("generator list is empty")]
    EmptyGeneratorList,

    #[error("form evaluated at its pole {0}")]
    EvaluationAtPole(String),
    #[error("path passes within {distance:e} of pole {pole} (minimum clearance {clearance:e})")]
    PoleTooClose { pole: String, distance: f64, clearance: f64 },
    #[error("adaptive quadrature did not reach tolerance {0:e}")]
    ToleranceNotMet(f64),
    #[error("the form is identically zero")]
    DegenerateForm,
    #[error("pole locations {0} and {1} are not distinct")]
    CoincidentPoles(String, String),
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("lambda {lambda} outside (0, {upper})")]
    LambdaOutOfRange { lambda: f64, upper: f64 },
    #[error("base point coincides with a pole")]
    PoleAtBasePoint,
    #[error("offset {offset} fails the positivity check (sufficient bound {bound})")]
    OffsetTooSmall { offset: f64, bound: f64 },
    #[error("zero {0} is not strictly inside the unit disc")]
    ZeroOutsideDisc(String),
    #[error("no model automorphism matches the continued germ (mismatch {0:e})")]
    GermMismatch(f64),
    #[error("invalid construction parameter: {0}")]
    InvalidParameter(String),

    #[error("developed image leaves the model ({0})")]
    ImageOutsideModel(String),
    #[error("finite-difference stencil crosses an exclusion zone at {0}")]
    StepTooLarge(String),
    #[error("radii must be strictly decreasing and above 1e-6")]
    RadiiTooSmall,
    #[error("wrong singularity type: {0}")]
    WrongSingularityType(String),
    #[error("{0} is not a declared singular point of the construction")]
    NotASingularPoint(String),
    #[error("operation not available for this variant: {0}")]
    WrongVariant(String),

    #[error("rational map is constant")]
    ConstantMap,
    #[error("numerator and denominator share a common factor")]
    NotCoprime,
    #[error("local order mismatch at {point}: predicted {predicted}, measured {measured}")]
    OrderMismatch { point: String, predicted: f64, measured: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
