use thiserror::Error;

/// Which boundary element of a pair of pants failed a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Alpha,
    Beta,
    Gamma,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Boundary::Alpha => "alpha",
            Boundary::Beta => "beta",
            Boundary::Gamma => "gamma",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix determinant {0} is not positive")]
    NonPositiveDeterminant(f64),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("element is not hyperbolic")]
    NotHyperbolic,
    #[error("point is not in the upper half-plane (y = {0})")]
    NotInUpperHalfPlane(f64),
    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,

    #[error("lifted element does not cover the identity")]
    NotCentral,
    #[error("offset {0} is too far from an integer to round safely")]
    AmbiguousRounding(f64),
    #[error("boundary element {0} is not hyperbolic")]
    BoundaryNotHyperbolic(Boundary),
    #[error("surface relator violated (residue {0:e})")]
    RelatorViolated(f64),
    #[error("expected {expected} generator images, got {got}")]
    WrongGeneratorCount { expected: usize, got: usize },

    #[error("boundary length {0} is not positive")]
    NonPositiveLength(f64),
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
    #[error("representation is not geometric")]
    NotGeometric,
    #[error("representation is already geometric")]
    AlreadyGeometric,
    #[error("representation is not elementary")]
    NotElementary,

    #[error("slot {slot} of pants {pants} is not matched exactly once")]
    UnmatchedSlot { pants: usize, slot: usize },
    #[error("pants adjacency graph is disconnected")]
    Disconnected,
    #[error("bad pants/cuff count: {pants} pants, {cuffs} cuffs")]
    BadCount { pants: usize, cuffs: usize },
    #[error("unknown pants or cuff reference: {0}")]
    BadReference(String),
    #[error("generator index {0} out of range")]
    BadIndex(usize),
    #[error("cuff {0} holonomy is not hyperbolic")]
    NotHyperbolicCuff(usize),
    #[error("assembly residue {0:e} exceeds tolerance")]
    AssemblyResidue(f64),

    #[error("Euler class {k} is extremal or out of range for genus {genus}")]
    ExtremalClass { k: i64, genus: usize },
    #[error("labeling must contain a label other than a single common sign")]
    FuchsianLabeling,
    #[error("invalid label {0}")]
    BadLabel(i64),

    #[error("word enumeration exceeds the budget of {0} words")]
    BudgetExceeded(usize),
    #[error("presentation reduction failed: {0}")]
    Presentation(String),
    #[error("representations do not share a presentation")]
    PresentationMismatch,
    #[error("word {word} is degenerate for j but has rho length {lambda_rho}")]
    DegenerateViolation { word: String, lambda_rho: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
