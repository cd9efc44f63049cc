use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),

    #[error("exterior derivative of a top degree form")]
    TopDegree,
    #[error("interior product with a degree-0 form")]
    ZeroDegree,
    #[error("expected a degree {expected} form, got degree {got}")]
    WrongDegree { expected: u8, got: u8 },
    #[error("negative truncation cap {0}")]
    NegativeCap(i64),
    #[error("linear part of the map is singular")]
    SingularLinearPart,
    #[error("map does not vanish at the origin")]
    MapNotAtOrigin,
    #[error("iteration did not converge within cap {0}")]
    NotConverged(i64),
    #[error("unnormalized leading term: series must start with 1")]
    UnnormalizedLeadingTerm,

    #[error("weights are underdetermined by the support; supply them explicitly")]
    Underdetermined,
    #[error("not quasihomogeneous in given coordinates")]
    NotQuasihomogeneous,
    #[error("function does not vanish at the origin")]
    NonzeroAtOrigin,
    #[error("multiplicity not finite within cap {0}")]
    MultiplicityNotFinite(i64),

    #[error("1-form is not closed")]
    NotClosed,
    #[error("boundary condition violated: {0}")]
    Boundary(String),
    #[error("2-form is not in xΩ²")]
    NotInXOmega2,

    #[error("invariant not normalized: c(0) must be 1")]
    InvariantNotNormalized,
    #[error("not a Martinet point: dg(0) = 0")]
    NotMartinetPoint,
    #[error("genericity condition failed: {0}")]
    Genericity(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("flux: {0}")]
    Flux(String),
    #[error("grid insufficient: {0}")]
    GridInsufficient(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// Innermost error behind any stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}
