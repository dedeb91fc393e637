//! Error type shared by all modules of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Point lies outside the domain of the potential (outside the declared
    /// ball, or where a log-type potential is undefined).
    #[error("point outside domain: {0}")]
    Domain(String),

    /// Requested jet order exceeds what the engine supports.
    #[error("unsupported derivative order {got} (max {max})")]
    UnsupportedOrder { got: usize, max: usize },

    /// A black-box potential returned a non-finite value.
    #[error("potential evaluation returned a non-finite value at {0}")]
    Evaluation(String),

    /// The mixed Hessian of the potential is not positive definite.
    #[error("not a Kähler metric at {0}: mixed Hessian is not positive definite")]
    NotKahler(String),

    #[error("singular matrix in {0}")]
    SingularMatrix(String),

    /// A Hermitian form has an eigenvalue too close to zero to classify.
    #[error("degenerate form: eigenvalue {eigenvalue:e} below threshold {threshold:e}")]
    DegenerateForm { eigenvalue: f64, threshold: f64 },

    /// Parallel transport failed to preserve the Gram matrix to tolerance.
    #[error("transport accuracy failure: Gram drift {drift:e} exceeds {rtol:e}; retry with at least {suggested_steps} steps per unit length")]
    TransportAccuracy {
        drift: f64,
        rtol: f64,
        suggested_steps: usize,
    },

    /// Flatness precondition of the developing-map construction failed.
    #[error("connection not flat: developing map undefined (flatness norm {norm:e} at sample point)")]
    NotFlat { norm: f64 },

    /// The transported section left the positivity cone of the indefinite form.
    #[error("image left the positive cone: (1,n)-norm {0:e} is not positive")]
    ImageLeftCone(f64),

    /// Invalid potential specification (validation or parse failure).
    #[error("invalid potential spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A structural identity (tensor symmetry) failed beyond tolerance.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}
