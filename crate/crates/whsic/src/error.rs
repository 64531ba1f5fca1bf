//! Error type shared by every module of the crate.

/// Crate-wide error enumeration.
///
/// Numerical verification failures carry the measured residual so callers can
/// report *how far* an input is from satisfying a contract, not merely that it
/// failed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The Weyl-Heisenberg constructions need at least a qubit.
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    /// Dimension of this crate's dense constructions is capped to keep every
    /// operation a desk-scale computation.
    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::MAX_DIMENSION)]
    DimensionTooLarge(usize),

    /// A vector or matrix has the wrong size for the requested operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A vector that should live on a tensor square H ⊗ H has a length that
    /// is not a perfect square.
    #[error("vector length {len} is not a perfect square, so it cannot live on a tensor square")]
    NotTensorSquare { len: usize },

    /// An operation that divides by a norm received the zero vector.
    #[error("input vector is zero")]
    ZeroVector,

    /// A vector expected in the symmetric subspace has a component outside it.
    #[error(
        "vector is not symmetric: asymmetry residual {residual:.3e} exceeds tolerance {tol:.3e}"
    )]
    NotSymmetric { residual: f64, tol: f64 },

    /// A matrix expected to be unitary is not, within tolerance.
    #[error("matrix is not unitary: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    /// A candidate vector failed the Weyl-Heisenberg basis membership test.
    #[error(
        "not a WH-type basis fiducial: max displaced overlap {max_overlap:.3e}, \
         norm deviation {norm_residual:.3e}, tolerance {tol:.3e}"
    )]
    NotWhFiducial {
        max_overlap: f64,
        norm_residual: f64,
        tol: f64,
    },

    /// A candidate vector failed the SIC overlap test.
    #[error(
        "not a SIC fiducial: max overlap deviation {residual:.3e} exceeds tolerance {tol:.3e}"
    )]
    NotSicFiducial { residual: f64, tol: f64 },

    /// The lift of a SIC fiducial produced components that are not orthogonal.
    #[error("lifted components are not orthonormal: Gram residual {residual:.3e}")]
    LiftNotOrthogonal { residual: f64 },

    /// Fiducial extraction from a search result found a state that is not
    /// close enough to a symmetric product state.
    #[error(
        "extraction failed: subdominant Schmidt coefficient {subdominant:.3e} \
         exceeds tolerance {tol:.3e}"
    )]
    ExtractionFailed { subdominant: f64, tol: f64 },

    /// An odd-dimension-only construction received an even dimension.
    #[error("dimension {0} is even; this construction is defined only for odd dimensions")]
    EvenDimension(usize),

    /// A lattice matrix does not satisfy the determinant congruence required
    /// for phase re-indexing.
    #[error(
        "lattice matrix determinant is {det_mod} (mod {d}) but must equal \
         (d+1)/2 = {required} (mod {d})"
    )]
    InvalidLatticeMatrix {
        det_mod: i64,
        required: i64,
        d: usize,
    },

    /// No built-in fiducial is available in this dimension.
    #[error("no built-in SIC fiducial for dimension {0}; supply one from a file")]
    NoKnownFiducial(usize),

    /// A subspace label does not belong to the chart it was used with.
    #[error("label {label} does not exist in the chart for dimension {d}")]
    UnknownLabel { label: String, d: usize },

    /// A constructed isometry failed its intertwining self-check.
    #[error("canonical isometry self-check failed: intertwining residual {residual:.3e}")]
    IntertwinerCheck { residual: f64 },

    /// An operation that depends on the canonical intertwining normalization
    /// received a chart with raw isometries.
    #[error("chart isometries are not canonical; apply canonical_isometries first")]
    ChartNotCanonical,

    /// Wrong number of parameter blocks, or a block of the wrong size.
    #[error("expected {expected} unitary blocks of size {size}x{size}, got {got}")]
    BlockShape {
        expected: usize,
        size: usize,
        got: String,
    },

    /// A structured data file could not be interpreted.
    #[error("invalid file content: {0}")]
    FileFormat(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure; the message includes line/column.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
