use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library.
///
/// Everything except [`Error::InternalInvariantViolation`] describes bad input;
/// the CLI maps the former to exit code 2 and the rest to exit code 1.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("at least 3 normals are required, got {count}")]
    TooFewNormals { count: usize },

    #[error("normal {index} has norm {norm}, expected 1")]
    NotUnit { index: usize, norm: f64 },

    #[error("normals {first} and {second} coincide (angular distance {distance} rad)")]
    DuplicateNormal {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("normals do not positively span the plane (largest angular gap {max_gap} rad >= pi)")]
    NotPositivelySpanning { max_gap: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("expected a vector of length {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("polygon is degenerate (area {area})")]
    DegeneratePolygon { area: f64 },

    #[error("matrix is not unimodular (det {det})")]
    NotUnimodular { det: f64 },

    #[error("index {index} is not in U_square")]
    NotSquareIndex { index: usize },

    #[error("polytope dimension mismatch: declared {declared}, vertex affine rank {found}")]
    DimensionMismatch { declared: usize, found: usize },

    #[error("expected exactly 4 normals, got {count}")]
    NotQuadrilateral { count: usize },

    #[error("normal set has no antipodal pair")]
    NoAntipodalPair,

    #[error("normal set is not a (non-parallelogram) trapezoid")]
    NotTrapezoid,

    #[error("normal set is not a parallelogram")]
    NotParallelogram,

    #[error("vector is not normalized (sum {sum})")]
    NotNormalized { sum: f64 },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("gave up after {attempts} degenerate draws")]
    TooManyDegenerateDraws { attempts: usize },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed JSON in {source_name}: {message}")]
    Parse { source_name: String, message: String },

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

impl Error {
    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InternalInvariantViolation(_))
    }
}

/// Checks that `v` has length `expected` and only finite entries.
pub(crate) fn check_vector(v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: v.len(),
        });
    }
    if let Some(index) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}
