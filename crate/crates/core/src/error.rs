use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ill-formed homomorphism: relation {relation} of the source is not sent into the target relations")]
    IllFormedHom { relation: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("tower images did not stabilize within {window} stages")]
    NotStabilized { window: usize },
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("length underflow: {0}")]
    LengthUnderflow(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache corrupt: {0}")]
    CacheCorrupt(String),
    #[error("unsupported base ring: {0}")]
    UnsupportedBase(String),
    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),
    #[error("truncation level must be at least 1")]
    TruncationTooSmall,
    #[error("canonical map is ill-defined: {0}")]
    MapIllDefined(String),
    #[error("axiom {relation} fails{}: {witness}", degree.map(|d| format!(" in degree {d}")).unwrap_or_default())]
    AxiomViolation {
        relation: String,
        degree: Option<i64>,
        witness: String,
    },
    #[error("relation {relation} fails at {witness}")]
    RelationViolation { relation: String, witness: String },
    #[error("condition ({condition}) fails at {witness}")]
    ConditionViolation { condition: String, witness: String },
    #[error("outside the supported envelope: {0}")]
    EnvelopeExceeded(String),
    #[error("relation closure did not converge: {0}")]
    NonConvergent(String),
    #[error("degree {0} is out of range")]
    DegreeOutOfRange(i64),
    #[error("size bound exceeded: {0}")]
    SizeBound(String),
    #[error("oracle mismatch: {0}")]
    Mismatch(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
