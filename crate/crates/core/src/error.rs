use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid type specification `{spec}`: {reason}")]
    Parse { spec: String, reason: String },

    #[error("invalid Coxeter matrix: {0}")]
    InvalidMatrix(String),

    #[error("degenerate (affine) type: smallest form eigenvalue {0:e}")]
    DegenerateType(f64),

    #[error("Coxeter matrix is not of finite type")]
    NotFinite,

    #[error("root closure diverged after {0} roots")]
    RootClosureDiverged(usize),

    #[error("root dedup ambiguity: candidate at distance {0:e} from a stored root")]
    DedupAmbiguity(f64),

    #[error("reflection image of root {0} not found")]
    RootNotFound(usize),

    #[error("group closure exceeded {0} elements")]
    GroupTooLarge(usize),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("function value missing at vertex {0}")]
    MissingValue(usize),

    #[error("closed-form evaluation requires f(x) = 0, got {0}")]
    NonzeroBase(f64),

    #[error("matrix is not symmetric (deviation {0:e})")]
    Asymmetric(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error("isoperimetric bound requires K != 0 and lambda > 0")]
    BadIsoParameters,

    #[error("exhaustive subset enumeration needs at most 20 vertices, graph has {0}")]
    TooManyVertices(usize),

    #[error("element {0} is not at distance 2 from the identity")]
    NotInSphere2(usize),

    #[error("maximal dihedral subgroup needs two distinct reflections")]
    SameReflection,

    #[error("element {0} is not a reflection")]
    NotAReflection(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
