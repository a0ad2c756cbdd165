use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown generator symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown pair `{0}`")]
    UnknownPair(String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("group closure exceeded the cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("generator pairing does not extend to an isomorphism (witness word `{word}`)")]
    NotSameGroup { word: String },
    #[error("invalid orbifold signature: {0}")]
    InvalidSignature(String),
    #[error("gluing for color {color} is not an involution")]
    BadGluing { color: usize },
    #[error("tile adjacency graph is disconnected")]
    Disconnected,
    #[error("tiling admits no proper black/white coloring")]
    NotBipartite,
    #[error("inconsistent tiling: {0}")]
    InconsistentTiling(String),
    #[error("no transplantation: {0}")]
    NoTransplant(String),
    #[error("parity signs fail intertwining for color {color}")]
    SignObstruction { color: usize },
    #[error("Gram matrix lacks the diagonal/off-diagonal two-value pattern")]
    NotReducible,
    #[error("norm-preserving equations have no real solution")]
    NoSolution,
    #[error("not a homophonic map: {0}")]
    NotHomophonicMap(String),
    #[error("interior angle sums differ from 2π at {} vertex cycle(s)", .0.len())]
    ConeManifold(Vec<ConeDefect>),
    #[error("placements disagree across glued edge (tile {tile}, color {color})")]
    InconsistentRealization { tile: usize, color: usize },
    #[error("refusing to mesh an overlapping domain")]
    RefusedOverlappingDomain,
    #[error("degenerate element {0}")]
    DegenerateElement(usize),
    #[error("eigensolver did not converge after {iterations} iterations")]
    SolverDidNotConverge { iterations: usize },
    #[error("spectra are not comparable: {0}")]
    IncomparableSpectra(String),
    #[error("transplanted values disagree at node {node} by {gap:e}")]
    SeamViolation { node: usize, gap: f64 },
    #[error("point is not a mesh vertex")]
    PointNotInMesh,
    #[error("invalid triangle: {0}")]
    InvalidTriangle(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An interior vertex cycle whose total angle is not 2π.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConeDefect {
    pub corner: usize,
    pub tiles: Vec<usize>,
    /// 2π minus the total angle around the vertex.
    pub deficit: f64,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
