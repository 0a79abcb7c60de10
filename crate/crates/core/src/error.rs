use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library. Display strings lead with the variant
/// name so that the runner can surface it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("GridMismatch: {0}")]
    GridMismatch(String),
    #[error("NonFinite: {0}")]
    NonFinite(String),
    #[error("BlowUp: sup norm {sup:e} exceeds threshold {threshold:e} at t = {time}")]
    BlowUp { time: f64, sup: f64, threshold: f64 },
    #[error("NoContraction: Picard distance failed to decrease ({0})")]
    NoContraction(String),
    #[error("ZeroInitialData: initial field vanishes identically")]
    ZeroInitialData,
    #[error("InvalidGeometry: {0}")]
    InvalidGeometry(String),
    #[error("ResolutionTooCoarse: ball radius {r} is below two lattice spacings ({dx})")]
    ResolutionTooCoarse { r: f64, dx: f64 },
    #[error("IndexOutOfRange: index {index} not below {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("ZeroDenominator: weighted mass of the localized field vanishes")]
    ZeroDenominator,
    #[error("EmptyWindow: no snapshots in [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("BoundarySample: sample {0} has no neighbour on both sides")]
    BoundarySample(usize),
    #[error("InsufficientSamples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("NonPositiveG: sampled function must be positive at t1, t2, t3")]
    NonPositiveG,
    #[error("BadOrdering: {0}")]
    BadOrdering(String),
    #[error("ZeroTerminalMass: terminal ball mass must be positive")]
    ZeroTerminalMass,
    #[error("ZeroEnergy: local energy vanishes")]
    ZeroEnergy,
    #[error("ZeroBallMass: ball mass vanishes while cube mass is {cube_mass:e}")]
    ZeroBallMass { cube_mass: f64 },
    #[error("ZeroInitialDifference: the two initial states coincide")]
    ZeroInitialDifference,
    #[error("ZeroObservation: observed mass vanishes while the difference does not")]
    ZeroObservation,
    #[error("InsufficientData: need at least {need} triples, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("NonPositiveTriple: triple {0} has a non-positive entry")]
    NonPositiveTriple(usize),
    #[error("ExponentOutOfRange: p = {p} must satisfy p < 1 + 4/n = {limit}")]
    ExponentOutOfRange { p: f64, limit: f64 },
    #[error("IntegrationFailure: {0}")]
    IntegrationFailure(String),
    #[error("SnapshotFormat: {0}")]
    SnapshotFormat(String),
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Variant name, as used in runner messages and exit diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::GridMismatch(_) => "GridMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::BlowUp { .. } => "BlowUp",
            Error::NoContraction(_) => "NoContraction",
            Error::ZeroInitialData => "ZeroInitialData",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::ResolutionTooCoarse { .. } => "ResolutionTooCoarse",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::EmptyWindow { .. } => "EmptyWindow",
            Error::BoundarySample(_) => "BoundarySample",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::NonPositiveG => "NonPositiveG",
            Error::BadOrdering(_) => "BadOrdering",
            Error::ZeroTerminalMass => "ZeroTerminalMass",
            Error::ZeroEnergy => "ZeroEnergy",
            Error::ZeroBallMass { .. } => "ZeroBallMass",
            Error::ZeroInitialDifference => "ZeroInitialDifference",
            Error::ZeroObservation => "ZeroObservation",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::NonPositiveTriple(_) => "NonPositiveTriple",
            Error::ExponentOutOfRange { .. } => "ExponentOutOfRange",
            Error::IntegrationFailure(_) => "IntegrationFailure",
            Error::SnapshotFormat(_) => "SnapshotFormat",
            Error::Io(_) => "Io",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
