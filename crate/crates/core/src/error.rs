//! Error types shared across the crate.

use thiserror::Error;

/// Reason a matrix failed the proximality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NotProximal {
    /// The eigenvalue of maximal modulus has a nonzero imaginary part.
    ComplexLeadingEigenvalue { modulus: f64 },
    /// Two eigenvalues tie for maximal modulus within the gap tolerance.
    ModulusTie { gap: f64 },
}

impl std::fmt::Display for NotProximal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NotProximal::ComplexLeadingEigenvalue { modulus } => {
                write!(f, "leading eigenvalue is complex (modulus {modulus})")
            }
            NotProximal::ModulusTie { gap } => {
                write!(f, "leading eigenvalue modulus tie (log gap {gap:e})")
            }
        }
    }
}

/// Which of the three contraction conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProximalCondition {
    /// `d(fixed point, fixed hyperplane) >= 2 eps`.
    Separation,
    /// The projective action is `eps`-Lipschitz on the far ball.
    Lipschitz,
    /// The far ball maps into the `eps`-ball around the fixed point.
    ImageContainment,
}

impl std::fmt::Display for ProximalCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ProximalCondition::Separation => "separation",
            ProximalCondition::Lipschitz => "lipschitz",
            ProximalCondition::ImageContainment => "image-containment",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square and at least 2x2, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("determinant {det} is not 1 within tolerance {tol}")]
    NotUnimodular { det: f64, tol: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero vector does not define a projective point")]
    ZeroVector,

    #[error("numerical routine failed: {0}")]
    Numerical(String),

    #[error("element {index} ({name}) is not biproximal: {reason}")]
    NotBiproximal {
        index: usize,
        name: String,
        reason: NotProximal,
    },

    #[error("symmetric set is empty")]
    DegenerateSet,

    #[error("pairing is not a fixpoint-free involution at index {index}")]
    BadPairing { index: usize },

    #[error("element {index} times its partner differs from the identity by {defect:e}")]
    PairingDefect { index: usize, defect: f64 },

    #[error("set is not well-positioned: {0}")]
    NotWellPositioned(String),

    #[error("condition {condition} failed for element {name} with margin {margin:e}")]
    ConditionFailed {
        name: String,
        condition: ProximalCondition,
        margin: f64,
    },

    #[error("pair ({i},{j}) too close: d = {distance}, required {required}")]
    PairTooClose {
        i: usize,
        j: usize,
        distance: f64,
        required: f64,
    },

    #[error("power search exhausted at n_max = {n_max}; closest margin {closest:e}")]
    Exhausted { n_max: u32, closest: f64 },

    #[error("no ping-pong base point found after {attempts} attempts")]
    BasePointNotFound { attempts: usize },

    #[error("word evaluation overflowed f64 range; use the log-domain evaluation")]
    Overflow,

    #[error("letter index {index} out of range for rank {rank}")]
    BadLetter { index: usize, rank: usize },

    #[error("generator index {index} out of range for rank {rank}")]
    BadGenerator { index: usize, rank: usize },

    #[error("cannot twist the twisting generator itself")]
    TwistOfTwister,

    #[error("vertex {id} not found in graph")]
    UnknownVertex { id: String },

    #[error("vertex {id} is not cyclic")]
    NotCyclicVertex { id: String },

    #[error("edge index {index} out of range: vertex has {degree} incident edges")]
    BadEdgeIndex { index: usize, degree: usize },

    #[error("registering spec is missing a matrix for {which}")]
    MissingMatrix { which: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
