//! Certification of projective Anosov Schottky groups.
//!
//! Given a finite symmetric set of unimodular matrices, this crate decides
//! whether the set is well-positioned, searches for a power making it an
//! epsilon-Schottky set together with its dual, constructs ping-pong limit
//! maps, and assembles a conditional projective-Anosov verdict from norm
//! growth along reduced words. A small symbolic layer models JSJ graphs of
//! groups, twist groups, and registering subgroups so the same machinery
//! can produce witnesses for amalgam decompositions.

pub mod cartan;
pub mod cert;
pub mod config;
pub mod error;
pub mod jsj;
pub mod matrix;
pub mod projective;
pub mod proximal;
pub mod schottky;
pub mod symmetric;
pub mod words;

pub use cartan::{alpha1, cartan_projection, cartan_projection_power, jordan_projection};
pub use cartan::{CartanVector, JordanVector};
pub use cert::{
    alpha1_growth_check, benoist_check, certify_projective_anosov, dynamics_check, injectivity_check,
    limit_map, ping_pong_base, transversality_check, AnosovVerdict, LimitMapSample, PingPongBase,
    SchottkyData, VerdictGrade,
};
pub use config::{CEps, RunConfig};
pub use error::{Error, NotProximal, Result};
pub use jsj::{
    certify_registering, realize_twist, twist_group, validate_jsj, GraphOfGroups, JsjVerdict,
    RegisteringSpec, TwistGroupModel,
};
pub use matrix::{exterior_square, ScaledMatrix, UnimodularMatrix};
pub use projective::{point_hyperplane_distance, proj_distance, ProjHyperplane, ProjPoint};
pub use proximal::{biproximality_test, proximality_test, ProximalData};
pub use schottky::{
    check_epsilon_proximal, check_epsilon_schottky, check_well_positioned, compute_epsilon,
    estimate_c_epsilon, power_search, CEpsEstimate, PowerSearchResult, SamplingParams,
    SchottkyCertificate, WellPositionedVerdict,
};
pub use symmetric::{PoweredSet, ProximalityBundle, SymmetricSet};
pub use words::{FreeAutomorphism, Letter, ReducedWord};
