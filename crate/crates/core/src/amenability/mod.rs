//! Kesten operators, co-growth and Følner sets.

mod cogrowth;
mod folner;
mod kesten;

use thiserror::Error;

use crate::extension::ExtensionError;
use crate::group::GroupError;

pub use cogrowth::{cogrowth_series, CogrowthSeries};
pub use folner::{
    folner_defect, folner_search, folner_search_traced, folner_sequence, FolnerBudget, FolnerCandidate,
    FolnerCertificate, FolnerOutcome, FolnerSet,
};
pub use kesten::{
    build_kesten_walk, default_xi, self_adjoint_check, spectral_radius_estimate, KestenWalk, SpectralEstimate,
    SpectralMethod,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmenabilityError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error("the extension has no involution")]
    NotSymmetric,
    #[error("anchor word must map to the identity")]
    AnchorNotTrivial,
    #[error("word length {n} must exceed the anchor length {anchor}")]
    AnchorTooLong { n: usize, anchor: usize },
    #[error("invalid periodic point: {0}")]
    InvalidXi(String),
    #[error("no admissible words carry positive weight")]
    EmptyWordSet,
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("ρ̂ decreased at k = {k}: {prev} -> {next}")]
    MonotonicityViolated { k: usize, prev: f64, next: f64 },
    #[error("radial recursion needs the uniform walk on free generators")]
    RadialUnsupported,
    #[error("state space exceeded {cap} group elements")]
    StateCapExceeded { cap: usize },
    #[error("Følner set not found at stage {stage}; best defect {best_defect}")]
    FolnerNotFound { stage: usize, best_defect: f64 },
    #[error("invalid Følner request: {0}")]
    InvalidFolnerRequest(String),
}
