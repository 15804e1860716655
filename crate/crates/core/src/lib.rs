//! Pressure, group extensions of subshifts of finite type, and the numerical
//! checks that surround amenability of the extension group.
//!
//! The crate is organised bottom-up: [`sft`] holds the shift, [`potential`]
//! the transfer operator and Gibbs data, [`group`] the group backends,
//! [`extension`] the skew product and its return series, and
//! [`amenability`] the Kesten walk, co-growth and Følner searches.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod amenability;
pub mod extension;
pub mod group;
pub mod numeric;
pub mod potential;
pub mod sft;

use thiserror::Error;

pub use amenability::AmenabilityError;
pub use extension::{ExtensionError, ExtensionSystem};
pub use group::{GroupElement, GroupError, GroupSpec};
pub use potential::{Potential, PotentialError};
pub use sft::{Involution, Shift, ShiftError};

/// Any failure raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Amenability(#[from] AmenabilityError),
}
