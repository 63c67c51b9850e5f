//! Total variation and `L^2` mixing of random walks driven by central
//! states on free orthogonal, free symmetric and quantum automorphism
//! quantum groups.
//!
//! The crate is layered: [`kernel`] holds the Chebyshev machinery and
//! thresholds, [`states`] the central states, [`bounds`] the closed-form and
//! series bounds, [`oracle`] an independent exact evaluation by quadrature
//! and [`verify`] grid checks of the underlying inequalities.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod envelope;
pub mod error;
pub mod kernel;
pub mod numeric;
pub mod oracle;
pub mod states;
pub mod verify;

pub use bounds::{BoundStatus, BoundValue, CutoffProfile, ExactCell, ProfileRow};
pub use error::{Error, Result};
pub use kernel::{GroupFamily, GroupKind, NumericContext, StepThreshold};
pub use oracle::{ExactTv, TvEstimate};
pub use states::{AngleMixture, CentralState, MixtureAtom, StateKind};
pub use verify::{CheckReport, GridSpec};
