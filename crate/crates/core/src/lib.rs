//! Nonlinear interference (NLI) estimation for ultra-wideband optical fibre
//! links with inter-channel stimulated Raman scattering (ISRS).
//!
//! The crate offers five estimators of the per-channel NLI coefficient η
//! (with `P_NLI = η·P_i³`):
//!
//! * the effective-attenuation approach in integral form and in closed form,
//! * the ISRS GN model in integral form for arbitrary power profiles,
//! * the ISRS GN model with the analytic triangular-gain profile,
//! * the closed-form ISRS GN model with SPM and XPM terms,
//!
//! and a split-step Fourier simulator used as a ground-truth oracle.
//! All quantities are SI internally; see [`units`] for the boundary helpers.

// `!(x > 0.0)` is how NaN gets rejected; index loops walk several arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fiber;
pub mod link;
pub mod nli;
pub mod options;
pub mod plan;
pub mod quad;
pub mod raman;
pub mod report;
pub mod scenario;
pub mod ssfm;
pub mod units;

pub use error::{Error, Result};
pub use fiber::{dispersion_to_betas, DispersionCoeffs, FiberParams};
pub use link::{GainPolicy, LinkConfig, Span};
pub use options::ModelOptions;
pub use plan::{Channel, ChannelPlan};
pub use raman::{
    analytic_triangular_profile, fit_effective_attenuation, isrs_power_transfer_db, solve_raman_ode,
    EffectiveAttenuation, PowerProfile,
};
