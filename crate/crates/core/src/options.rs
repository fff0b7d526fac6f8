use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical and modelling knobs shared by the estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    /// Coherence exponent of the `n^{1+ε}` span accumulation.
    pub epsilon: f64,
    /// Relative tolerance of the (f₁, f₂) quadrature.
    pub rel_tol: f64,
    /// Subdivision budget of each adaptive 1D pass.
    pub max_intervals: usize,
    /// Output grid spacing of sampled power profiles (m).
    pub z_step: f64,
    /// Relative convergence target of the Raman ODE solver.
    pub ode_tol: f64,
    /// Scale the Raman depletion term by the photon-energy ratio.
    pub photon_ratio: bool,
    /// Span interference is resolved exactly while |κ|·L_min < 2π·this;
    /// beyond, the phase average is used. Zero disables the switch.
    pub coherence_periods: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            epsilon: 0.0,
            rel_tol: 2e-4,
            max_intervals: 20_000,
            z_step: 2e3,
            ode_tol: 1e-6,
            photon_ratio: false,
            coherence_periods: 16.0,
        }
    }
}

impl ModelOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::param("epsilon must be non-negative"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::param("rel_tol must lie in (0, 1)"));
        }
        if self.max_intervals < 4 {
            return Err(Error::param("max_intervals must be at least 4"));
        }
        if !(self.z_step.is_finite() && self.z_step > 0.0) {
            return Err(Error::param("z_step must be positive"));
        }
        if !(self.ode_tol > 0.0 && self.ode_tol < 1.0) {
            return Err(Error::param("ode_tol must lie in (0, 1)"));
        }
        if !(self.coherence_periods.is_finite() && self.coherence_periods >= 0.0) {
            return Err(Error::param("coherence_periods must be non-negative"));
        }
        Ok(())
    }
}
