//! Fibre constants and their dispersion coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, SPEED_OF_LIGHT};

/// Per-span physical constants, stored in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberParams {
    alpha: f64,
    alpha_bar: f64,
    gamma: f64,
    dispersion: f64,
    slope: f64,
    raman_slope: f64,
    ref_wavelength: f64,
}

impl FiberParams {
    /// All values in SI: `alpha` in Np/m, `gamma` in 1/(W·m), `dispersion` in
    /// s/m², `slope` in s/m³, `raman_slope` in 1/(W·m·Hz), `ref_wavelength` in m.
    /// The auxiliary attenuation `alpha_bar` starts out equal to `alpha`.
    pub fn new(
        alpha: f64,
        gamma: f64,
        dispersion: f64,
        slope: f64,
        raman_slope: f64,
        ref_wavelength: f64,
    ) -> Result<Self> {
        let fp = FiberParams {
            alpha,
            alpha_bar: alpha,
            gamma,
            dispersion,
            slope,
            raman_slope,
            ref_wavelength,
        };
        fp.validate()?;
        Ok(fp)
    }

    /// Constructor taking the engineering units used in data sheets.
    pub fn from_engineering(
        alpha_db_per_km: f64,
        gamma_per_w_per_km: f64,
        dispersion_ps_per_nm_km: f64,
        slope_ps_per_nm2_km: f64,
        cr_per_w_per_km_per_thz: f64,
        ref_wavelength_nm: f64,
    ) -> Result<Self> {
        Self::new(
            units::db_per_km_to_np_per_m(alpha_db_per_km),
            units::per_w_km_to_si(gamma_per_w_per_km),
            units::ps_per_nm_km_to_si(dispersion_ps_per_nm_km),
            units::ps_per_nm2_km_to_si(slope_ps_per_nm2_km),
            units::per_w_km_thz_to_si(cr_per_w_per_km_per_thz),
            ref_wavelength_nm * 1e-9,
        )
    }

    /// Standard single-mode fibre around 1570 nm (0.2 dB/km, 18 ps/(nm·km),
    /// 0.067 ps/(nm²·km), 1.2 1/(W·km), C_r = 0.0236 1/(W·km·THz)).
    pub fn standard_smf() -> Self {
        Self::from_engineering(0.2, 1.2, 18.0, 0.067, 0.0236, 1570.0)
            .expect("reference fibre constants are valid")
    }

    pub fn with_alpha_bar(mut self, alpha_bar: f64) -> Result<Self> {
        if !(alpha_bar.is_finite() && alpha_bar > 0.0) {
            return Err(Error::param(format!("alpha_bar must be positive, got {alpha_bar}")));
        }
        self.alpha_bar = alpha_bar;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn with_raman_slope(mut self, raman_slope: f64) -> Result<Self> {
        self.raman_slope = raman_slope;
        self.validate()?;
        Ok(self)
    }

    /// Replaces `alpha`; `alpha_bar` follows it when the two were equal.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if self.alpha_bar == self.alpha {
            self.alpha_bar = alpha;
        }
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dispersion(mut self, dispersion: f64, slope: f64) -> Result<Self> {
        self.dispersion = dispersion;
        self.slope = slope;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.alpha,
            self.alpha_bar,
            self.gamma,
            self.dispersion,
            self.slope,
            self.raman_slope,
            self.ref_wavelength,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("fibre parameters must be finite"));
        }
        if self.alpha <= 0.0 {
            return Err(Error::param(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.alpha_bar <= 0.0 {
            return Err(Error::param("alpha_bar must be positive"));
        }
        if self.gamma < 0.0 {
            return Err(Error::param("gamma must be non-negative"));
        }
        if self.raman_slope < 0.0 {
            return Err(Error::param("Raman gain slope must be non-negative"));
        }
        if self.ref_wavelength <= 0.0 {
            return Err(Error::param("reference wavelength must be positive"));
        }
        Ok(())
    }

    /// Attenuation (Np/m).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Auxiliary attenuation of the two-term loss model (Np/m).
    pub fn alpha_bar(&self) -> f64 {
        self.alpha_bar
    }

    /// Nonlinearity coefficient (1/(W·m)).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Dispersion parameter D (s/m²).
    pub fn dispersion(&self) -> f64 {
        self.dispersion
    }

    /// Dispersion slope S (s/m³).
    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// Raman gain slope C_r (1/(W·m·Hz)).
    pub fn raman_slope(&self) -> f64 {
        self.raman_slope
    }

    pub fn ref_wavelength(&self) -> f64 {
        self.ref_wavelength
    }

    /// Absolute optical frequency of the reference carrier (Hz).
    pub fn ref_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / self.ref_wavelength
    }

    pub fn betas(&self) -> DispersionCoeffs {
        dispersion_to_betas(self)
    }

    /// True when two fibres agree on everything the NLI estimators consume.
    pub(crate) fn same_propagation(&self, other: &FiberParams) -> bool {
        self.gamma == other.gamma
            && self.dispersion == other.dispersion
            && self.slope == other.slope
            && self.raman_slope == other.raman_slope
            && self.ref_wavelength == other.ref_wavelength
            && self.alpha == other.alpha
            && self.alpha_bar == other.alpha_bar
    }
}

/// Group-velocity dispersion coefficients at the reference frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionCoeffs {
    /// s²/m
    pub beta2: f64,
    /// s³/m
    pub beta3: f64,
}

impl DispersionCoeffs {
    /// β₂ seen by a channel at frequency offset `f` (Hz).
    pub fn beta2_at(&self, f: f64) -> f64 {
        self.beta2 + 2.0 * PI * self.beta3 * f
    }

    /// Inverse map back to (D, S) at wavelength `lambda`.
    pub fn to_dispersion(&self, lambda: f64) -> (f64, f64) {
        let k = 2.0 * PI * SPEED_OF_LIGHT / (lambda * lambda);
        let d = -k * self.beta2;
        let s = self.beta3 * k * k - 2.0 * d / lambda;
        (d, s)
    }
}

/// β₂ = −Dλ²/(2πc), β₃ = (S + 2D/λ)(λ²/(2πc))².
pub fn dispersion_to_betas(fp: &FiberParams) -> DispersionCoeffs {
    let lambda = fp.ref_wavelength;
    let k = lambda * lambda / (2.0 * PI * SPEED_OF_LIGHT);
    DispersionCoeffs {
        beta2: -fp.dispersion * k,
        beta3: (fp.slope + 2.0 * fp.dispersion / lambda) * k * k,
    }
}
