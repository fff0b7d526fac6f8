//! NLI coefficient estimators.
//!
//! Every estimator returns an [`NliEntry`] for one channel; [`NliResult`]
//! collects a full band. Integral forms live in [`integral`], closed forms
//! in [`closed_form`].

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::fiber::DispersionCoeffs;
use crate::units::linear_to_db;

pub mod closed_form;
pub mod integral;
mod kernel;

pub use closed_form::{eta_effective_attenuation_cf, eta_isrs_gn_cf, ClosedFormTerms};
pub use integral::{
    eta_conventional_gn, eta_effective_attenuation_integral, eta_isrs_gn_analytic, eta_isrs_gn_general,
};

/// Identifier of an NLI model, as used on the command line and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    /// Conventional GN integral with per-channel effective attenuation.
    EffAttnIntegral,
    /// ISRS GN integral over an arbitrary power profile.
    IsrsGnGeneral,
    /// ISRS GN integral with the analytic triangular-gain profile.
    IsrsGnAnalytic,
    /// Closed form with per-channel effective attenuation.
    EffAttnCf,
    /// Closed-form ISRS GN model.
    IsrsGnCf,
    /// Split-step Fourier simulation.
    Ssfm,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [
        ModelId::EffAttnIntegral,
        ModelId::IsrsGnGeneral,
        ModelId::IsrsGnAnalytic,
        ModelId::EffAttnCf,
        ModelId::IsrsGnCf,
        ModelId::Ssfm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::EffAttnIntegral => "eff-attn-integral",
            ModelId::IsrsGnGeneral => "isrs-gn-general",
            ModelId::IsrsGnAnalytic => "isrs-gn-analytic",
            ModelId::EffAttnCf => "eff-attn-cf",
            ModelId::IsrsGnCf => "isrs-gn-cf",
            ModelId::Ssfm => "ssfm",
        }
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelId::ALL
            .iter()
            .find(|m| m.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown model `{s}`"))
    }
}

/// η of one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NliEntry {
    pub channel: usize,
    /// Centre frequency offset (Hz).
    pub frequency: f64,
    /// NLI coefficient (1/W²).
    pub eta: f64,
    /// NLI power at the channel launch power (W).
    pub p_nli: f64,
    /// Absolute error estimate of η (1/W²); zero for closed forms.
    pub error: f64,
}

impl NliEntry {
    pub(crate) fn new(channel: usize, frequency: f64, eta: f64, power: f64, error: f64) -> Self {
        NliEntry { channel, frequency, eta, p_nli: nli_power(eta, power), error }
    }

    /// η in dB(1/W²).
    pub fn eta_db(&self) -> f64 {
        linear_to_db(self.eta)
    }
}

/// Per-channel results of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NliResult {
    pub model: ModelId,
    pub entries: Vec<NliEntry>,
}

impl NliResult {
    pub const CSV_HEADER: &'static str =
        "model,channel,frequency_hz,eta_db,eta_per_w2,p_nli_w,error_per_w2";

    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(w, "{}", Self::CSV_HEADER)?;
        }
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{:.6},{:e},{:e},{:e}",
                self.model,
                e.channel,
                e.frequency,
                e.eta_db(),
                e.eta,
                e.p_nli,
                e.error
            )?;
        }
        Ok(())
    }
}

/// Runs `eval` for every channel in `channels` on the rayon pool and
/// collects the entries in the given order.
pub fn evaluate_channels<F>(model: ModelId, channels: &[usize], eval: F) -> crate::Result<NliResult>
where
    F: Fn(usize) -> crate::Result<NliEntry> + Sync,
{
    use rayon::prelude::*;
    let entries = channels.par_iter().map(|&ch| eval(ch)).collect::<crate::Result<Vec<_>>>()?;
    Ok(NliResult { model, entries })
}

/// P_NLI = η·P³
pub fn nli_power(eta: f64, p_i: f64) -> f64 {
    eta * p_i * p_i * p_i
}

/// Phase mismatch φ(f₁, f₂, f_i, ζ) = −4π²(f₁−f_i)(f₂−f_i)[β₂+πβ₃(f₁+f₂)]·ζ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMismatch {
    beta2: f64,
    beta3: f64,
}

impl PhaseMismatch {
    pub fn new(d: DispersionCoeffs) -> Self {
        PhaseMismatch { beta2: d.beta2, beta3: d.beta3 }
    }

    /// φ per unit length (rad/m).
    #[inline]
    pub fn rate(&self, f1: f64, f2: f64, fi: f64) -> f64 {
        -4.0 * PI * PI * (f1 - fi) * (f2 - fi) * (self.beta2 + PI * self.beta3 * (f1 + f2))
    }

    /// φ at distance `zeta` (rad).
    pub fn phase(&self, f1: f64, f2: f64, fi: f64, zeta: f64) -> f64 {
        self.rate(f1, f2, fi) * zeta
    }

    /// Values of f₂ in `(lo, hi)` where |rate(f₁, f₂, f_i)| = `level`.
    pub(crate) fn crossings(&self, f1: f64, fi: f64, level: f64, lo: f64, hi: f64) -> Vec<f64> {
        let d1 = f1 - fi;
        if d1 == 0.0 || !level.is_finite() {
            return Vec::new();
        }
        // rate = −4π²Δ₁·(x − f_i)(b + c·x), b = β₂ + πβ₃f₁, c = πβ₃
        let b = self.beta2 + PI * self.beta3 * f1;
        let c = PI * self.beta3;
        let mut roots = Vec::new();
        for sign in [1.0, -1.0] {
            let q = sign * level / (-4.0 * PI * PI * d1);
            // c·x² + (b − c·f_i)·x − (b·f_i + q) = 0
            let (qa, qb, qc) = (c, b - c * fi, -(b * fi + q));
            if qa.abs() * (hi.abs() + lo.abs()) < 1e-12 * qb.abs() {
                if qb != 0.0 {
                    roots.push(-qc / qb);
                }
                continue;
            }
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            let s = disc.sqrt();
            let t = -0.5 * (qb + qb.signum() * s);
            if t != 0.0 {
                roots.push(t / qa);
                roots.push(qc / t);
            }
        }
        roots.retain(|&x| x > lo && x < hi);
        roots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::FiberParams;
    use proptest::prelude::*;

    #[test]
    fn nli_power_examples() {
        assert_eq!(nli_power(0.0, 1e-3), 0.0);
        assert!((nli_power(100.0, 1e-3) - 1e-7).abs() < 1e-22);
        let p1 = nli_power(37.0, 2e-3);
        let p2 = nli_power(37.0, 4e-3);
        assert!((p2 / p1 - 8.0).abs() < 1e-12);
    }

    #[test]
    fn model_names_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(m.as_str().parse::<ModelId>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.as_str()));
        }
        assert!("gn".parse::<ModelId>().is_err());
    }

    #[test]
    fn crossings_hit_the_level() {
        let pm = PhaseMismatch::new(FiberParams::standard_smf().betas());
        let (f1, fi) = (0.6e12, -0.2e12);
        let level = 0.05;
        let roots = pm.crossings(f1, fi, level, -2e12, 2e12);
        assert!(!roots.is_empty());
        for r in roots {
            let v = pm.rate(f1, r, fi).abs();
            assert!(((v - level) / level).abs() < 1e-9, "{v}");
        }
        assert!(pm.crossings(fi, fi, level, -1e12, 1e12).is_empty());
    }

    proptest! {
        #[test]
        fn phase_mismatch_symmetry(
            f1 in -5e12f64..5e12,
            f2 in -5e12f64..5e12,
            fi in -5e12f64..5e12,
            z in 0.0f64..1e5,
        ) {
            let pm = PhaseMismatch::new(FiberParams::standard_smf().betas());
            prop_assert_eq!(pm.phase(f1, fi, fi, z), 0.0);
            prop_assert_eq!(pm.phase(fi, f2, fi, z), 0.0);
            let a = pm.phase(f1, f2, fi, z);
            let b = pm.phase(f2, f1, fi, z);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }
}
