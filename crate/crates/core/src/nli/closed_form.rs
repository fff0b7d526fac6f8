//! Closed-form estimators: the effective-attenuation formula and the
//! ISRS GN closed form with separate SPM and XPM contributions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::LinkConfig;
use crate::options::ModelOptions;
use crate::plan::ChannelPlan;
use crate::raman::EffectiveAttenuation;

use super::NliEntry;

/// Below this |φ_{i,k}B_i/α| the XPM brackets use the atan series.
const ATAN_SERIES_LIMIT: f64 = 1e-6;

/// atan(p·b/x)/p, continued to p = 0
fn atan_ratio(p: f64, b: f64, x: f64) -> f64 {
    let arg = p * b / x;
    if arg.abs() < ATAN_SERIES_LIMIT {
        b / x * (1.0 - arg * arg / 3.0)
    } else {
        arg.atan() / p
    }
}

/// Auxiliary quantities of the ISRS GN closed form for one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormTerms {
    pub channel: usize,
    /// φ_i = (3/2)π²(β₂ + 2πβ₃f_i) (s²)
    pub phi_i: f64,
    /// φ_{i,k} = 2π²(f_k − f_i)[β₂ + πβ₃(f_i + f_k)] for every k (s²)
    pub phi_ik: Vec<f64>,
    /// T_k = (α + ᾱ − P_tot·C_r·f_k)² for every k (Np²/m²)
    pub t: Vec<f64>,
    /// A = α + ᾱ (Np/m)
    pub a: f64,
    /// SPM part of η (1/W²)
    pub spm: f64,
    /// XPM part of η (1/W²)
    pub xpm: f64,
}

impl ClosedFormTerms {
    pub fn new(plan: &ChannelPlan, link: &LinkConfig, channel: usize, opts: &ModelOptions) -> Result<Self> {
        opts.validate()?;
        let ch = plan.channel(channel)?;
        if ch.power <= 0.0 {
            return Err(Error::ZeroPower(channel));
        }
        let fiber = link.homogeneous_fiber()?;
        let d = fiber.betas();
        let (alpha, alpha_bar) = (fiber.alpha(), fiber.alpha_bar());
        let gamma2 = fiber.gamma() * fiber.gamma();
        let n = link.span_count() as f64;
        let p_tot = link.span(0).launch_total();
        let cr = fiber.raman_slope();
        let fi = ch.frequency;
        let (bi, pi) = (ch.bandwidth, ch.power);

        let a = alpha + alpha_bar;
        let phi_i = 1.5 * PI * PI * (d.beta2 + 2.0 * PI * d.beta3 * fi);
        if phi_i == 0.0 {
            return Err(Error::ZeroDispersion(channel));
        }
        let phi_ik: Vec<f64> = plan
            .channels()
            .iter()
            .map(|c| 2.0 * PI * PI * (c.frequency - fi) * (d.beta2 + PI * d.beta3 * (fi + c.frequency)))
            .collect();
        let t: Vec<f64> = plan.channels().iter().map(|c| (a - p_tot * cr * c.frequency).powi(2)).collect();
        let denom = alpha_bar * (2.0 * alpha + alpha_bar);
        let a2 = a * a;
        let al2 = alpha * alpha;

        let ti = t[channel];
        let spm = 4.0 / 9.0 * gamma2 / (bi * bi) * PI * n.powf(1.0 + opts.epsilon) / (phi_i * denom)
            * ((ti - al2) / alpha * (phi_i * bi * bi / (PI * alpha)).asinh()
                + (a2 - ti) / a * (phi_i * bi * bi / (PI * a)).asinh());

        let mut xpm = 0.0;
        for (k, c) in plan.channels().iter().enumerate() {
            if k == channel || c.power == 0.0 {
                continue;
            }
            let (tk, p) = (t[k], phi_ik[k]);
            let bracket = (tk - al2) / alpha * atan_ratio(p, bi, alpha) + (a2 - tk) / a * atan_ratio(p, bi, a);
            xpm += 32.0 / 27.0 * (c.power / pi).powi(2) * gamma2 / c.bandwidth * n / denom * bracket;
        }
        Ok(ClosedFormTerms { channel, phi_i, phi_ik, t, a, spm, xpm })
    }

    pub fn eta(&self) -> f64 {
        self.spm + self.xpm
    }
}

/// η of `channel` from the ISRS GN closed form.
pub fn eta_isrs_gn_cf(
    plan: &ChannelPlan,
    link: &LinkConfig,
    channel: usize,
    opts: &ModelOptions,
) -> Result<NliEntry> {
    let terms = ClosedFormTerms::new(plan, link, channel, opts)?;
    let ch = plan.channel(channel)?;
    Ok(NliEntry::new(channel, ch.frequency, terms.eta().max(0.0), ch.power, 0.0))
}

/// η of `channel` from the closed form with effective attenuation α_eff,i
/// and effective length L_eff,i.
pub fn eta_effective_attenuation_cf(
    plan: &ChannelPlan,
    link: &LinkConfig,
    eff: &EffectiveAttenuation,
    channel: usize,
    opts: &ModelOptions,
) -> Result<NliEntry> {
    opts.validate()?;
    let ch = plan.channel(channel)?;
    if ch.power <= 0.0 {
        return Err(Error::ZeroPower(channel));
    }
    if eff.alpha_eff().len() != plan.len() {
        return Err(Error::param("effective attenuation was fitted on a different plan"));
    }
    let fiber = link.homogeneous_fiber()?;
    let beta2 = fiber.betas().beta2_at(ch.frequency).abs();
    if beta2 == 0.0 {
        return Err(Error::ZeroDispersion(channel));
    }
    let (ae, le) = (eff.alpha_eff()[channel], eff.l_eff()[channel]);
    let n = link.span_count() as f64;
    let btot = plan.total_bandwidth();
    let bi = ch.bandwidth;
    let eta = 8.0 / 27.0 * fiber.gamma().powi(2) * n.powf(1.0 + opts.epsilon) * ae * le * le
        / (PI * beta2 * bi * bi)
        * (0.5 * PI * PI * beta2 * btot * btot / ae).asinh();
    Ok(NliEntry::new(channel, ch.frequency, eta, ch.power, 0.0))
}
