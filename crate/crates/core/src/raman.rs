//! Signal power profiles ρ(z, f) under inter-channel stimulated Raman scattering.
//!
//! Two routes produce a [`PowerProfile`]: a numerical solution of the
//! continuous-wave Raman equations with triangular (single-slope) gain, and
//! its closed-form solution. Both are normalised to the transmitter launch
//! power of each channel and sampled on the same per-span grid.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::FiberParams;
use crate::link::LinkConfig;
use crate::options::ModelOptions;
use crate::plan::ChannelPlan;
use crate::units::{linear_to_db, TRIANGULAR_GAIN_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileSource {
    RamanOde,
    AnalyticTriangular,
    Synthetic,
    Measured,
}

/// Samples of one span. `ln_rho[ch][node]` is ln ρ relative to the
/// transmitter power of channel `ch`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanProfile {
    offset: f64,
    length: f64,
    alpha: f64,
    z: Vec<f64>,
    ln_rho: Vec<Vec<f64>>,
}

impl SpanProfile {
    pub(crate) fn new(offset: f64, length: f64, alpha: f64, z: Vec<f64>, ln_rho: Vec<Vec<f64>>) -> Self {
        SpanProfile { offset, length, alpha, z, ln_rho }
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Fibre attenuation of this span (Np/m).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Local sample positions, starting at 0 and ending at the span length.
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn ln_rho(&self, channel: usize) -> &[f64] {
        &self.ln_rho[channel]
    }

    pub fn rho(&self, node: usize, channel: usize) -> f64 {
        self.ln_rho[channel][node].exp()
    }

    pub fn rho_end(&self, channel: usize) -> f64 {
        self.ln_rho[channel].last().copied().unwrap_or(0.0).exp()
    }

    /// ρ at local position `z`, interpolated linearly in ln ρ.
    pub fn rho_at(&self, z: f64, channel: usize) -> f64 {
        let zs = &self.z;
        let lr = &self.ln_rho[channel];
        if zs.len() == 1 || z <= zs[0] {
            return lr[0].exp();
        }
        if z >= zs[zs.len() - 1] {
            return lr[lr.len() - 1].exp();
        }
        let j = zs.partition_point(|&x| x <= z) - 1;
        let t = (z - zs[j]) / (zs[j + 1] - zs[j]);
        (lr[j] + t * (lr[j + 1] - lr[j])).exp()
    }

    pub fn node_count(&self) -> usize {
        self.z.len()
    }
}

/// Normalised signal power ρ(z, f) sampled on a (distance × channel) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    frequencies: Vec<f64>,
    spans: Vec<SpanProfile>,
    source: ProfileSource,
}

impl PowerProfile {
    /// Samples `rho(span, z_local, channel)` on the link's grid.
    pub fn from_fn<F>(
        link: &LinkConfig,
        plan: &ChannelPlan,
        z_step: f64,
        mut rho: F,
    ) -> Result<Self>
    where
        F: FnMut(usize, f64, usize) -> f64,
    {
        if !(z_step > 0.0) {
            return Err(Error::param("z_step must be positive"));
        }
        let mut spans = Vec::with_capacity(link.span_count());
        for (k, span) in link.spans().iter().enumerate() {
            let z = span_grid(span.length(), z_step);
            let mut ln_rho = vec![Vec::with_capacity(z.len()); plan.len()];
            for (ch, col) in ln_rho.iter_mut().enumerate() {
                for &zz in &z {
                    let r = rho(k, zz, ch);
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(Error::NonPositivePower { span: k, channel: ch, z: zz });
                    }
                    col.push(r.ln());
                }
            }
            spans.push(SpanProfile {
                offset: link.offset(k),
                length: span.length(),
                alpha: span.fiber().alpha(),
                z,
                ln_rho,
            });
        }
        Ok(PowerProfile { frequencies: plan.frequencies(), spans, source: ProfileSource::Synthetic })
    }

    pub(crate) fn from_parts(
        frequencies: Vec<f64>,
        spans: Vec<SpanProfile>,
        source: ProfileSource,
    ) -> Self {
        PowerProfile { frequencies, spans, source }
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn channel_count(&self) -> usize {
        self.frequencies.len()
    }

    pub fn spans(&self) -> &[SpanProfile] {
        &self.spans
    }

    pub fn span(&self, k: usize) -> &SpanProfile {
        &self.spans[k]
    }

    pub fn span_count(&self) -> usize {
        self.spans.len()
    }

    pub fn source(&self) -> ProfileSource {
        self.source
    }

    pub fn total_length(&self) -> f64 {
        self.spans.last().map_or(0.0, |s| s.offset + s.length)
    }

    /// For every span, the index of the first span with identical samples.
    pub(crate) fn span_templates(&self) -> Vec<usize> {
        (0..self.spans.len())
            .map(|k| {
                (0..k)
                    .find(|&j| {
                        let (a, b) = (&self.spans[j], &self.spans[k]);
                        a.length == b.length && a.z == b.z && a.ln_rho == b.ln_rho
                    })
                    .unwrap_or(k)
            })
            .collect()
    }

    /// CSV with a `z_m` column (distance from the link input) followed by one
    /// ρ column per channel, headed by the channel frequency offset in Hz.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "z_m")?;
        for f in &self.frequencies {
            write!(w, ",{f}")?;
        }
        writeln!(w)?;
        for span in &self.spans {
            for (node, z) in span.z.iter().enumerate() {
                write!(w, "{}", span.offset + z)?;
                for ch in 0..self.frequencies.len() {
                    write!(w, ",{:e}", span.rho(node, ch))?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

fn span_grid(length: f64, z_step: f64) -> Vec<f64> {
    if length == 0.0 {
        return vec![0.0];
    }
    let n = (length / z_step).ceil().max(1.0) as usize;
    (0..=n).map(|j| length * j as f64 / n as f64).collect()
}

/// L_eff(z) = (1 − e^{−αz})/α
pub(crate) fn effective_length(alpha: f64, z: f64) -> f64 {
    -(-alpha * z).exp_m1() / alpha
}

/// Closed-form triangular-gain profile of one span at distance `z`, per
/// channel centre and normalised to the launch power into that span.
pub(crate) fn triangular_rho(span_plan: &ChannelPlan, fiber: &FiberParams, z: f64) -> Vec<f64> {
    let loss = (-fiber.alpha() * z).exp();
    let p_hat = span_plan.total_power();
    let a = p_hat * fiber.raman_slope() * effective_length(fiber.alpha(), z);
    if a == 0.0 {
        return vec![loss; span_plan.len()];
    }
    let norm = span_plan.exp_weighted_power(a);
    span_plan
        .channels()
        .iter()
        .map(|c| loss * p_hat * (-a * c.frequency).exp() / norm)
        .collect()
}

fn warn_wide_band(plan: &ChannelPlan) {
    if plan.total_bandwidth() > TRIANGULAR_GAIN_LIMIT {
        log::warn!(
            "occupied bandwidth {:.2} THz exceeds the 15 THz range of the triangular Raman gain",
            plan.total_bandwidth() * 1e-12
        );
    }
}

fn check_plan_matches(link: &LinkConfig, plan: &ChannelPlan) -> Result<()> {
    if link.tx_powers().len() != plan.len() {
        return Err(Error::param(format!(
            "link was built for {} channels but the plan has {}",
            link.tx_powers().len(),
            plan.len()
        )));
    }
    Ok(())
}

/// ln of the ratio launch-into-span / transmitter launch, 0 for dark channels.
fn launch_offsets(link: &LinkConfig, k: usize) -> Vec<f64> {
    link.span(k)
        .launch_powers()
        .iter()
        .zip(link.tx_powers())
        .map(|(&p, &tx)| if p > 0.0 && tx > 0.0 { (p / tx).ln() } else { 0.0 })
        .collect()
}

/// Right-hand side of the Raman equations for the span-normalised powers
/// `u` (u = P/P_launch): du_i/dz = u_i·(−α − C_r Σ_j (f_i − f_j)·r_ij·P_j).
struct RamanRhs<'a> {
    alpha: f64,
    cr: f64,
    freqs: &'a [f64],
    launch: &'a [f64],
    /// Absolute optical frequencies when the photon-energy ratio is enabled.
    absolute: Option<Vec<f64>>,
}

impl RamanRhs<'_> {
    fn eval(&self, u: &[f64], du: &mut [f64]) {
        match &self.absolute {
            None => {
                let mut s0 = 0.0;
                let mut s1 = 0.0;
                for j in 0..u.len() {
                    let p = self.launch[j] * u[j];
                    s0 += p;
                    s1 += self.freqs[j] * p;
                }
                for i in 0..u.len() {
                    du[i] = u[i] * (-self.alpha - self.cr * (self.freqs[i] * s0 - s1));
                }
            }
            Some(abs_f) => {
                for i in 0..u.len() {
                    let mut acc = 0.0;
                    for j in 0..u.len() {
                        let p = self.launch[j] * u[j];
                        let df = self.freqs[i] - self.freqs[j];
                        let ratio = if df > 0.0 { abs_f[i] / abs_f[j] } else { 1.0 };
                        acc += df * ratio * p;
                    }
                    du[i] = u[i] * (-self.alpha - self.cr * acc);
                }
            }
        }
    }
}

/// Classic RK4 over `grid` with `sub` equal substeps per grid interval.
/// Returns u at every grid node, `[node][channel]`.
fn rk4_span(rhs: &RamanRhs, grid: &[f64], sub: usize, span: usize) -> Result<Vec<Vec<f64>>> {
    let n = rhs.freqs.len();
    let mut u = vec![1.0; n];
    let mut out = Vec::with_capacity(grid.len());
    out.push(u.clone());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for w in grid.windows(2) {
        let h = (w[1] - w[0]) / sub as f64;
        for s in 0..sub {
            rhs.eval(&u, &mut k1);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * h * k1[i];
            }
            rhs.eval(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * h * k2[i];
            }
            rhs.eval(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = u[i] + h * k3[i];
            }
            rhs.eval(&tmp, &mut k4);
            for i in 0..n {
                u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                if !(u[i] > 0.0 && u[i].is_finite()) {
                    let z = w[0] + (s + 1) as f64 * h;
                    return Err(Error::NonPositivePower { span, channel: i, z });
                }
            }
        }
        out.push(u.clone());
    }
    Ok(out)
}

/// Solves the continuous-wave Raman equations span by span with fixed-step
/// RK4, halving the step until the sampled profile moves by less than
/// `opts.ode_tol` (relative).
pub fn solve_raman_ode(
    link: &LinkConfig,
    plan: &ChannelPlan,
    opts: &ModelOptions,
) -> Result<PowerProfile> {
    opts.validate()?;
    check_plan_matches(link, plan)?;
    warn_wide_band(plan);
    let freqs = plan.frequencies();
    let mut spans = Vec::with_capacity(link.span_count());
    for (k, span) in link.spans().iter().enumerate() {
        let fiber = span.fiber();
        let grid = span_grid(span.length(), opts.z_step);
        let rhs = RamanRhs {
            alpha: fiber.alpha(),
            cr: fiber.raman_slope(),
            freqs: &freqs,
            launch: span.launch_powers(),
            absolute: opts
                .photon_ratio
                .then(|| freqs.iter().map(|f| fiber.ref_frequency() + f).collect()),
        };
        let mut sub = 1;
        let mut prev = rk4_span(&rhs, &grid, sub, k)?;
        let solution = loop {
            if sub > 1 << 16 {
                return Err(Error::OdeStep(format!(
                    "span {k}: no convergence to {} after {sub} substeps per grid interval",
                    opts.ode_tol
                )));
            }
            sub *= 2;
            let cur = rk4_span(&rhs, &grid, sub, k)?;
            let change = prev
                .iter()
                .zip(&cur)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| ((x - y) / y).abs()))
                .fold(0.0, f64::max);
            if change < opts.ode_tol {
                break cur;
            }
            prev = cur;
        };
        let offsets = launch_offsets(link, k);
        let ln_rho = (0..freqs.len())
            .map(|ch| solution.iter().map(|u| u[ch].ln() + offsets[ch]).collect())
            .collect();
        spans.push(SpanProfile {
            offset: link.offset(k),
            length: span.length(),
            alpha: fiber.alpha(),
            z: grid,
            ln_rho,
        });
    }
    Ok(PowerProfile::from_parts(freqs, spans, ProfileSource::RamanOde))
}

/// Closed-form solution of the triangular-gain Raman equations,
/// ρ(ζ, f) = e^{−αζ}·P̂·e^{−P̂ C_r L_eff(ζ) f} / ∫G(ν)e^{−P̂ C_r L_eff(ζ) ν}dν,
/// sampled on the same grid as [`solve_raman_ode`].
pub fn analytic_triangular_profile(
    link: &LinkConfig,
    plan: &ChannelPlan,
    opts: &ModelOptions,
) -> Result<PowerProfile> {
    opts.validate()?;
    check_plan_matches(link, plan)?;
    warn_wide_band(plan);
    let mut spans = Vec::with_capacity(link.span_count());
    for (k, span) in link.spans().iter().enumerate() {
        let span_plan = link.launch_plan(k, plan)?;
        let grid = span_grid(span.length(), opts.z_step);
        let offsets = launch_offsets(link, k);
        let samples: Vec<Vec<f64>> =
            grid.iter().map(|&z| triangular_rho(&span_plan, span.fiber(), z)).collect();
        let ln_rho = (0..plan.len())
            .map(|ch| samples.iter().map(|r| r[ch].ln() + offsets[ch]).collect())
            .collect();
        spans.push(SpanProfile {
            offset: link.offset(k),
            length: span.length(),
            alpha: span.fiber().alpha(),
            z: grid,
            ln_rho,
        });
    }
    Ok(PowerProfile::from_parts(plan.frequencies(), spans, ProfileSource::AnalyticTriangular))
}

/// Per-channel effective attenuation and effective length of one span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveAttenuation {
    frequencies: Vec<f64>,
    alpha_eff: Vec<f64>,
    l_eff: Vec<f64>,
    length: f64,
}

impl EffectiveAttenuation {
    /// Builds the fit from known effective lengths.
    pub fn from_effective_lengths(frequencies: Vec<f64>, l_eff: Vec<f64>, length: f64) -> Result<Self> {
        if frequencies.len() != l_eff.len() {
            return Err(Error::param("one effective length per channel is required"));
        }
        let alpha_eff = l_eff
            .iter()
            .enumerate()
            .map(|(ch, &l)| {
                effective_alpha(l, length).map_err(|_| Error::NoBracket { channel: ch, l_eff: l, length })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EffectiveAttenuation { frequencies, alpha_eff, l_eff, length })
    }

    /// α_eff,i (Np/m).
    pub fn alpha_eff(&self) -> &[f64] {
        &self.alpha_eff
    }

    /// L_eff,i (m).
    pub fn l_eff(&self) -> &[f64] {
        &self.l_eff
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// α_eff at an arbitrary frequency, linear between channel centres.
    pub fn alpha_at(&self, f: f64) -> f64 {
        freq_weight(&self.frequencies, f).apply(&self.alpha_eff)
    }
}

/// Solves (1 − e^{−aL})/a = `l_eff` for a > 0 by bracketed bisection.
pub fn effective_alpha(l_eff: f64, length: f64) -> Result<f64> {
    if !(l_eff > 0.0 && l_eff < length) {
        return Err(Error::NoBracket { channel: 0, l_eff, length });
    }
    let f = |a: f64| effective_length(a, length) - l_eff;
    // F(a) < 1/a, so the root lies below 1/l_eff.
    let (mut lo, mut hi) = (0.0f64, 1.0 / l_eff);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = if mid == 0.0 { length - l_eff } else { f(mid) };
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Per-channel L_eff = ∫₀ᴸ ρ dζ over span `span_index`, followed by the
/// effective-attenuation root. The profile is taken relative to its value
/// at the span input, and each grid interval is integrated with the
/// log-linear (exponential) interpolant of ρ.
pub fn fit_effective_attenuation(
    profile: &PowerProfile,
    span_index: usize,
) -> Result<EffectiveAttenuation> {
    let span = profile
        .spans
        .get(span_index)
        .ok_or_else(|| Error::param(format!("profile has no span {span_index}")))?;
    let mut l_eff = Vec::with_capacity(profile.channel_count());
    for ch in 0..profile.channel_count() {
        let lr = &span.ln_rho[ch];
        let mut acc = 0.0;
        for j in 0..span.z.len().saturating_sub(1) {
            let h = span.z[j + 1] - span.z[j];
            let a = lr[j] - lr[0];
            let d = lr[j + 1] - lr[j];
            acc += h * a.exp() * exprel(d);
        }
        l_eff.push(acc);
    }
    let freqs = profile.frequencies.clone();
    let alpha_eff = l_eff
        .iter()
        .enumerate()
        .map(|(ch, &l)| {
            effective_alpha(l, span.length)
                .map_err(|_| Error::NoBracket { channel: ch, l_eff: l, length: span.length })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EffectiveAttenuation { frequencies: freqs, alpha_eff, l_eff, length: span.length })
}

/// (e^x − 1)/x
pub(crate) fn exprel(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// Summed |gain/loss| in dB of the two outermost channels at the end of the
/// first span, relative to loss-only propagation e^{−αL}.
pub fn isrs_power_transfer_db(profile: &PowerProfile) -> Result<f64> {
    if profile.channel_count() < 2 {
        return Err(Error::SingleChannel);
    }
    let span = &profile.spans[0];
    let reference = -span.alpha * span.length;
    let last = profile.channel_count() - 1;
    let excess = |ch: usize| {
        let lr = &span.ln_rho[ch];
        let rel = lr[lr.len() - 1] - lr[0] - reference;
        linear_to_db(rel.exp()).abs()
    };
    Ok(excess(0) + excess(last))
}

/// Linear interpolation weights over sorted channel frequencies, with
/// linear extrapolation beyond the outermost centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FreqWeight {
    pub lo: usize,
    pub hi: usize,
    pub w: f64,
}

impl FreqWeight {
    pub fn apply(&self, v: &[f64]) -> f64 {
        (1.0 - self.w) * v[self.lo] + self.w * v[self.hi]
    }
}

pub(crate) fn freq_weight(freqs: &[f64], f: f64) -> FreqWeight {
    let n = freqs.len();
    if n == 1 {
        return FreqWeight { lo: 0, hi: 0, w: 0.0 };
    }
    let idx = freqs.partition_point(|&x| x <= f);
    let lo = idx.saturating_sub(1).min(n - 2);
    let hi = lo + 1;
    FreqWeight { lo, hi, w: (f - freqs[lo]) / (freqs[hi] - freqs[lo]) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::GainPolicy;
    use crate::units::{db_per_km_to_np_per_m, dbm_to_w};

    fn setup(n: usize, baud: f64, p_ch: f64, spans: usize, cr_scale: f64) -> (ChannelPlan, LinkConfig) {
        let plan = ChannelPlan::nyquist(n, baud, p_ch, 0.0).unwrap();
        let fiber = FiberParams::standard_smf();
        let fiber = fiber.clone().with_raman_slope(fiber.raman_slope() * cr_scale).unwrap();
        let link = LinkConfig::uniform(spans, 80e3, fiber, &plan, GainPolicy::IdealEqualization).unwrap();
        (plan, link)
    }

    #[test]
    fn no_raman_gives_pure_exponential() {
        let (plan, link) = setup(7, 100e9, dbm_to_w(5.0), 1, 0.0);
        let p = solve_raman_ode(&link, &plan, &ModelOptions::default()).unwrap();
        let alpha = db_per_km_to_np_per_m(0.2);
        let span = p.span(0);
        for ch in 0..7 {
            let end = span.rho_end(ch);
            // exp(−0.2·ln10/10000·80000) = exp(−3.684)
            assert!(((end - (-alpha * 80e3f64).exp()) / end).abs() < 1e-6);
            assert!((end - 0.025_12).abs() < 1e-5);
        }
    }

    #[test]
    fn single_channel_is_pure_loss() {
        let (plan, link) = setup(1, 100e9, 1.0, 1, 1.0);
        let p = solve_raman_ode(&link, &plan, &ModelOptions::default()).unwrap();
        let alpha = link.span(0).fiber().alpha();
        for (node, z) in p.span(0).z().iter().enumerate() {
            let expect = (-alpha * z).exp();
            assert!(((p.span(0).rho(node, 0) - expect) / expect).abs() < 1e-6);
        }
    }

    #[test]
    fn two_lossless_channels_conserve_power() {
        let plan = ChannelPlan::nyquist(2, 2e12, 0.2, 0.0).unwrap();
        let fiber = FiberParams::standard_smf().with_alpha(1e-15).unwrap();
        let link = LinkConfig::uniform(1, 80e3, fiber, &plan, GainPolicy::IdealEqualization).unwrap();
        let p = solve_raman_ode(&link, &plan, &ModelOptions::default()).unwrap();
        let span = p.span(0);
        for node in 0..span.node_count() {
            let total = 0.2 * (span.rho(node, 0) + span.rho(node, 1));
            assert!(((total - 0.4) / 0.4).abs() < 1e-8, "{total}");
        }
        assert!(span.rho_end(0) > 1.01);
        assert!(span.rho_end(1) < 0.99);
    }

    #[test]
    fn ode_matches_closed_form() {
        let (plan, link) = setup(10, 100e9, dbm_to_w(2.0), 1, 1.0);
        let opts = ModelOptions::default();
        let ode = solve_raman_ode(&link, &plan, &opts).unwrap();
        let ana = analytic_triangular_profile(&link, &plan, &opts).unwrap();
        for ch in 0..10 {
            for node in 0..ode.span(0).node_count() {
                let d = (ode.span(0).ln_rho(ch)[node] - ana.span(0).ln_rho(ch)[node]).abs();
                assert!(linear_to_db(d.exp()) < 0.1);
            }
        }
    }

    #[test]
    fn analytic_limits_reduce_to_loss() {
        for (p, cr) in [(dbm_to_w(10.0), 0.0), (0.0, 1.0)] {
            let (plan, link) = setup(5, 200e9, p, 1, cr);
            let ana = analytic_triangular_profile(&link, &plan, &ModelOptions::default()).unwrap();
            let span = ana.span(0);
            for (node, z) in span.z().iter().enumerate() {
                let expect = -span.alpha() * z;
                for ch in 0..5 {
                    assert!((span.ln_rho(ch)[node] - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn effective_length_of_standard_span() {
        let alpha = db_per_km_to_np_per_m(0.2);
        let l = effective_length(alpha, 80e3);
        // (1 − e^{−αL})/α evaluated directly
        assert!(((l - (1.0 - (-alpha * 80e3f64).exp()) / alpha) / l).abs() < 1e-14);
        assert!((l / 1e3 - 21.17).abs() < 0.005);
        let a = effective_alpha(l, 80e3).unwrap();
        assert!(((a - alpha) / alpha).abs() < 1e-12);
    }

    #[test]
    fn effective_fit_on_pure_exponential() {
        let (plan, link) = setup(5, 100e9, dbm_to_w(3.0), 1, 0.0);
        let prof = solve_raman_ode(&link, &plan, &ModelOptions::default()).unwrap();
        let eff = fit_effective_attenuation(&prof, 0).unwrap();
        let alpha = link.span(0).fiber().alpha();
        for (&a, &l) in eff.alpha_eff().iter().zip(eff.l_eff()) {
            assert!(((a - alpha) / alpha).abs() < 1e-6);
            let resid = (effective_length(a, 80e3) - l) / l;
            assert!(resid.abs() < 1e-10);
        }
    }

    #[test]
    fn strong_isrs_orders_effective_attenuation() {
        let (plan, link) = setup(11, 400e9, dbm_to_w(15.0), 1, 1.0);
        let prof = solve_raman_ode(&link, &plan, &ModelOptions::default()).unwrap();
        let eff = fit_effective_attenuation(&prof, 0).unwrap();
        let alpha = link.span(0).fiber().alpha();
        assert!(eff.alpha_eff()[0] < alpha);
        assert!(eff.alpha_eff()[10] > alpha);
    }

    #[test]
    fn amplifying_profile_has_no_bracket() {
        let plan = ChannelPlan::nyquist(1, 100e9, 1e-3, 0.0).unwrap();
        let link = LinkConfig::uniform(1, 80e3, FiberParams::standard_smf(), &plan, GainPolicy::IdealEqualization)
            .unwrap();
        let prof = PowerProfile::from_fn(&link, &plan, 1e3, |_, z, _| (1e-6 * z).exp()).unwrap();
        assert!(matches!(fit_effective_attenuation(&prof, 0), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn power_transfer_metric() {
        let (plan, link) = setup(15, 100e9, 1e-9, 1, 1.0);
        let opts = ModelOptions::default();
        let low = isrs_power_transfer_db(&solve_raman_ode(&link, &plan, &opts).unwrap()).unwrap();
        assert!(low < 1e-6);
        let (plan0, link0) = setup(15, 100e9, dbm_to_w(10.0), 1, 0.0);
        let none = isrs_power_transfer_db(&solve_raman_ode(&link0, &plan0, &opts).unwrap()).unwrap();
        assert!(none < 1e-6);
        let mut last = 0.0;
        for dbm in [0.0, 3.0, 6.0, 9.0, 12.0] {
            let (plan, link) = setup(15, 100e9, dbm_to_w(dbm), 1, 1.0);
            let t = isrs_power_transfer_db(&solve_raman_ode(&link, &plan, &opts).unwrap()).unwrap();
            assert!(t > last, "{dbm} dBm: {t} <= {last}");
            last = t;
        }
        let (plan1, link1) = setup(1, 100e9, 1.0, 1, 1.0);
        let single = solve_raman_ode(&link1, &plan1, &opts).unwrap();
        assert!(matches!(isrs_power_transfer_db(&single), Err(Error::SingleChannel)));
    }

    #[test]
    fn csv_layout() {
        let (plan, link) = setup(3, 100e9, 1e-3, 2, 1.0);
        let opts = ModelOptions { z_step: 40e3, ..Default::default() };
        let prof = solve_raman_ode(&link, &plan, &opts).unwrap();
        let mut buf = Vec::new();
        prof.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "z_m,-100000000000,0,100000000000");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0,1e0,1e0,1e0"));
    }

    #[test]
    fn identical_spans_share_a_template() {
        let (plan, link) = setup(3, 100e9, 1e-3, 3, 1.0);
        let prof = solve_raman_ode(&link, &plan, &ModelOptions::default()).unwrap();
        assert_eq!(prof.span_templates(), vec![0, 0, 0]);
    }

    #[test]
    fn freq_weights() {
        let f = [0.0, 1.0, 2.0];
        assert_eq!(freq_weight(&f, 0.5), FreqWeight { lo: 0, hi: 1, w: 0.5 });
        assert_eq!(freq_weight(&f, 2.0), FreqWeight { lo: 1, hi: 2, w: 1.0 });
        assert_eq!(freq_weight(&f, -0.5), FreqWeight { lo: 0, hi: 1, w: -0.5 });
        assert_eq!(freq_weight(&f, 2.5).apply(&[0.0, 1.0, 2.0]), 2.5);
    }
}
