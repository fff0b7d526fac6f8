//! Split-step Fourier reference simulator.
//!
//! Dual-polarisation Manakov propagation of Gaussian-symbol Nyquist WDM
//! with periodic (cyclic) sequences. Loss and ISRS act as a per-channel
//! amplitude mask taken from the Raman ODE profile, every span ends in
//! ideal per-channel gain, and the receiver compensates all dispersion.
//! The residual after a least-squares complex scaling is counted as NLI.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::DispersionCoeffs;
use crate::link::LinkConfig;
use crate::nli::{ModelId, NliEntry, NliResult};
use crate::options::ModelOptions;
use crate::plan::ChannelPlan;
use crate::raman::{solve_raman_ode, PowerProfile, ProfileSource, SpanProfile};
use crate::units::linear_to_db;

/// Upper bound on samples per polarisation.
const MAX_SAMPLES: usize = 1 << 25;

/// Manakov factor on γ for polarisation-averaged propagation.
const MANAKOV: f64 = 8.0 / 9.0;

/// Numerical settings of the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsfmParams {
    /// Symbols per channel and polarisation (power of two).
    pub symbols: usize,
    /// Samples per symbol (power of two).
    pub oversampling: usize,
    pub realizations: usize,
    pub seed: u64,
    /// Longest allowed step (m).
    pub max_step: f64,
    /// Target nonlinear phase γ·P_tot·h per step (rad).
    pub phase_per_step: f64,
    /// Steps whose nonlinear phase exceeds this abort the run (rad).
    pub max_phase: f64,
    /// Minimum ratio of sample rate to occupied bandwidth.
    pub guard: f64,
}

impl Default for SsfmParams {
    fn default() -> Self {
        SsfmParams {
            symbols: 4096,
            oversampling: 16,
            realizations: 2,
            seed: 1,
            max_step: 1e3,
            phase_per_step: 3e-3,
            max_phase: 5e-2,
            guard: 2.0,
        }
    }
}

/// A simulation: channel plan, link and numerical settings.
#[derive(Debug, Clone)]
pub struct SsfmConfig {
    pub plan: ChannelPlan,
    pub link: LinkConfig,
    pub params: SsfmParams,
    /// Options of the Raman profile that drives the loss masks.
    pub opts: ModelOptions,
}

/// Per-channel measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsfmResult {
    /// Mean η over realizations; `error` holds its standard error.
    pub entries: Vec<NliEntry>,
    /// η per realization (outer) and channel (inner).
    pub per_realization: Vec<Vec<f64>>,
    /// P_i / P_NLI per channel (dB).
    pub snr_db: Vec<f64>,
    pub step: f64,
    pub steps: usize,
}

impl SsfmResult {
    pub fn to_nli_result(&self) -> NliResult {
        NliResult { model: ModelId::Ssfm, entries: self.entries.clone() }
    }
}

/// Sampled dual-polarisation field.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub sample_rate: f64,
    pub pols: Vec<Vec<Complex64>>,
}

const FIELD_MAGIC: &[u8; 8] = b"NLIFLD01";

impl Field {
    /// Binary layout, little endian: magic `NLIFLD01`, sample rate (f64),
    /// samples per polarisation (u64), polarisations (u32), then per
    /// polarisation the samples as interleaved (re, im) f32 pairs.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.pols.first().map_or(0, Vec::len);
        w.write_all(FIELD_MAGIC)?;
        w.write_all(&self.sample_rate.to_le_bytes())?;
        w.write_all(&(n as u64).to_le_bytes())?;
        w.write_all(&(self.pols.len() as u32).to_le_bytes())?;
        for pol in &self.pols {
            for c in pol {
                w.write_all(&(c.re as f32).to_le_bytes())?;
                w.write_all(&(c.im as f32).to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != FIELD_MAGIC {
            return Err(Error::Simulation("not a field dump".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let sample_rate = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let n_pol = u32::from_le_bytes(b4) as usize;
        if n > MAX_SAMPLES || n_pol > 2 {
            return Err(Error::Simulation("field dump header out of range".into()));
        }
        let mut pols = Vec::with_capacity(n_pol);
        for _ in 0..n_pol {
            let mut pol = Vec::with_capacity(n);
            for _ in 0..n {
                r.read_exact(&mut b4)?;
                let re = f32::from_le_bytes(b4);
                r.read_exact(&mut b4)?;
                let im = f32::from_le_bytes(b4);
                pol.push(Complex64::new(re as f64, im as f64));
            }
            pols.push(pol);
        }
        Ok(Field { sample_rate, pols })
    }
}

/// Frequency grid and per-step operators shared by all realizations.
struct Sim {
    n_sym: usize,
    n_samp: usize,
    sample_rate: f64,
    /// First FFT bin of every channel (bins wrap modulo `n_samp`).
    centre_bins: Vec<i64>,
    /// Channel slot owning each bin, `usize::MAX` outside all slots.
    bin_channel: Vec<usize>,
    powers: Vec<f64>,
    gamma: f64,
    betas: DispersionCoeffs,
    /// ω of each bin (rad/s)
    omega: Vec<f64>,
    spans: Vec<SpanPlan>,
    profile: PowerProfile,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    fft_n: Arc<dyn Fft<f64>>,
    ifft_n: Arc<dyn Fft<f64>>,
    step: f64,
}

struct SpanPlan {
    length: f64,
    steps: usize,
    alpha: f64,
    /// Per-channel amplitude gain at the span end.
    gain: Vec<f64>,
}

fn check_pow2(what: &'static str, value: usize) -> Result<()> {
    if value == 0 || !value.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { what, value });
    }
    Ok(())
}

impl Sim {
    fn new(cfg: &SsfmConfig) -> Result<Self> {
        let p = &cfg.params;
        check_pow2("symbols", p.symbols)?;
        check_pow2("oversampling", p.oversampling)?;
        if p.realizations == 0 {
            return Err(Error::param("at least one realization is required"));
        }
        if !(p.max_step > 0.0 && p.phase_per_step > 0.0 && p.max_phase > 0.0 && p.guard >= 1.0) {
            return Err(Error::param("step policy and guard must be positive (guard ≥ 1)"));
        }
        let plan = &cfg.plan;
        let link = &cfg.link;
        if link.tx_powers().len() != plan.len() {
            return Err(Error::param("link and plan have different channel counts"));
        }
        let fiber = link.homogeneous_fiber()?;
        let baud = plan.channels()[0].bandwidth;
        for (i, c) in plan.channels().iter().enumerate() {
            if ((c.bandwidth - baud) / baud).abs() > 1e-9 {
                return Err(Error::Simulation("all channels need the same symbol rate".into()));
            }
            if c.power <= 0.0 {
                return Err(Error::ZeroPower(i));
            }
        }
        let n_sym = p.symbols;
        let n_samp = n_sym
            .checked_mul(p.oversampling)
            .filter(|&n| n <= MAX_SAMPLES)
            .ok_or_else(|| Error::Simulation(format!("more than {MAX_SAMPLES} samples per polarisation")))?;
        let sample_rate = baud * p.oversampling as f64;
        if sample_rate < p.guard * plan.total_bandwidth() {
            return Err(Error::Simulation(format!(
                "sample rate {:.3e} Hz is below {} × the occupied bandwidth",
                sample_rate, p.guard
            )));
        }
        if plan.lower_edge() < -0.5 * sample_rate || plan.upper_edge() > 0.5 * sample_rate {
            return Err(Error::Simulation("channels exceed the simulation bandwidth".into()));
        }
        let df = baud / n_sym as f64;
        let mut centre_bins = Vec::with_capacity(plan.len());
        for c in plan.channels() {
            let x = c.frequency / df;
            if (x - x.round()).abs() > 1e-6 {
                return Err(Error::Simulation(format!(
                    "channel at {:.6e} Hz is not on the {df:.6e} Hz bin grid",
                    c.frequency
                )));
            }
            centre_bins.push(x.round() as i64);
        }
        let bin_channel = channel_slots(&centre_bins, n_sym, n_samp);
        let omega = (0..n_samp)
            .map(|b| {
                let k = if b < n_samp / 2 { b as f64 } else { b as f64 - n_samp as f64 };
                2.0 * PI * k * df
            })
            .collect();

        let p_tot = link.span(0).launch_total().max(plan.total_power());
        let gamma = fiber.gamma();
        let h_target = p.max_step.min(if gamma * p_tot > 0.0 {
            p.phase_per_step / (gamma * p_tot)
        } else {
            f64::INFINITY
        });
        let mut spans = Vec::with_capacity(link.span_count());
        let mut step: f64 = 0.0;
        let profile = solve_raman_ode(link, plan, &cfg.opts)?;
        for (k, span) in link.spans().iter().enumerate() {
            let steps = if span.length() == 0.0 { 0 } else { (span.length() / h_target).ceil().max(1.0) as usize };
            if steps > 0 {
                step = step.max(span.length() / steps as f64);
            }
            let sp = profile.span(k);
            let next = if k + 1 < link.span_count() { link.span(k + 1).launch_powers() } else { link.tx_powers() };
            let here = span.launch_powers();
            let gain = (0..plan.len())
                .map(|ch| {
                    let end = sp.ln_rho(ch).last().unwrap() - sp.ln_rho(ch)[0];
                    (0.5 * ((next[ch] / here[ch]).ln() - end)).exp()
                })
                .collect();
            spans.push(SpanPlan { length: span.length(), steps, alpha: span.fiber().alpha(), gain });
        }
        let phase = gamma * p_tot * step;
        if phase > p.max_phase {
            return Err(Error::StepTooCoarse { phase, limit: p.max_phase });
        }
        let mut planner = FftPlanner::new();
        Ok(Sim {
            n_sym,
            n_samp,
            sample_rate,
            centre_bins,
            bin_channel,
            powers: plan.powers(),
            gamma,
            betas: fiber.betas(),
            omega,
            spans,
            profile,
            fft: planner.plan_fft_forward(n_samp),
            ifft: planner.plan_fft_inverse(n_samp),
            fft_n: planner.plan_fft_forward(n_sym),
            ifft_n: planner.plan_fft_inverse(n_sym),
            step,
        })
    }

    fn total_steps(&self) -> usize {
        self.spans.iter().map(|s| s.steps).sum()
    }

    /// Gaussian symbols of every channel and polarisation.
    fn symbols(&self, seed: u64, realization: usize) -> Vec<[Vec<Complex64>; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(realization as u64);
        self.powers
            .iter()
            .map(|&p| {
                let sigma = (0.25 * p).sqrt();
                let mut draw = || -> Vec<Complex64> {
                    (0..self.n_sym)
                        .map(|_| {
                            let re: f64 = StandardNormal.sample(&mut rng);
                            let im: f64 = StandardNormal.sample(&mut rng);
                            Complex64::new(sigma * re, sigma * im)
                        })
                        .collect()
                };
                let x = draw();
                let y = draw();
                [x, y]
            })
            .collect()
    }

    /// Spectrum (unnormalised DFT) of the transmitted field.
    fn transmit(&self, syms: &[[Vec<Complex64>; 2]]) -> [Vec<Complex64>; 2] {
        let scale = (self.n_samp / self.n_sym) as f64;
        let mut out = [vec![Complex64::default(); self.n_samp], vec![Complex64::default(); self.n_samp]];
        for (ch, pols) in syms.iter().enumerate() {
            for (pol, s) in pols.iter().enumerate() {
                let mut spec = s.clone();
                self.fft_n.process(&mut spec);
                for k in symbol_bins(self.n_sym) {
                    out[pol][wrap(self.centre_bins[ch] + k, self.n_samp)] = spec[wrap(k, self.n_sym)] * scale;
                }
            }
        }
        out
    }

    /// Symbols of channel `ch` recovered from a spectrum.
    fn receive(&self, spec: &[Vec<Complex64>; 2], ch: usize) -> [Vec<Complex64>; 2] {
        let scale = 1.0 / self.n_samp as f64;
        let mut out: [Vec<Complex64>; 2] = [Vec::new(), Vec::new()];
        for (pol, s) in spec.iter().enumerate() {
            let mut v = vec![Complex64::default(); self.n_sym];
            for k in symbol_bins(self.n_sym) {
                v[wrap(k, self.n_sym)] = s[wrap(self.centre_bins[ch] + k, self.n_samp)];
            }
            self.ifft_n.process(&mut v);
            for x in v.iter_mut() {
                *x *= scale;
            }
            out[pol] = v;
        }
        out
    }

    /// Slot power of every channel from a spectrum (W).
    fn band_powers(&self, spec: &[Vec<Complex64>; 2]) -> Vec<f64> {
        let mut p = vec![0.0; self.powers.len()];
        let norm = 1.0 / (self.n_samp as f64 * self.n_samp as f64);
        for s in spec {
            for (b, x) in s.iter().enumerate() {
                let ch = self.bin_channel[b];
                if ch != usize::MAX {
                    p[ch] += x.norm_sqr() * norm;
                }
            }
        }
        p
    }

    fn dispersion(&self, b: usize, h: f64) -> Complex64 {
        let w = self.omega[b];
        let phase = -(0.5 * self.betas.beta2 * w * w + self.betas.beta3 / 6.0 * w * w * w) * h;
        Complex64::from_polar(1.0, phase)
    }

    /// Dispersion over `h` plus the loss/ISRS mask from `za` to `zb` within
    /// `span`.
    fn linear(&self, spec: &mut [Vec<Complex64>; 2], span: usize, za: f64, zb: f64) {
        let sp: &SpanProfile = self.profile.span(span);
        let amp: Vec<f64> = (0..self.powers.len())
            .map(|ch| (sp.rho_at(zb, ch) / sp.rho_at(za, ch)).sqrt())
            .collect();
        let out_of_band = (-0.5 * self.spans[span].alpha * (zb - za)).exp();
        let h = zb - za;
        for b in 0..self.n_samp {
            let ch = self.bin_channel[b];
            let a = if ch == usize::MAX { out_of_band } else { amp[ch] };
            let m = self.dispersion(b, h) * a;
            spec[0][b] *= m;
            spec[1][b] *= m;
        }
    }

    fn nonlinear(&self, spec: &mut [Vec<Complex64>; 2], h: f64, scratch: &mut [Complex64]) {
        let [x, y] = spec;
        self.ifft.process_with_scratch(x, scratch);
        self.ifft.process_with_scratch(y, scratch);
        let norm = 1.0 / self.n_samp as f64;
        let k = -MANAKOV * self.gamma * h;
        for (a, b) in x.iter_mut().zip(y.iter_mut()) {
            *a *= norm;
            *b *= norm;
            let rot = Complex64::from_polar(1.0, k * (a.norm_sqr() + b.norm_sqr()));
            *a *= rot;
            *b *= rot;
        }
        self.fft.process_with_scratch(x, scratch);
        self.fft.process_with_scratch(y, scratch);
    }

    /// Propagates a spectrum through the link and compensates dispersion;
    /// `record` receives band powers at every step boundary of every span.
    fn propagate(&self, spec: &mut [Vec<Complex64>; 2], mut record: Option<&mut Vec<Vec<Vec<f64>>>>) {
        let mut scratch = vec![Complex64::default(); self.fft.get_inplace_scratch_len()];
        let mut total = 0.0;
        for (k, span) in self.spans.iter().enumerate() {
            let mut trace = Vec::with_capacity(span.steps + 1);
            if record.is_some() {
                trace.push(self.band_powers(spec));
            }
            let h = if span.steps > 0 { span.length / span.steps as f64 } else { 0.0 };
            for j in 0..span.steps {
                let z0 = j as f64 * h;
                let z1 = if j + 1 == span.steps { span.length } else { (j + 1) as f64 * h };
                let zm = 0.5 * (z0 + z1);
                self.linear(spec, k, z0, zm);
                self.nonlinear(spec, z1 - z0, &mut scratch);
                self.linear(spec, k, zm, z1);
                if record.is_some() {
                    trace.push(self.band_powers(spec));
                }
            }
            total += span.length;
            let out_of_band = (0.5 * span.alpha * span.length).exp();
            for b in 0..self.n_samp {
                let ch = self.bin_channel[b];
                let g = if ch == usize::MAX { out_of_band } else { span.gain[ch] };
                spec[0][b] *= g;
                spec[1][b] *= g;
            }
            if let Some(r) = record.as_deref_mut() {
                r.push(trace);
            }
        }
        for b in 0..self.n_samp {
            let inv = self.dispersion(b, -total);
            spec[0][b] *= inv;
            spec[1][b] *= inv;
        }
    }

    /// η per channel for one realization.
    fn realization(&self, seed: u64, r: usize) -> Vec<f64> {
        let syms = self.symbols(seed, r);
        let mut spec = self.transmit(&syms);
        self.propagate(&mut spec, None);
        (0..self.powers.len())
            .map(|ch| {
                let rx = self.receive(&spec, ch);
                let mut p_nli = 0.0;
                for pol in 0..2 {
                    p_nli += residual_power(&rx[pol], &syms[ch][pol]);
                }
                p_nli / self.powers[ch].powi(3)
            })
            .collect()
    }

    fn field(&self, spec: &[Vec<Complex64>; 2]) -> Field {
        let norm = 1.0 / self.n_samp as f64;
        let pols = spec
            .iter()
            .map(|s| {
                let mut v = s.clone();
                self.ifft.process(&mut v);
                v.iter().map(|x| x * norm).collect()
            })
            .collect();
        Field { sample_rate: self.sample_rate, pols }
    }
}

/// Bin offsets of one channel relative to its centre: −N/2 .. N/2 − 1.
fn symbol_bins(n_sym: usize) -> impl Iterator<Item = i64> {
    let half = (n_sym / 2) as i64;
    -half..(n_sym as i64 - half)
}

/// Assigns each bin to the slot of its nearest channel. Slots end halfway
/// to the neighbouring centre, so spectral broadening stays with the
/// channel that produced it; the outer slots mirror their inner half.
fn channel_slots(centres: &[i64], n_sym: usize, n_samp: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..centres.len()).collect();
    order.sort_by_key(|&ch| centres[ch]);
    let half = (n_sym / 2) as i64;
    let upper = n_sym as i64 - half;
    let mut owner = vec![usize::MAX; n_samp];
    for (i, &ch) in order.iter().enumerate() {
        let c = centres[ch];
        let prev = i.checked_sub(1).map(|j| centres[order[j]]);
        let next = order.get(i + 1).map(|&j| centres[j]);
        let lo = match (prev, next) {
            (Some(p), _) => p + (c - p) / 2,
            (None, Some(n)) => c - ((n - c) / 2).max(half),
            (None, None) => c - half,
        };
        let hi = match (prev, next) {
            (_, Some(n)) => c + (n - c) / 2,
            (Some(p), None) => c + (c - p - (c - p) / 2).max(upper),
            (None, None) => c + upper,
        };
        for k in lo..hi {
            let b = wrap(k, n_samp);
            if owner[b] == usize::MAX {
                owner[b] = ch;
            }
        }
    }
    owner
}

fn wrap(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// mean |r − c·s|² with c = ⟨r, s⟩/⟨s, s⟩
fn residual_power(r: &[Complex64], s: &[Complex64]) -> f64 {
    let num: Complex64 = r.iter().zip(s).map(|(a, b)| a * b.conj()).sum();
    let den: f64 = s.iter().map(|b| b.norm_sqr()).sum();
    let c = num / den;
    r.iter().zip(s).map(|(a, b)| (a - c * b).norm_sqr()).sum::<f64>() / r.len() as f64
}

/// Runs all realizations and reports η per channel.
pub fn simulate(cfg: &SsfmConfig) -> Result<SsfmResult> {
    let sim = Sim::new(cfg)?;
    log::info!(
        "ssfm: {} samples/pol, {} steps of {:.1} m, {} realizations",
        sim.n_samp,
        sim.total_steps(),
        sim.step,
        cfg.params.realizations
    );
    let per_realization: Vec<Vec<f64>> = (0..cfg.params.realizations)
        .into_par_iter()
        .map(|r| sim.realization(cfg.params.seed, r))
        .collect();
    let n_r = per_realization.len() as f64;
    let mut entries = Vec::with_capacity(cfg.plan.len());
    let mut snr_db = Vec::with_capacity(cfg.plan.len());
    for (ch, c) in cfg.plan.channels().iter().enumerate() {
        let mean = per_realization.iter().map(|v| v[ch]).sum::<f64>() / n_r;
        let stderr = if per_realization.len() > 1 {
            let var = per_realization.iter().map(|v| (v[ch] - mean).powi(2)).sum::<f64>() / (n_r - 1.0);
            (var / n_r).sqrt()
        } else {
            0.0
        };
        let entry = NliEntry::new(ch, c.frequency, mean, c.power, stderr);
        snr_db.push(linear_to_db(c.power / entry.p_nli));
        entries.push(entry);
    }
    Ok(SsfmResult { entries, per_realization, snr_db, step: sim.step, steps: sim.total_steps() })
}

/// Per-channel slot power along the link, measured on the simulated
/// field of the first realization and normalised to the transmitted
/// channel power. Samples sit at the step boundaries of every span, before
/// the span-end gain.
pub fn measure_power_profile(cfg: &SsfmConfig) -> Result<PowerProfile> {
    let sim = Sim::new(cfg)?;
    let syms = sim.symbols(cfg.params.seed, 0);
    let mut spec = sim.transmit(&syms);
    let tx = sim.band_powers(&spec);
    let mut trace = Vec::new();
    sim.propagate(&mut spec, Some(&mut trace));
    let mut spans = Vec::with_capacity(sim.spans.len());
    for (k, (span, samples)) in sim.spans.iter().zip(trace).enumerate() {
        let h = if span.steps > 0 { span.length / span.steps as f64 } else { 0.0 };
        let z: Vec<f64> =
            (0..=span.steps).map(|j| if j == span.steps { span.length } else { j as f64 * h }).collect();
        let ln_rho = (0..tx.len())
            .map(|ch| samples.iter().map(|p| (p[ch] / tx[ch]).ln()).collect())
            .collect();
        spans.push(SpanProfile::new(cfg.link.offset(k), span.length, span.alpha, z, ln_rho));
    }
    Ok(PowerProfile::from_parts(cfg.plan.frequencies(), spans, ProfileSource::Measured))
}

/// Received field (after dispersion compensation) of one realization.
pub fn received_field(cfg: &SsfmConfig, realization: usize) -> Result<Field> {
    let sim = Sim::new(cfg)?;
    let syms = sim.symbols(cfg.params.seed, realization);
    let mut spec = sim.transmit(&syms);
    sim.propagate(&mut spec, None);
    Ok(sim.field(&spec))
}
