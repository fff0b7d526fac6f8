//! Integral-form estimators: the ISRS GN model over an arbitrary profile,
//! its analytic-profile span sum, and the conventional GN integral with
//! (effective) exponential attenuation.
//!
//! All share one nested adaptive quadrature over (f₁, f₂) with
//! f₃ = f₁ + f₂ − f_i, restricted to the occupied band and to f₂ ≥ f₁, and
//! η = 16γ²B_i/(27P_i³) · ∫∫ F(f₁, f₂) df₁ df₂.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::link::LinkConfig;
use crate::options::ModelOptions;
use crate::plan::ChannelPlan;
use crate::quad::{integrate, integrate_with_aux, QuadResult};
use crate::raman::{effective_length, freq_weight, EffectiveAttenuation, FreqWeight, PowerProfile};

use super::kernel::{cexprel, filon_sampled, SpanLayout};
use super::{NliEntry, PhaseMismatch};

/// Integrand F(f₁, f₂) with per-f₁ precomputation.
trait GnIntegrand {
    type Outer;
    type Scratch: Default;

    fn outer(&self, f1: f64) -> Self::Outer;

    /// F at (f₁, f₂) where f₃ lies in the band and κ is the phase rate.
    fn eval(&self, o: &Self::Outer, s: &mut Self::Scratch, f2: f64, f3: f64, kappa: f64) -> f64;
}

struct Setup<'a> {
    plan: &'a ChannelPlan,
    channel: usize,
    fi: f64,
    bi: f64,
    pi: f64,
    gamma: f64,
    pm: PhaseMismatch,
    opts: &'a ModelOptions,
}

fn setup<'a>(
    plan: &'a ChannelPlan,
    link: &LinkConfig,
    channel: usize,
    opts: &'a ModelOptions,
) -> Result<Setup<'a>> {
    opts.validate()?;
    if link.tx_powers().len() != plan.len() {
        return Err(Error::param(format!(
            "link was built for {} channels but the plan has {}",
            link.tx_powers().len(),
            plan.len()
        )));
    }
    let ch = plan.channel(channel)?;
    if ch.power <= 0.0 {
        return Err(Error::ZeroPower(channel));
    }
    let fiber = link.homogeneous_fiber()?;
    Ok(Setup {
        plan,
        channel,
        fi: ch.frequency,
        bi: ch.bandwidth,
        pi: ch.power,
        gamma: fiber.gamma(),
        pm: PhaseMismatch::new(fiber.betas()),
        opts,
    })
}

const ROUGH_TOL: f64 = 1e-2;

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

impl Setup<'_> {
    fn run<I: GnIntegrand>(&self, ig: &I, layout: &SpanLayout) -> Result<NliEntry> {
        if self.gamma == 0.0 {
            return Ok(NliEntry::new(self.channel, self.fi, 0.0, self.pi, 0.0));
        }
        let (lo, hi) = (self.plan.lower_edge(), self.plan.upper_edge());
        let bps = self.plan.psd_breakpoints();
        let fi = self.fi;
        let opts = self.opts;
        let mut scratch = I::Scratch::default();
        let inner = |f1: f64, abs_tol: f64, rel_tol: f64, scratch: &mut I::Scratch| -> QuadResult {
            // F is symmetric in (f₁, f₂): integrate over f₂ ≥ f₁ only.
            let a = lo.max(lo + fi - f1).max(f1);
            let b = hi.min(hi + fi - f1);
            if b <= a {
                return QuadResult { value: 0.0, error: 0.0, evals: 0, converged: true };
            }
            let mut pts = vec![a, b];
            let in_range = |x: f64| x > a && x < b;
            for &p in &bps {
                for x in [p, p + fi - f1] {
                    if in_range(x) {
                        pts.push(x);
                    }
                }
            }
            if in_range(fi) {
                pts.push(fi);
            }
            if layout.kappa_switch.is_finite() {
                pts.extend(self.pm.crossings(f1, fi, layout.kappa_switch, a, b));
            }
            let pts = sorted_unique(pts);
            let o = ig.outer(f1);
            let pm = self.pm;
            integrate(
                |f2| {
                    let f3 = f1 + f2 - fi;
                    ig.eval(&o, scratch, f2, f3, pm.rate(f1, f2, fi))
                },
                &pts,
                abs_tol,
                rel_tol,
                opts.max_intervals,
            )
        };

        let mut outer_pts = bps.clone();
        outer_pts.extend(bps.iter().map(|p| 0.5 * (p + fi)));
        outer_pts.push(fi);
        let outer_pts = sorted_unique(outer_pts);

        // A coarse pass fixes the absolute accuracy each inner line needs.
        let rough = integrate(
            |f1| inner(f1, 0.0, ROUGH_TOL, &mut scratch).value,
            &outer_pts,
            0.0,
            ROUGH_TOL,
            opts.max_intervals,
        );
        let abs_tol = 0.25 * opts.rel_tol * rough.value.abs() / (hi - lo);
        let mut inner_ok = true;
        let (outer, inner_err) = integrate_with_aux(
            |f1| {
                let r = inner(f1, abs_tol, 0.25 * opts.rel_tol, &mut scratch);
                inner_ok &= r.converged;
                (r.value, r.error)
            },
            &outer_pts,
            0.0,
            0.5 * opts.rel_tol,
            opts.max_intervals,
        );
        let pref = 2.0 * 16.0 / 27.0 * self.gamma * self.gamma * self.bi / self.pi.powi(3);
        let eta = pref * outer.value;
        let err = pref * (outer.error + inner_err);
        log::debug!(
            "channel {}: eta {:.4e} err {:.2e} ({} outer evaluations)",
            self.channel,
            eta,
            err,
            outer.evals
        );
        if !(outer.converged && inner_ok) || err > opts.rel_tol * eta.abs() {
            return Err(Error::ToleranceNotMet {
                value: eta,
                achieved: err,
                requested: opts.rel_tol * eta.abs(),
            });
        }
        Ok(NliEntry::new(self.channel, self.fi, eta.max(0.0), self.pi, err))
    }
}

fn ln_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

// ---------------------------------------------------------------------------
// Arbitrary profile

struct GeneralIntegrand<'a> {
    plan: &'a ChannelPlan,
    freqs: &'a [f64],
    layout: &'a SpanLayout,
    /// (local z, ln ρ per channel) of every template span
    spans: Vec<(&'a [f64], Vec<&'a [f64]>)>,
    /// ln ρ(ζ, f_i) per template
    lr_i: Vec<Vec<f64>>,
}

struct GeneralOuter {
    psd1: f64,
    /// ½(ln ρ₁ − ln ρ_i) per template
    base: Vec<Vec<f64>>,
}

fn interp_nodes(cols: &[&[f64]], w: FreqWeight, out: &mut Vec<f64>) {
    out.clear();
    let (a, b) = (cols[w.lo], cols[w.hi]);
    out.extend(a.iter().zip(b).map(|(x, y)| (1.0 - w.w) * x + w.w * y));
}

impl<'a> GeneralIntegrand<'a> {
    fn new(profile: &'a PowerProfile, plan: &'a ChannelPlan, layout: &'a SpanLayout, fi: f64) -> Self {
        let freqs = profile.frequencies();
        let templates = profile.span_templates();
        let mut spans = Vec::new();
        for (k, &t) in templates.iter().enumerate() {
            if t == k {
                let sp = profile.span(k);
                let cols = (0..profile.channel_count()).map(|ch| sp.ln_rho(ch)).collect::<Vec<_>>();
                spans.push((sp.z(), cols));
            }
        }
        let wi = freq_weight(freqs, fi);
        let lr_i = spans
            .iter()
            .map(|(_, cols)| {
                let mut v = Vec::new();
                interp_nodes(cols, wi, &mut v);
                v
            })
            .collect();
        GeneralIntegrand { plan, freqs, layout, spans, lr_i }
    }
}

#[derive(Default)]
struct GeneralScratch {
    a: Vec<f64>,
    b: Vec<f64>,
    lg: Vec<f64>,
    ints: Vec<Complex64>,
    ends: Vec<(f64, f64)>,
}

impl GnIntegrand for GeneralIntegrand<'_> {
    type Outer = GeneralOuter;
    type Scratch = GeneralScratch;

    fn outer(&self, f1: f64) -> GeneralOuter {
        let w1 = freq_weight(self.freqs, f1);
        let mut tmp = Vec::new();
        let base = self
            .spans
            .iter()
            .zip(&self.lr_i)
            .map(|((_, cols), lri)| {
                interp_nodes(cols, w1, &mut tmp);
                tmp.iter().zip(lri).map(|(x, y)| 0.5 * (x - y)).collect()
            })
            .collect();
        GeneralOuter { psd1: self.plan.psd(f1), base }
    }

    fn eval(&self, o: &GeneralOuter, s: &mut GeneralScratch, f2: f64, f3: f64, kappa: f64) -> f64 {
        let stx = o.psd1 * self.plan.psd(f2) * self.plan.psd(f3);
        if stx == 0.0 {
            return 0.0;
        }
        let w2 = freq_weight(self.freqs, f2);
        let w3 = freq_weight(self.freqs, f3);
        let coherent = self.layout.coherent(kappa);
        s.ints.clear();
        s.ends.clear();
        for (t, (z, cols)) in self.spans.iter().enumerate() {
            let base = &o.base[t];
            if coherent {
                interp_nodes(cols, w2, &mut s.a);
                interp_nodes(cols, w3, &mut s.b);
                s.lg.clear();
                s.lg.extend((0..base.len()).map(|n| base[n] + 0.5 * (s.a[n] + s.b[n])));
                s.ints.push(filon_sampled(&s.lg, z, kappa));
            } else {
                let last = base.len() - 1;
                let at = |n: usize| {
                    let v = base[n] + 0.5 * (w2.apply_at(cols, n) + w3.apply_at(cols, n));
                    v.exp()
                };
                s.ends.push((at(0), at(last)));
            }
        }
        let k2 = if coherent { self.layout.coherent_sum(kappa, &s.ints) } else { self.layout.tail(kappa, &s.ends) };
        stx * k2
    }
}

impl FreqWeight {
    #[inline]
    fn apply_at(&self, cols: &[&[f64]], n: usize) -> f64 {
        (1.0 - self.w) * cols[self.lo][n] + self.w * cols[self.hi][n]
    }
}

/// η of `channel` from the ISRS GN integral over an arbitrary power
/// profile ρ(ζ, f) of the whole link.
///
/// The profile is interpolated log-linearly in ζ between its samples and
/// linearly in ln ρ across channel centres.
pub fn eta_isrs_gn_general(
    profile: &PowerProfile,
    plan: &ChannelPlan,
    link: &LinkConfig,
    channel: usize,
    opts: &ModelOptions,
) -> Result<NliEntry> {
    let s = setup(plan, link, channel, opts)?;
    if profile.channel_count() != plan.len() {
        return Err(Error::param("profile and plan have different channel counts"));
    }
    if profile.span_count() != link.span_count()
        || profile
            .spans()
            .iter()
            .zip(link.spans())
            .any(|(p, l)| (p.length() - l.length()).abs() > 1e-9 * l.length().max(1.0))
    {
        return Err(Error::param("profile does not cover the spans of the link"));
    }
    let layout = SpanLayout::new(
        profile.spans().iter().map(|p| p.offset()).collect(),
        profile.spans().iter().map(|p| p.length()).collect(),
        &profile.span_templates(),
        opts.coherence_periods,
    );
    let ig = GeneralIntegrand::new(profile, plan, &layout, s.fi);
    s.run(&ig, &layout)
}

// ---------------------------------------------------------------------------
// Analytic triangular-gain profile, span by span

const PANELS: usize = 8;
const DEPTH: u32 = 7;

struct AnalyticSpan {
    launch: ChannelPlan,
    length: f64,
    /// ln P̂ − αζ − ln N(ζ) on the dyadic grid
    ln_base: Vec<f64>,
    /// P̂·C_r·L_eff(ζ)
    slope: Vec<f64>,
    ln_gi: f64,
}

struct AnalyticIntegrand<'a> {
    layout: &'a SpanLayout,
    spans: Vec<AnalyticSpan>,
    g1_fi: f64,
    tol: f64,
}

impl AnalyticSpan {
    #[inline]
    fn lg(&self, ln_s: f64, f3: f64, j: usize) -> f64 {
        ln_s + self.ln_base[j] - self.slope[j] * f3
    }

    fn integral(&self, ln_s: f64, f3: f64, kappa: f64, tol: f64) -> Complex64 {
        if self.length == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let h0 = self.length / (PANELS << DEPTH) as f64;
        let mut w = [Complex64::new(1.0, 0.0); DEPTH as usize + 1];
        for (l, wl) in w.iter_mut().enumerate() {
            *wl = Complex64::from_polar(1.0, kappa * h0 * (1u64 << l) as f64);
        }
        let ctx = Filon { span: self, ln_s, f3, kappa, tol, h0, w };
        let step = 1 << DEPTH;
        let mut c = Complex64::new(self.lg(ln_s, f3, 0).exp(), 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..PANELS {
            let (i0, i1) = (p * step, (p + 1) * step);
            let (coarse, _) = ctx.segment(i0, i1, DEPTH, c);
            let (v, c_end) = ctx.adapt(i0, i1, DEPTH, c, coarse);
            acc += v;
            c = c_end;
        }
        acc
    }
}

/// Adaptive exponential-Filon pass over the dyadic table of one span.
struct Filon<'a> {
    span: &'a AnalyticSpan,
    ln_s: f64,
    f3: f64,
    kappa: f64,
    tol: f64,
    h0: f64,
    /// e^{jκh} for segments of 2^level table steps
    w: [Complex64; DEPTH as usize + 1],
}

impl Filon<'_> {
    /// Integral over table nodes `i0..i1` (2^level steps) given the complex
    /// amplitude `c0` = g·e^{jκζ} at `i0`; also returns it at `i1`.
    #[inline]
    fn segment(&self, i0: usize, i1: usize, level: u32, c0: Complex64) -> (Complex64, Complex64) {
        let h = self.h0 * (i1 - i0) as f64;
        let d = self.span.lg(self.ln_s, self.f3, i1) - self.span.lg(self.ln_s, self.f3, i0);
        let ex = self.w[level as usize] * d.exp();
        let x = Complex64::new(d, self.kappa * h);
        (c0 * h * cexprel(x, ex), c0 * ex)
    }

    fn adapt(&self, i0: usize, i1: usize, level: u32, c0: Complex64, coarse: Complex64) -> (Complex64, Complex64) {
        let m = (i0 + i1) / 2;
        let (left, cm) = self.segment(i0, m, level - 1, c0);
        let (right, c1) = self.segment(m, i1, level - 1, cm);
        let fine = left + right;
        if level == 1 {
            return (fine, c1);
        }
        let h = self.h0 * (i1 - i0) as f64;
        let d = self.span.lg(self.ln_s, self.f3, i1) - self.span.lg(self.ln_s, self.f3, i0);
        let mag = c0.norm() * h * crate::raman::exprel(d);
        if (fine - coarse).norm() <= self.tol * mag {
            return (fine, c1);
        }
        let (a, cm) = self.adapt(i0, m, level - 1, c0, left);
        let (b, c1) = self.adapt(m, i1, level - 1, cm, right);
        (a + b, c1)
    }
}

#[derive(Default)]
struct AnalyticScratch {
    ints: Vec<Complex64>,
    ends: Vec<(f64, f64)>,
}

impl GnIntegrand for AnalyticIntegrand<'_> {
    /// ½·ln G_k(f₁) − ½·ln G_k(f_i) per template
    type Outer = Vec<f64>;
    type Scratch = AnalyticScratch;

    fn outer(&self, f1: f64) -> Vec<f64> {
        self.spans.iter().map(|s| 0.5 * (ln_or_neg_inf(s.launch.psd(f1)) - s.ln_gi)).collect()
    }

    fn eval(&self, o: &Vec<f64>, s: &mut AnalyticScratch, f2: f64, f3: f64, kappa: f64) -> f64 {
        let coherent = self.layout.coherent(kappa);
        s.ints.clear();
        s.ends.clear();
        for (t, sp) in self.spans.iter().enumerate() {
            let ln_s = o[t] + 0.5 * (ln_or_neg_inf(sp.launch.psd(f2)) + ln_or_neg_inf(sp.launch.psd(f3)));
            if ln_s == f64::NEG_INFINITY || sp.ln_gi == f64::NEG_INFINITY {
                s.ints.push(Complex64::new(0.0, 0.0));
                s.ends.push((0.0, 0.0));
                continue;
            }
            if coherent {
                s.ints.push(sp.integral(ln_s, f3, kappa, self.tol));
            } else {
                let last = sp.ln_base.len() - 1;
                let g0 = if sp.length == 0.0 { 0.0 } else { sp.lg(ln_s, f3, 0).exp() };
                let gl = if sp.length == 0.0 { 0.0 } else { sp.lg(ln_s, f3, last).exp() };
                s.ends.push((g0, gl));
            }
        }
        let k2 = if coherent { self.layout.coherent_sum(kappa, &s.ints) } else { self.layout.tail(kappa, &s.ends) };
        self.g1_fi * k2
    }
}

fn link_layout(link: &LinkConfig, periods: f64) -> SpanLayout {
    let n = link.span_count();
    let first: Vec<usize> =
        (0..n).map(|k| (0..k).find(|&j| link.spans_identical(j, k)).unwrap_or(k)).collect();
    SpanLayout::new(
        (0..n).map(|k| link.offset(k)).collect(),
        link.spans().iter().map(|s| s.length()).collect(),
        &first,
        periods,
    )
}

fn template_spans(layout: &SpanLayout) -> Vec<usize> {
    let mut reps = vec![usize::MAX; layout.n_templates];
    for (k, &t) in layout.template.iter().enumerate() {
        if reps[t] == usize::MAX {
            reps[t] = k;
        }
    }
    reps
}

/// η of `channel` from the span-by-span ISRS GN integral with the
/// closed-form triangular-gain profile; each span may carry its own launch
/// spectrum.
pub fn eta_isrs_gn_analytic(
    link: &LinkConfig,
    plan: &ChannelPlan,
    channel: usize,
    opts: &ModelOptions,
) -> Result<NliEntry> {
    let s = setup(plan, link, channel, opts)?;
    if plan.total_bandwidth() > crate::units::TRIANGULAR_GAIN_LIMIT {
        log::warn!("occupied bandwidth exceeds the 15 THz range of the triangular Raman gain");
    }
    let layout = link_layout(link, opts.coherence_periods);
    let nodes = PANELS << DEPTH;
    let mut spans = Vec::new();
    for k in template_spans(&layout) {
        let span = link.span(k);
        let launch = link.launch_plan(k, plan)?;
        let fiber = span.fiber();
        let p_hat = launch.total_power();
        let (mut ln_base, mut slope) = (Vec::with_capacity(nodes + 1), Vec::with_capacity(nodes + 1));
        for j in 0..=nodes {
            let z = span.length() * j as f64 / nodes as f64;
            let a = p_hat * fiber.raman_slope() * effective_length(fiber.alpha(), z);
            ln_base.push(p_hat.ln() - fiber.alpha() * z - launch.exp_weighted_power(a).ln());
            slope.push(a);
        }
        let ln_gi = ln_or_neg_inf(launch.psd(s.fi));
        spans.push(AnalyticSpan {
            launch,
            length: span.length(),
            ln_base,
            slope,
            ln_gi,
        });
    }
    let g1_fi = link.launch_plan(0, plan)?.psd(s.fi);
    let ig = AnalyticIntegrand { layout: &layout, spans, g1_fi, tol: 0.05 * opts.rel_tol };
    s.run(&ig, &layout)
}

// ---------------------------------------------------------------------------
// Exponential attenuation

enum Attenuation<'a> {
    /// α per template span, flat in frequency
    Fiber(Vec<f64>),
    /// α_eff(f) shared by all spans
    Effective(&'a EffectiveAttenuation),
}

struct ExpIntegrand<'a> {
    layout: &'a SpanLayout,
    launches: Vec<ChannelPlan>,
    ln_gi: Vec<f64>,
    alpha_i: f64,
    att: Attenuation<'a>,
    g1_fi: f64,
}

struct ExpOuter {
    alpha1: f64,
    half_ln_g1: Vec<f64>,
}

#[derive(Default)]
struct ExpScratch {
    ints: Vec<Complex64>,
    ends: Vec<(f64, f64)>,
}

impl ExpIntegrand<'_> {
    fn alpha_at(&self, t: usize, f: f64) -> f64 {
        match &self.att {
            Attenuation::Fiber(a) => a[t],
            Attenuation::Effective(e) => e.alpha_at(f),
        }
    }
}

impl GnIntegrand for ExpIntegrand<'_> {
    type Outer = ExpOuter;
    type Scratch = ExpScratch;

    fn outer(&self, f1: f64) -> ExpOuter {
        ExpOuter {
            alpha1: self.alpha_at(0, f1),
            half_ln_g1: self.launches.iter().map(|p| 0.5 * ln_or_neg_inf(p.psd(f1))).collect(),
        }
    }

    fn eval(&self, o: &ExpOuter, s: &mut ExpScratch, f2: f64, f3: f64, kappa: f64) -> f64 {
        let coherent = self.layout.coherent(kappa);
        s.ints.clear();
        s.ends.clear();
        let rate = match &self.att {
            Attenuation::Effective(e) => Some(0.5 * (o.alpha1 + e.alpha_at(f2) + e.alpha_at(f3) - self.alpha_i)),
            Attenuation::Fiber(_) => None,
        };
        for (t, launch) in self.launches.iter().enumerate() {
            let ln_s = o.half_ln_g1[t] + 0.5 * (ln_or_neg_inf(launch.psd(f2)) + ln_or_neg_inf(launch.psd(f3)) - self.ln_gi[t]);
            let l = self.layout.lengths[template_span(self.layout, t)];
            if ln_s == f64::NEG_INFINITY || self.ln_gi[t] == f64::NEG_INFINITY || l == 0.0 {
                s.ints.push(Complex64::new(0.0, 0.0));
                s.ends.push((0.0, 0.0));
                continue;
            }
            let a = rate.unwrap_or_else(|| self.alpha_at(t, 0.0));
            let amp = ln_s.exp();
            if coherent {
                let x = Complex64::new(-a, kappa) * l;
                s.ints.push(amp * l * cexprel(x, x.exp()));
            } else {
                s.ends.push((amp, amp * (-a * l).exp()));
            }
        }
        let k2 = if coherent { self.layout.coherent_sum(kappa, &s.ints) } else { self.layout.tail(kappa, &s.ends) };
        self.g1_fi * k2
    }
}

fn template_span(layout: &SpanLayout, t: usize) -> usize {
    layout.template.iter().position(|&x| x == t).unwrap_or(0)
}

fn run_exponential<'e>(
    plan: &ChannelPlan,
    link: &LinkConfig,
    channel: usize,
    opts: &ModelOptions,
    att: impl FnOnce(&[usize]) -> Attenuation<'e>,
) -> Result<NliEntry> {
    let s = setup(plan, link, channel, opts)?;
    let layout = link_layout(link, opts.coherence_periods);
    let reps = template_spans(&layout);
    let launches = reps.iter().map(|&k| link.launch_plan(k, plan)).collect::<Result<Vec<_>>>()?;
    let ln_gi = launches.iter().map(|p| ln_or_neg_inf(p.psd(s.fi))).collect();
    let att = att(&reps);
    let alpha_i = match &att {
        Attenuation::Effective(e) => e.alpha_at(s.fi),
        Attenuation::Fiber(a) => a[0],
    };
    let g1_fi = link.launch_plan(0, plan)?.psd(s.fi);
    let ig = ExpIntegrand { layout: &layout, launches, ln_gi, alpha_i, att, g1_fi };
    s.run(&ig, &layout)
}

/// η of `channel` from the conventional GN integral with the fibre
/// attenuation of each span.
pub fn eta_conventional_gn(
    plan: &ChannelPlan,
    link: &LinkConfig,
    channel: usize,
    opts: &ModelOptions,
) -> Result<NliEntry> {
    run_exponential(plan, link, channel, opts, |reps| {
        Attenuation::Fiber(reps.iter().map(|&k| link.span(k).fiber().alpha()).collect())
    })
}

/// η of `channel` from the conventional GN integral with the exponential
/// profile e^{−α_eff(f)ζ} in every span; α_eff is interpolated linearly
/// between channel centres.
pub fn eta_effective_attenuation_integral(
    plan: &ChannelPlan,
    link: &LinkConfig,
    eff: &EffectiveAttenuation,
    channel: usize,
    opts: &ModelOptions,
) -> Result<NliEntry> {
    if eff.frequencies().len() != plan.len() {
        return Err(Error::param("effective attenuation was fitted on a different plan"));
    }
    run_exponential(plan, link, channel, opts, |_| Attenuation::Effective(eff))
}
