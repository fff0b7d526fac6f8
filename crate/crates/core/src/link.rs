//! Multi-span link description.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::FiberParams;
use crate::plan::ChannelPlan;
use crate::raman::triangular_rho;

/// How amplifiers at span ends set the launch spectrum of the next span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainPolicy {
    /// Every span is launched with the transmitter spectrum.
    IdealEqualization,
    /// Flat gain equal to the span loss; the ISRS tilt accumulates.
    FixedGain,
    /// Per-span launch spectra supplied by the caller.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Span {
    length: f64,
    fiber: FiberParams,
    launch_powers: Vec<f64>,
}

impl Span {
    /// Span length (m).
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn fiber(&self) -> &FiberParams {
        &self.fiber
    }

    /// Per-channel power launched into this span (W).
    pub fn launch_powers(&self) -> &[f64] {
        &self.launch_powers
    }

    /// Total power launched into this span (W).
    pub fn launch_total(&self) -> f64 {
        self.launch_powers.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    spans: Vec<Span>,
    offsets: Vec<f64>,
    policy: GainPolicy,
    tx_powers: Vec<f64>,
}

impl LinkConfig {
    /// `n_spans` identical spans.
    pub fn uniform(
        n_spans: usize,
        length: f64,
        fiber: FiberParams,
        plan: &ChannelPlan,
        policy: GainPolicy,
    ) -> Result<Self> {
        Self::new(vec![(length, fiber); n_spans], plan, policy)
    }

    /// Spans given as `(length, fiber)`; launch spectra follow from `policy`.
    pub fn new(
        sections: Vec<(f64, FiberParams)>,
        plan: &ChannelPlan,
        policy: GainPolicy,
    ) -> Result<Self> {
        if policy == GainPolicy::Custom {
            return Err(Error::param(
                "custom gain policy needs explicit launch spectra, use LinkConfig::custom",
            ));
        }
        check_sections(&sections)?;
        let tx = plan.powers();
        let mut spans = Vec::with_capacity(sections.len());
        let mut launch = tx.clone();
        for (length, fiber) in sections {
            spans.push(Span { length, fiber: fiber.clone(), launch_powers: launch.clone() });
            launch = match policy {
                GainPolicy::IdealEqualization => tx.clone(),
                _ => {
                    let span_plan = plan.with_powers(&launch)?;
                    let rho = triangular_rho(&span_plan, &fiber, length);
                    let gain = (fiber.alpha() * length).exp();
                    launch.iter().zip(&rho).map(|(p, r)| p * r * gain).collect()
                }
            };
        }
        Ok(Self::assemble(spans, policy, tx))
    }

    /// Spans with caller-supplied launch powers, one vector per span.
    pub fn custom(
        sections: Vec<(f64, FiberParams, Vec<f64>)>,
        plan: &ChannelPlan,
    ) -> Result<Self> {
        let plain: Vec<_> = sections.iter().map(|(l, f, _)| (*l, f.clone())).collect();
        check_sections(&plain)?;
        let mut spans = Vec::with_capacity(sections.len());
        for (k, (length, fiber, powers)) in sections.into_iter().enumerate() {
            if powers.len() != plan.len() {
                return Err(Error::param(format!(
                    "span {k} lists {} launch powers for {} channels",
                    powers.len(),
                    plan.len()
                )));
            }
            if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::param(format!("span {k} has an invalid launch power")));
            }
            spans.push(Span { length, fiber, launch_powers: powers });
        }
        Ok(Self::assemble(spans, GainPolicy::Custom, plan.powers()))
    }

    fn assemble(spans: Vec<Span>, policy: GainPolicy, tx_powers: Vec<f64>) -> Self {
        let mut offsets = Vec::with_capacity(spans.len());
        let mut acc = 0.0;
        for s in &spans {
            offsets.push(acc);
            acc += s.length;
        }
        LinkConfig { spans, offsets, policy, tx_powers }
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn span(&self, k: usize) -> &Span {
        &self.spans[k]
    }

    pub fn span_count(&self) -> usize {
        self.spans.len()
    }

    /// Accumulated distance at the start of span `k` (m).
    pub fn offset(&self, k: usize) -> f64 {
        self.offsets[k]
    }

    pub fn total_length(&self) -> f64 {
        self.offsets.last().copied().unwrap_or(0.0)
            + self.spans.last().map_or(0.0, |s| s.length)
    }

    pub fn policy(&self) -> GainPolicy {
        self.policy
    }

    pub fn tx_powers(&self) -> &[f64] {
        &self.tx_powers
    }

    /// The channel plan as launched into span `k`.
    pub fn launch_plan(&self, k: usize, plan: &ChannelPlan) -> Result<ChannelPlan> {
        plan.with_powers(&self.spans[k].launch_powers)
    }

    /// The fibre shared by all spans, or an error when they differ.
    pub fn homogeneous_fiber(&self) -> Result<&FiberParams> {
        let first = &self.spans[0].fiber;
        if self.spans.iter().all(|s| s.fiber.same_propagation(first)) {
            Ok(first)
        } else {
            Err(Error::MixedFiber)
        }
    }

    /// True when spans `a` and `b` propagate identically.
    pub(crate) fn spans_identical(&self, a: usize, b: usize) -> bool {
        let (x, y) = (&self.spans[a], &self.spans[b]);
        x.length == y.length && x.fiber == y.fiber && x.launch_powers == y.launch_powers
    }
}

fn check_sections(sections: &[(f64, FiberParams)]) -> Result<()> {
    if sections.is_empty() {
        return Err(Error::param("link needs at least one span"));
    }
    for (k, (length, _)) in sections.iter().enumerate() {
        if !(length.is_finite() && *length >= 0.0) {
            return Err(Error::param(format!("span {k} has invalid length {length}")));
        }
    }
    Ok(())
}
