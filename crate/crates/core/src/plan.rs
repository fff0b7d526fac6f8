//! WDM channel plans and their transmit power spectral density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One WDM channel. Frequencies are offsets from the reference carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    /// Centre frequency offset (Hz).
    pub frequency: f64,
    /// Occupied bandwidth (Hz).
    pub bandwidth: f64,
    /// Launch power (W).
    pub power: f64,
}

impl Channel {
    pub fn lower_edge(&self) -> f64 {
        self.frequency - 0.5 * self.bandwidth
    }

    pub fn upper_edge(&self) -> f64 {
        self.frequency + 0.5 * self.bandwidth
    }

    pub fn psd(&self) -> f64 {
        self.power / self.bandwidth
    }
}

/// A contiguous frequency interval with constant PSD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PsdSegment {
    pub lo: f64,
    pub hi: f64,
    pub psd: f64,
}

/// Sorted, non-overlapping set of channels with rectangular spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Channel>", into = "Vec<Channel>")]
pub struct ChannelPlan {
    channels: Vec<Channel>,
}

impl TryFrom<Vec<Channel>> for ChannelPlan {
    type Error = Error;

    fn try_from(channels: Vec<Channel>) -> Result<Self> {
        ChannelPlan::new(channels)
    }
}

impl From<ChannelPlan> for Vec<Channel> {
    fn from(plan: ChannelPlan) -> Self {
        plan.channels
    }
}

impl ChannelPlan {
    pub fn new(channels: Vec<Channel>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidPlan("plan has no channels".into()));
        }
        for (i, ch) in channels.iter().enumerate() {
            if !(ch.frequency.is_finite() && ch.bandwidth.is_finite() && ch.power.is_finite()) {
                return Err(Error::InvalidPlan(format!("channel {i} has non-finite fields")));
            }
            if ch.bandwidth <= 0.0 {
                return Err(Error::InvalidPlan(format!("channel {i} has non-positive bandwidth")));
            }
            if ch.power < 0.0 {
                return Err(Error::InvalidPlan(format!("channel {i} has negative power")));
            }
        }
        for (i, pair) in channels.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            if b.frequency <= a.frequency {
                return Err(Error::InvalidPlan(format!(
                    "channels {i} and {} are not sorted by frequency",
                    i + 1
                )));
            }
            // Nyquist neighbours touch; allow round-off at the shared edge.
            let slack = 1e-9 * a.bandwidth.min(b.bandwidth);
            if a.upper_edge() > b.lower_edge() + slack {
                return Err(Error::InvalidPlan(format!("channels {i} and {} overlap", i + 1)));
            }
        }
        Ok(ChannelPlan { channels })
    }

    /// `n_ch` channels spaced exactly by the symbol rate, centred on `center`.
    pub fn nyquist(n_ch: usize, baud: f64, power_per_ch: f64, center: f64) -> Result<Self> {
        if n_ch == 0 {
            return Err(Error::InvalidPlan("n_ch must be at least 1".into()));
        }
        if !(baud > 0.0) {
            return Err(Error::InvalidPlan("symbol rate must be positive".into()));
        }
        let mid = (n_ch as f64 - 1.0) / 2.0;
        let channels = (0..n_ch)
            .map(|k| Channel {
                frequency: center + (k as f64 - mid) * baud,
                bandwidth: baud,
                power: power_per_ch,
            })
            .collect();
        Self::new(channels)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, index: usize) -> Result<&Channel> {
        self.channels.get(index).ok_or(Error::ChannelOutOfRange {
            index,
            count: self.channels.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.frequency).collect()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.power).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.channels.iter().map(|c| c.power).sum()
    }

    pub fn lower_edge(&self) -> f64 {
        self.channels[0].lower_edge()
    }

    pub fn upper_edge(&self) -> f64 {
        self.channels[self.channels.len() - 1].upper_edge()
    }

    /// Occupied bandwidth from the lowest to the highest band edge (Hz).
    pub fn total_bandwidth(&self) -> f64 {
        self.upper_edge() - self.lower_edge()
    }

    /// Index of the channel with centre frequency closest to `f`.
    pub fn nearest_channel(&self, f: f64) -> usize {
        let mut best = 0;
        for (i, ch) in self.channels.iter().enumerate() {
            if (ch.frequency - f).abs() < (self.channels[best].frequency - f).abs() {
                best = i;
            }
        }
        best
    }

    /// Channel whose band `[lower, upper)` contains `f`.
    pub fn channel_at(&self, f: f64) -> Option<usize> {
        let idx = self.channels.partition_point(|c| c.upper_edge() <= f);
        self.channels
            .get(idx)
            .filter(|c| c.lower_edge() <= f)
            .map(|_| idx)
    }

    /// Transmit PSD (W/Hz), piecewise constant over the channel bands.
    pub fn psd(&self, f: f64) -> f64 {
        self.channel_at(f).map_or(0.0, |i| self.channels[i].psd())
    }

    /// Same plan with every channel set to `power`.
    pub fn with_uniform_power(&self, power: f64) -> Result<Self> {
        self.with_powers(&vec![power; self.channels.len()])
    }

    pub fn with_powers(&self, powers: &[f64]) -> Result<Self> {
        if powers.len() != self.channels.len() {
            return Err(Error::InvalidPlan(format!(
                "expected {} powers, got {}",
                self.channels.len(),
                powers.len()
            )));
        }
        let channels = self
            .channels
            .iter()
            .zip(powers)
            .map(|(c, &p)| Channel { power: p, ..*c })
            .collect();
        Self::new(channels)
    }

    /// Constant-PSD pieces of the spectrum; neighbours with equal PSD are
    /// merged and gaps between channels appear as zero-PSD segments.
    pub(crate) fn psd_segments(&self) -> Vec<PsdSegment> {
        let mut out: Vec<PsdSegment> = Vec::new();
        for ch in &self.channels {
            let (lo, hi, psd) = (ch.lower_edge(), ch.upper_edge(), ch.psd());
            if let Some(last) = out.last_mut() {
                let touching = (lo - last.hi).abs() <= 1e-9 * ch.bandwidth;
                if touching && last.psd == psd {
                    last.hi = hi;
                    continue;
                }
                if !touching {
                    let gap = PsdSegment { lo: last.hi, hi: lo, psd: 0.0 };
                    out.push(gap);
                }
            }
            out.push(PsdSegment { lo, hi, psd });
        }
        out
    }

    /// Frequencies where the transmit PSD changes value.
    pub(crate) fn psd_breakpoints(&self) -> Vec<f64> {
        let segs = self.psd_segments();
        let mut pts = Vec::with_capacity(segs.len() + 1);
        pts.push(segs[0].lo);
        for s in &segs {
            pts.push(s.hi);
        }
        pts
    }

    /// ∫ G_Tx(ν) e^{−aν} dν over the piecewise-constant spectrum, in closed form.
    pub fn exp_weighted_power(&self, a: f64) -> f64 {
        self.channels
            .iter()
            .map(|c| c.power * (-a * c.frequency).exp() * sinhc(0.5 * a * c.bandwidth))
            .sum()
    }

    /// ∫ G_Tx(f) df evaluated segment by segment.
    pub fn integrated_psd(&self) -> f64 {
        self.psd_segments().iter().map(|s| s.psd * (s.hi - s.lo)).sum()
    }
}

/// sinh(x)/x
pub(crate) fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_band_nyquist_plan() {
        let plan = ChannelPlan::nyquist(119, 85e9, 1e-3, 0.0).unwrap();
        assert!((plan.total_bandwidth() - 10.115e12).abs() < 1.0);
        assert_eq!(plan.len(), 119);
        assert!(plan.frequencies()[59].abs() < 1e-3);
    }

    #[test]
    fn single_channel_plan() {
        let plan = ChannelPlan::nyquist(1, 10e9, 1e-3, 3e9).unwrap();
        assert_eq!(plan.total_bandwidth(), 10e9);
        assert_eq!(plan.frequencies(), vec![3e9]);
    }

    #[test]
    fn three_channels_symmetric() {
        let plan = ChannelPlan::nyquist(3, 10e9, 1e-3, 0.0).unwrap();
        assert_eq!(plan.frequencies(), vec![-10e9, 0.0, 10e9]);
        assert_eq!(plan.total_bandwidth(), 30e9);
        assert!((plan.total_power() - 3e-3).abs() < 1e-18);
    }

    #[test]
    fn rejects_overlap_and_unsorted() {
        let a = Channel { frequency: 0.0, bandwidth: 10e9, power: 1e-3 };
        let b = Channel { frequency: 5e9, bandwidth: 10e9, power: 1e-3 };
        assert!(ChannelPlan::new(vec![a, b]).is_err());
        let c = Channel { frequency: -20e9, ..a };
        assert!(ChannelPlan::new(vec![a, c]).is_err());
        assert!(ChannelPlan::new(vec![]).is_err());
        assert!(ChannelPlan::nyquist(0, 1e9, 1e-3, 0.0).is_err());
        assert!(ChannelPlan::nyquist(3, 0.0, 1e-3, 0.0).is_err());
    }

    #[test]
    fn psd_lookup_and_segments() {
        let chans = vec![
            Channel { frequency: -100e9, bandwidth: 50e9, power: 1e-3 },
            Channel { frequency: -50e9, bandwidth: 50e9, power: 1e-3 },
            Channel { frequency: 100e9, bandwidth: 50e9, power: 2e-3 },
        ];
        let plan = ChannelPlan::new(chans).unwrap();
        assert_eq!(plan.psd(-100e9), 1e-3 / 50e9);
        assert_eq!(plan.psd(0.0), 0.0);
        assert_eq!(plan.psd(110e9), 2e-3 / 50e9);
        assert_eq!(plan.psd(200e9), 0.0);
        let segs = plan.psd_segments();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[1].psd, 0.0);
        assert_eq!(plan.channel_at(-75e9), Some(1));
    }

    #[test]
    fn exp_weighted_power_limits() {
        let plan = ChannelPlan::nyquist(5, 40e9, 2e-3, 0.0).unwrap();
        assert!((plan.exp_weighted_power(0.0) - plan.total_power()).abs() < 1e-18);
        // Brute-force midpoint rule over the band.
        let a = 3e-12;
        let n = 200_000;
        let (lo, hi) = (plan.lower_edge(), plan.upper_edge());
        let h = (hi - lo) / n as f64;
        let brute: f64 = (0..n)
            .map(|k| {
                let f = lo + (k as f64 + 0.5) * h;
                plan.psd(f) * (-a * f).exp() * h
            })
            .sum();
        assert!(((plan.exp_weighted_power(a) - brute) / brute).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn psd_integrates_to_total_power(
            n in 1usize..40,
            baud in 1e9f64..200e9,
            gap in 0.0f64..2.0,
            powers in proptest::collection::vec(1e-6f64..1e-1, 40),
        ) {
            let spacing = baud * (1.0 + gap);
            let channels = (0..n)
                .map(|k| Channel { frequency: k as f64 * spacing, bandwidth: baud, power: powers[k] })
                .collect();
            let plan = ChannelPlan::new(channels).unwrap();
            let total = plan.total_power();
            prop_assert!(((plan.integrated_psd() - total) / total).abs() < 1e-9);
        }
    }
}
