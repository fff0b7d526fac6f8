//! Shared fixtures and an independent conventional GN reference.
#![allow(dead_code)]

use std::f64::consts::PI;

use isrs_nli::{ChannelPlan, FiberParams, GainPolicy, LinkConfig};

pub const LAMBDA: f64 = 1570e-9;

/// Standard fibre with C_r = 0.
pub fn fiber_no_raman() -> FiberParams {
    FiberParams::standard_smf().with_raman_slope(0.0).unwrap()
}

/// Standard fibre with β₃ = 0 and C_r = 0.
pub fn fiber_flat_dispersion() -> FiberParams {
    let d = FiberParams::standard_smf().dispersion();
    FiberParams::new(4.605_170_185_988_091e-5, 1.2e-3, d, -2.0 * d / LAMBDA, 0.0, LAMBDA).unwrap()
}

pub fn desk_plan(n: usize, baud: f64, dbm: f64) -> ChannelPlan {
    ChannelPlan::nyquist(n, baud, 1e-3 * 10f64.powf(dbm / 10.0), 0.0).unwrap()
}

pub fn link(n_spans: usize, fiber: FiberParams, plan: &ChannelPlan) -> LinkConfig {
    LinkConfig::uniform(n_spans, 80e3, fiber, plan, GainPolicy::IdealEqualization).unwrap()
}

pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

const GL_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// 8-point Gauss–Legendre over [a, b].
fn gl8(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W) {
        acc += w * (f(c - h * x) + f(c + h * x));
    }
    acc * h
}

/// Conventional single-span GN η for channel `ch` of a flat Nyquist plan
/// with β₃ = 0. The field amplitude decays as e^{−αζ}, so the z-integral is
/// (1 − 2e^{−αL}cos κL + e^{−2αL})/(α² + κ²). Its non-oscillating part is
/// integrated over Δ₂ analytically, the oscillating part by composite
/// Gauss–Legendre below a quarter period, and Δ₁ on a sinh-graded mesh.
pub fn gn_reference(plan: &ChannelPlan, fiber: &FiberParams, length: f64, ch: usize) -> f64 {
    let c0 = plan.channels()[0];
    for c in plan.channels() {
        assert_eq!(c.power, c0.power, "reference needs a flat spectrum");
        assert_eq!(c.bandwidth, c0.bandwidth);
    }
    let d = fiber.betas();
    assert!(d.beta3.abs() < 1e-45, "reference needs β₃ = 0");
    let g = c0.power / c0.bandwidth;
    let (lo, hi) = (plan.lower_edge(), plan.upper_edge());
    let fi = plan.channels()[ch].frequency;
    let pi_ch = plan.channels()[ch].power;
    let bi = plan.channels()[ch].bandwidth;
    let alpha = fiber.alpha();
    let el = (-alpha * length).exp();
    let c = 4.0 * PI * PI * d.beta2.abs();

    let inner = |d1: f64| -> f64 {
        let f1 = fi + d1;
        let a = (lo - fi).max(lo - f1);
        let b = (hi - fi).min(hi - f1);
        if b <= a {
            return 0.0;
        }
        let k1 = c * d1;
        // (1 + e^{−2αL}) ∫ dΔ₂ / (α² + (k₁Δ₂)²)
        let smooth = if k1 == 0.0 {
            (b - a) / (alpha * alpha)
        } else {
            ((k1 * b / alpha).atan() - (k1 * a / alpha).atan()) / (alpha * k1)
        };
        let mut acc = (1.0 + el * el) * smooth;
        if k1.abs() * length * (b - a) > 1e-9 {
            let period = 2.0 * PI / (k1.abs() * length);
            let width = alpha / k1.abs();
            let h = (0.25 * period).min(0.5 * width).min((b - a) / 16.0);
            let n = ((b - a) / h).ceil() as usize;
            let hh = (b - a) / n as f64;
            let mut f = |d2: f64| {
                let kappa = k1 * d2;
                -2.0 * el * (kappa * length).cos() / (alpha * alpha + kappa * kappa)
            };
            for j in 0..n {
                acc += gl8(&mut f, a + j as f64 * hh, a + (j + 1) as f64 * hh);
            }
        } else {
            acc += -2.0 * el * (b - a) / (alpha * alpha);
        }
        acc
    };

    // Δ₁ = s·sinh(t) on both sides of the stationary line.
    let s = 1e8;
    let mut total = 0.0;
    for (end, sign) in [(hi - fi, 1.0), (fi - lo, -1.0)] {
        if end <= 0.0 {
            continue;
        }
        let tmax = (end / s).asinh();
        let panels = (tmax / 0.05).ceil() as usize;
        let ht = tmax / panels as f64;
        let mut f = |t: f64| inner(sign * s * t.sinh()) * s * t.cosh();
        for j in 0..panels {
            total += gl8(&mut f, j as f64 * ht, (j + 1) as f64 * ht);
        }
    }
    let gamma = fiber.gamma();
    16.0 / 27.0 * gamma * gamma * bi / pi_ch.powi(3) * g * g * g * total
}
