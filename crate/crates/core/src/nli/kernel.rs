//! Span-summed z-kernel K(κ) = Σ_k e^{jκL̃_k} ∫₀^{L_k} g_k(ζ) e^{jκζ} dζ.
//!
//! Each span amplitude g_k is taken as log-linear between samples, so the
//! oscillatory factor is integrated exactly on every segment. Far from the
//! stationary lines the span sum is replaced by its phase average, which
//! only depends on the amplitude jumps at the span boundaries.

use std::f64::consts::PI;

use num_complex::Complex64;

/// (e^x − 1)/x for complex x, given e^x.
#[inline]
pub(crate) fn cexprel(x: Complex64, ex: Complex64) -> Complex64 {
    if x.norm_sqr() < 2.5e-3 {
        let one = Complex64::new(1.0, 0.0);
        one + x / 2.0 * (one + x / 3.0 * (one + x / 4.0 * (one + x / 5.0 * (one + x / 6.0 * (one + x / 7.0)))))
    } else {
        (ex - 1.0) / x
    }
}

/// ∫ over a sampled span; `z` are local positions starting at 0.
pub(crate) fn filon_sampled(lg: &[f64], z: &[f64], kappa: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if lg.len() < 2 {
        return acc;
    }
    let mut c = Complex64::new(lg[0].exp(), 0.0);
    let mut h_prev = f64::NAN;
    let mut w = Complex64::new(1.0, 0.0);
    for a in 0..lg.len() - 1 {
        let h = z[a + 1] - z[a];
        if h != h_prev {
            w = Complex64::from_polar(1.0, kappa * h);
            h_prev = h;
        }
        let d = lg[a + 1] - lg[a];
        let ex = w * d.exp();
        acc += c * h * cexprel(Complex64::new(d, kappa * h), ex);
        c *= ex;
    }
    acc
}

/// Span geometry shared by all kernels.
#[derive(Debug, Clone)]
pub(crate) struct SpanLayout {
    pub offsets: Vec<f64>,
    pub lengths: Vec<f64>,
    /// Index into the per-template arrays for every span.
    pub template: Vec<usize>,
    pub n_templates: usize,
    /// |κ| above which the phase-averaged tail is used.
    pub kappa_switch: f64,
}

impl SpanLayout {
    /// `template[k]` must name the first span identical to span k.
    pub fn new(offsets: Vec<f64>, lengths: Vec<f64>, first_identical: &[usize], periods: f64) -> Self {
        let mut template = vec![0; lengths.len()];
        let mut n_templates = 0;
        let mut ids = vec![usize::MAX; lengths.len()];
        for k in 0..lengths.len() {
            let src = first_identical[k];
            if src == k {
                ids[k] = n_templates;
                n_templates += 1;
            }
            template[k] = ids[src];
        }
        let l_min = lengths.iter().copied().filter(|&l| l > 0.0).fold(f64::INFINITY, f64::min);
        let kappa_switch =
            if periods > 0.0 && l_min.is_finite() { 2.0 * PI * periods / l_min } else { f64::INFINITY };
        SpanLayout { offsets, lengths, template, n_templates, kappa_switch }
    }

    pub fn coherent(&self, kappa: f64) -> bool {
        kappa.abs() <= self.kappa_switch
    }

    /// |K|² from per-template span integrals.
    pub fn coherent_sum(&self, kappa: f64, ints: &[Complex64]) -> f64 {
        if self.lengths.len() == 1 {
            return ints[0].norm_sqr();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &t) in self.template.iter().enumerate() {
            acc += Complex64::from_polar(1.0, kappa * self.offsets[k]) * ints[t];
        }
        acc.norm_sqr()
    }

    /// Phase-averaged |K|² ≈ Σ_p |J_p|²/κ² from per-template amplitudes
    /// (g(0), g(L)).
    pub fn tail(&self, kappa: f64, ends: &[(f64, f64)]) -> f64 {
        let mut prev = 0.0;
        let mut acc = 0.0;
        for &t in &self.template {
            let (g0, gl) = ends[t];
            let j = g0 - prev;
            acc += j * j;
            prev = gl;
        }
        acc += prev * prev;
        acc / (kappa * kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(g: impl Fn(f64) -> f64, l: f64, kappa: f64) -> Complex64 {
        // composite Simpson on a fine grid
        let n = 200_000;
        let h = l / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            let z = j as f64 * h;
            let w = if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
            acc += Complex64::from_polar(g(z) * w, kappa * z);
        }
        acc * h / 3.0
    }

    #[test]
    fn exponential_amplitude_is_exact() {
        let alpha = 4.6e-5;
        let l = 80e3;
        let z: Vec<f64> = (0..=8).map(|j| l * j as f64 / 8.0).collect();
        let lg: Vec<f64> = z.iter().map(|&z| -0.5 * alpha * z).collect();
        for kappa in [0.0, 1e-6, 3e-4, 2e-2] {
            let got = filon_sampled(&lg, &z, kappa);
            let x = Complex64::new(-0.5 * alpha, kappa) * l;
            let exact = (x.exp() - 1.0) / x * l;
            assert!((got - exact).norm() < 1e-12 * exact.norm(), "{kappa}: {got} {exact}");
        }
    }

    #[test]
    fn segment_matches_brute_force() {
        let (la, lb, z0, h, kappa) = (0.3, -0.4, 5e3, 2e3, 3e-3);
        let got = filon_sampled(&[la, lb], &[0.0, h], kappa) * Complex64::from_polar(1.0, kappa * z0);
        let d = (lb - la) / h;
        let want = brute(|t| (la + d * t).exp(), h, kappa) * Complex64::from_polar(1.0, kappa * z0);
        assert!((got - want).norm() < 1e-9 * want.norm());
    }

    #[test]
    fn series_branch_is_continuous() {
        for r in [0.0499, 0.0501] {
            let x = Complex64::new(r * 0.6, r * 0.8);
            let a = cexprel(x, x.exp());
            let b = (x.exp() - 1.0) / x;
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn tail_approaches_averaged_sum() {
        // Three identical exponential spans: average of |K|² over a period
        // of the array factor equals the boundary-jump formula at large κ.
        let alpha = 4.6e-5;
        let l = 80e3;
        let layout = SpanLayout::new(vec![0.0, l, 2.0 * l], vec![l; 3], &[0, 0, 0], 0.0);
        let z: Vec<f64> = (0..=40).map(|j| l * j as f64 / 40.0).collect();
        let lg: Vec<f64> = z.iter().map(|&z| -0.5 * alpha * z).collect();
        let ends = [(1.0, (-0.5 * alpha * l).exp())];
        let kappa0 = 0.05;
        let m = 400;
        let period = 2.0 * PI / l;
        let mut avg = 0.0;
        for j in 0..m {
            let k = kappa0 + period * (j as f64 + 0.5) / m as f64;
            avg += layout.coherent_sum(k, &[filon_sampled(&lg, &z, k)]);
        }
        avg /= m as f64;
        let tail = layout.tail(kappa0 + 0.5 * period, &ends);
        assert!(((avg - tail) / tail).abs() < 1e-3, "{avg} {tail}");
    }
}
