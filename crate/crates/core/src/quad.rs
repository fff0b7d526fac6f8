//! Globally adaptive Gauss–Kronrod (7/15) quadrature in one dimension.
//!
//! The (f₁, f₂) integrals of the GN-type models are evaluated as nested
//! passes of this rule, with breakpoints at every known kink or jump.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    aux: f64,
}

/// Max-heap entry ordered by error.
struct ByError(f64, usize);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, xc) = f(c);
    let mut aux = xc * WGK[7];
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv = [0.0; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let ((f1, x1), (f2, x2)) = (f(c - dx), f(c + dx));
        aux += WGK[j] * (x1 + x2);
        fv[j] = f1;
        fv[14 - j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = resk * h;
    let resasc = resasc * h.abs();
    let resabs = resabs * h.abs();
    let mut error = ((resk - resg) * h).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Piece { a, b, value, error, aux: aux * h }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// panels delimited by `points`, and bisects the panel with the largest
/// error until the total error is below `max(abs_tol, rel_tol·|I|)` or
/// `max_intervals` panels exist.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    integrate_with_aux(|x| (f(x), 0.0), points, abs_tol, rel_tol, max_intervals).0
}

/// As [`integrate`] for `f` returning `(value, aux)`; the second result is
/// the integral of `aux` over the final panels. Only `value` drives the
/// subdivision.
pub fn integrate_with_aux<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> (QuadResult, f64) {
    let mut pieces: Vec<Piece> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let p = kronrod(&mut f, w[0], w[1]);
            evals += 15;
            heap.push(ByError(p.error, pieces.len()));
            pieces.push(p);
        }
    }
    if pieces.is_empty() {
        return (QuadResult { value: 0.0, error: 0.0, evals, converged: true }, 0.0);
    }
    let mut value: f64 = pieces.iter().map(|p| p.value).sum();
    let mut error: f64 = pieces.iter().map(|p| p.error).sum();
    let mut converged = error <= abs_tol.max(rel_tol * value.abs());
    while !converged && pieces.len() < max_intervals {
        let Some(ByError(_, idx)) = heap.pop() else { break };
        let p = pieces[idx];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) || (p.b - p.a) < 1e-13 * p.a.abs().max(p.b.abs()) {
            // Panel can no longer be split; leave it out of the heap.
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = kronrod(&mut f, p.a, mid);
        let right = kronrod(&mut f, mid, p.b);
        evals += 30;
        value += left.value + right.value - p.value;
        error += left.error + right.error - p.error;
        pieces[idx] = left;
        heap.push(ByError(left.error, idx));
        heap.push(ByError(right.error, pieces.len()));
        pieces.push(right);
        converged = error <= abs_tol.max(rel_tol * value.abs());
    }
    // Re-sum to shed the drift of the running updates.
    let value = pieces.iter().map(|p| p.value).sum();
    let error = pieces.iter().map(|p| p.error).sum::<f64>();
    let aux = pieces.iter().map(|p| p.aux).sum();
    let converged = converged || error <= abs_tol.max(rel_tol * f64::abs(value));
    (QuadResult { value, error, evals, converged }, aux)
}
