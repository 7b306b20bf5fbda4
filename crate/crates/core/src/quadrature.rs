//! Gauss–Legendre nodes and weights on `[-1, 1]`, and end-corrected sums
//! of uniformly sampled data.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes in ascending order with matching weights. Newton iteration on the
/// three-term Legendre recurrence; exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Points in the local interpolation stencil used by [`run_integral`].
const STENCIL: usize = 8;

/// `∫_{u0}^{u1} L_k(u) du` for the Lagrange basis on nodes `0..q`.
fn basis_integrals(q: usize, u0: f64, u1: f64) -> [f64; STENCIL] {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = NODES.get_or_init(|| gauss_legendre(STENCIL));
    let (mid, half) = (0.5 * (u0 + u1), 0.5 * (u1 - u0));
    let mut out = [0.0; STENCIL];
    for (xi, wi) in x.iter().zip(w) {
        let u = mid + half * xi;
        for (k, o) in out.iter_mut().enumerate().take(q) {
            let mut l = 1.0;
            for i in (0..q).filter(|&i| i != k) {
                l *= (u - i as f64) / (k as f64 - i as f64);
            }
            *o += wi * half * l;
        }
    }
    out
}

/// Integral of uniformly spaced samples `g` (first sample at `x0`, spacing
/// `dx`) over `[lo, hi]`, where `lo` lies less than `dx` before the first
/// sample and `hi` less than `dx` after the last.
///
/// Each cell is integrated with the interpolant through the nearest eight
/// samples of the run itself, so away from the ends this is the plain sum
/// `dx Σ g`, and no sample outside the run ever contributes.
pub(crate) fn run_integral(g: &[f64], x0: f64, dx: f64, lo: f64, hi: f64) -> f64 {
    let m = g.len();
    if m == 0 {
        return 0.0;
    }
    let q = m.min(STENCIL);
    if q == 1 {
        return g[0] * (hi - lo);
    }
    let centre = q / 2 - 1;
    let stencil_start = |cell: usize| cell.saturating_sub(centre).min(m - q);
    let interior = basis_integrals(q, centre as f64, centre as f64 + 1.0);
    let apply = |s: usize, weights: &[f64; STENCIL]| -> f64 {
        (0..q).map(|k| weights[k] * g[s + k]).sum::<f64>()
    };

    let mut total = 0.0;
    for cell in 0..m - 1 {
        let s = stencil_start(cell);
        if cell - s == centre {
            total += apply(s, &interior);
        } else {
            let u = (cell - s) as f64;
            total += apply(s, &basis_integrals(q, u, u + 1.0));
        }
    }
    let left = (x0 - lo) / dx;
    if left > 0.0 {
        total += apply(0, &basis_integrals(q, -left, 0.0));
    }
    let right = (hi - (x0 + (m - 1) as f64 * dx)) / dx;
    if right > 0.0 {
        let s = m - q;
        let u = (m - 1 - s) as f64;
        total += apply(s, &basis_integrals(q, u, u + right));
    }
    total * dx
}
