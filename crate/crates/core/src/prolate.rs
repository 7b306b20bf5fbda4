//! Eigenvalues `λ_n(c)` of the time- and band-limiting operator
//!
//! ```text
//! λ f(x) = ∫_{-1}^{1} sin(c(x-y)) / (π(x-y)) f(y) dy,   c = ΩT,
//! ```
//!
//! which is the operator on `[-T, T]` with angular band limit `Ω` rescaled to
//! the unit interval. Discretized by a Gauss–Legendre Nyström method.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::quadrature::gauss_legendre;

pub const MIN_N_QUAD: usize = 32;
const TOL: f64 = 1e-12;
const MAX_ITER: usize = 10_000;
/// Eigenvalues below this are reported as zero.
const ZERO_FLOOR: f64 = 1e-15;

fn kernel(c: f64, d: f64) -> f64 {
    if d == 0.0 {
        c / PI
    } else {
        (c * d).sin() / (PI * d)
    }
}

fn validate(c: f64, n_quad: usize) -> Result<()> {
    require_positive("c", c)?;
    if n_quad < MIN_N_QUAD {
        return Err(Error::InvalidParameter(format!(
            "n_quad must be at least {MIN_N_QUAD}, got {n_quad}"
        )));
    }
    Ok(())
}

/// Symmetric Nyström matrix `A_ij = √w_i K(x_i, x_j) √w_j`.
pub fn nystrom_matrix(c: f64, n_quad: usize) -> Result<DMatrix<f64>> {
    validate(c, n_quad)?;
    let (x, w) = gauss_legendre(n_quad);
    let sw: Vec<f64> = w.iter().map(|w| w.sqrt()).collect();
    let mut a = DMatrix::zeros(n_quad, n_quad);
    for i in 0..n_quad {
        for j in i..n_quad {
            let v = sw[i] * kernel(c, x[i] - x[j]) * sw[j];
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IterationMethod {
    Power,
    /// Power iteration on `(σI - A)^{-1}` with `σ` just above 1.
    ShiftInvert,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopEigenvalue {
    pub c: f64,
    pub value: f64,
    pub iterations: usize,
    /// `‖Av - λv‖` at the final iterate.
    pub residual: f64,
    pub converged: bool,
    pub method: IterationMethod,
}

/// Largest eigenvalue with iteration diagnostics.
///
/// For `c < 1` the gap `λ₁/λ₀` is small and plain power iteration is used.
/// Otherwise `λ₀` crowds 1 and the iteration runs on `(σI - A)^{-1}`, whose
/// dominant ratio `(σ-λ₀)/(σ-λ₁)` shrinks as `c` grows.
pub fn lambda_top_report(c: f64, n_quad: usize) -> Result<TopEigenvalue> {
    let a = nystrom_matrix(c, n_quad)?;
    let (_, w) = gauss_legendre(n_quad);
    // √w samples the constant function, which overlaps the even ground state.
    let mut v = DVector::from_iterator(n_quad, w.iter().map(|w| w.sqrt()));
    v.normalize_mut();

    let method = if c < 1.0 {
        IterationMethod::Power
    } else {
        IterationMethod::ShiftInvert
    };
    let solver = match method {
        IterationMethod::Power => None,
        IterationMethod::ShiftInvert => Some(shifted_cholesky(&a)?),
    };

    let mut residual = f64::INFINITY;
    for iter in 1..=MAX_ITER {
        let next = match &solver {
            None => &a * &v,
            Some(chol) => chol.solve(&v),
        };
        let norm = next.norm();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        v = next / norm;
        let av = &a * &v;
        let mu = v.dot(&av);
        residual = (av - &v * mu).norm();
        if residual <= TOL {
            return Ok(TopEigenvalue {
                c,
                value: mu,
                iterations: iter,
                residual,
                converged: true,
                method,
            });
        }
    }
    Err(Error::Convergence {
        c,
        iterations: MAX_ITER,
        last_change: residual,
    })
}

/// Cholesky factor of `σI - A` for the smallest `σ = 1 + δ` that keeps the
/// matrix numerically positive definite.
fn shifted_cholesky(a: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let n = a.nrows();
    let mut delta = 1e-14;
    while delta < 1.0 {
        let m = DMatrix::identity(n, n) * (1.0 + delta) - a;
        if let Some(chol) = m.cholesky() {
            return Ok(chol);
        }
        delta *= 100.0;
    }
    Err(Error::Convergence {
        c: f64::NAN,
        iterations: 0,
        last_change: delta,
    })
}

/// `λ₀(c)`, the largest eigenvalue.
pub fn lambda_top(c: f64, n_quad: usize) -> Result<f64> {
    lambda_top_report(c, n_quad).map(|r| r.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProlateSpectrum {
    pub c: f64,
    /// Descending; entries below `1e-15` are reported as exactly zero.
    pub eigenvalues: Vec<f64>,
    pub n_quad: usize,
    pub converged: bool,
}

/// Top `k` eigenvalues from a full symmetric decomposition.
pub fn lambda_spectrum(c: f64, n_quad: usize, k: usize) -> Result<ProlateSpectrum> {
    validate(c, n_quad)?;
    if k > n_quad / 2 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds n_quad / 2 = {}",
            n_quad / 2
        )));
    }
    let a = nystrom_matrix(c, n_quad)?;
    let mut all: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    all.sort_by(|x, y| y.total_cmp(x));
    let eigenvalues = all
        .into_iter()
        .take(k)
        .map(|v| if v < ZERO_FLOOR { 0.0 } else { v })
        .collect();
    Ok(ProlateSpectrum {
        c,
        eigenvalues,
        n_quad,
        converged: true,
    })
}

/// Large-`c` asymptotic for `1 - λ_n`:
/// `4√π · 8ⁿ / n! · c^{n+1/2} · e^{-2c}`.
pub fn fuchs_asymptotic(n: u32, c: f64) -> f64 {
    let log_fact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
    let log = (4.0 * PI.sqrt()).ln() + n as f64 * 8f64.ln() - log_fact
        + (n as f64 + 0.5) * c.ln()
        - 2.0 * c;
    log.exp()
}

/// `(λ₀ - λ₀_asym) / (1 - λ₀_asym)` with `λ₀_asym = 1 - fuchs_asymptotic(0, c)`.
pub fn relative_difference(c: f64, n_quad: usize) -> Result<f64> {
    let numeric = lambda_top(c, n_quad)?;
    Ok(relative_difference_from(c, numeric))
}

fn relative_difference_from(c: f64, numeric: f64) -> f64 {
    let asym = 1.0 - fuchs_asymptotic(0, c);
    (numeric - asym) / (1.0 - asym)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    pub lambda0: f64,
    pub lambda0_asymptotic: f64,
    pub relative_difference: f64,
}

/// `steps` evenly spaced values of `c` on `[c_min, c_max]`, computed in
/// parallel and returned in order of `c`. A single step evaluates `c_min`.
pub fn lambda0_sweep(c_min: f64, c_max: f64, steps: usize, n_quad: usize) -> Result<Vec<SweepRow>> {
    require_positive("c_min", c_min)?;
    require_positive("c_max", c_max)?;
    if c_max < c_min || steps == 0 || (steps > 1 && c_max == c_min) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < c_min < c_max and steps >= 1 (c_min = c_max only with one step); got [{c_min}, {c_max}], {steps} steps"
        )));
    }
    validate(c_min, n_quad)?;
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let c = if i + 1 == steps && steps > 1 {
                c_max
            } else {
                c_min + (c_max - c_min) * i as f64 / (steps.max(2) - 1) as f64
            };
            let lambda0 = lambda_top(c, n_quad)?;
            Ok(SweepRow {
                c,
                lambda0,
                lambda0_asymptotic: 1.0 - fuchs_asymptotic(0, c),
                relative_difference: relative_difference_from(c, lambda0),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda0Inverse {
    pub c: f64,
    pub lambda0: f64,
    pub bisection_steps: usize,
}

/// Largest `c` the inverse will search up to.
pub const C_SEARCH_MAX: f64 = 50.0;

/// Solves `λ₀(c) = target` by bisection. Uses `λ₀(c) <= trace = 2c/π` for
/// the lower bracket and doubling for the upper one.
pub fn c_for_lambda0(target: f64, n_quad: usize, tol: f64) -> Result<Lambda0Inverse> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target must lie in (0, 1), got {target}"
        )));
    }
    require_positive("tol", tol)?;
    let mut lo = target * PI / 4.0;
    let mut hi = 1.0f64.max(2.0 * lo);
    while lambda_top(hi, n_quad)? < target {
        hi *= 2.0;
        if hi > C_SEARCH_MAX {
            return Err(Error::Range(format!(
                "λ₀ = {target} not reached for c <= {C_SEARCH_MAX}"
            )));
        }
    }
    let mut steps = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let value = lambda_top(mid, n_quad)?;
        steps += 1;
        if (value - target).abs() <= tol {
            return Ok(Lambda0Inverse {
                c: mid,
                lambda0: value,
                bisection_steps: steps,
            });
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            return Err(Error::Range(format!(
                "bracket collapsed at c = {mid} with |λ₀ - target| = {:e} > tol",
                (value - target).abs()
            )));
        }
    }
}

/// `c` for a band limit given in cycles per unit time: `2π Ω_hz T`.
pub fn angular_c(omega_hz: f64, t: f64) -> f64 {
    2.0 * PI * omega_hz * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matrix_structure() {
        let a = nystrom_matrix(1.5, 48).unwrap();
        let (_, w) = gauss_legendre(48);
        for i in 0..48 {
            assert_abs_diff_eq!(a[(i, i)], w[i] * 1.5 / PI, epsilon = 1e-15);
            for j in 0..48 {
                assert_eq!(a[(i, j)], a[(j, i)]);
            }
        }
        assert_abs_diff_eq!(a.trace(), 3.0 / PI, epsilon = 1e-13);
        assert!(matches!(nystrom_matrix(1.0, 31), Err(Error::InvalidParameter(_))));
        assert!(matches!(nystrom_matrix(0.0, 64), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn small_c_limit() {
        let l = lambda_top(0.01, 64).unwrap();
        assert_abs_diff_eq!(l, 0.006366, epsilon = 1e-5);
        assert!(l < 0.02 / PI);
    }

    #[test]
    fn both_iterations_agree_with_dense_solver() {
        for c in [0.3, 0.99, 1.0, 2.5, 6.0, 10.0] {
            let top = lambda_top_report(c, 64).unwrap();
            let dense = lambda_spectrum(c, 64, 1).unwrap().eigenvalues[0];
            assert!(top.converged);
            assert_abs_diff_eq!(top.value, dense, epsilon = 1e-12);
            assert!(top.value < 1.0);
        }
    }

    #[test]
    fn two_resolutions_agree() {
        for c in [0.5, 1.0, 4.0, 10.0] {
            let a = lambda_top(c, 64).unwrap();
            let b = lambda_top(c, 128).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn fuchs_values() {
        assert_abs_diff_eq!(fuchs_asymptotic(0, 4.0), 4.0 * PI.sqrt() * 2.0 * (-8f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(fuchs_asymptotic(0, 4.0), 4.757e-3, epsilon = 1e-6);
        for n in 0..6 {
            let ratio = fuchs_asymptotic(n + 1, 2.5) / fuchs_asymptotic(n, 2.5);
            assert_abs_diff_eq!(ratio, 8.0 * 2.5 / (n as f64 + 1.0), epsilon = 1e-12);
        }
        assert!(fuchs_asymptotic(0, 200.0) < 1e-150);
        let gap = 1.0 - lambda_top(4.0, 64).unwrap();
        assert!((gap / fuchs_asymptotic(0, 4.0) - 1.0).abs() < 0.25);
    }

    #[test]
    fn spectrum_properties() {
        for c in [0.5, 2.0, 5.0, 10.0] {
            let s = lambda_spectrum(c, 128, 64).unwrap();
            assert!(s.eigenvalues.iter().all(|&v| (0.0..1.0).contains(&v)));
            let sum: f64 = s.eigenvalues.iter().sum();
            assert_abs_diff_eq!(sum, 2.0 * c / PI, epsilon = 1e-6);
            let top: Vec<f64> = s.eigenvalues.iter().copied().take(10).filter(|&v| v > 1e-13).collect();
            assert!(top.windows(2).all(|p| p[0] - p[1] > 1e-14), "c = {c}: {top:?}");
        }
        assert!(lambda_spectrum(1.0, 64, 33).is_err());
    }

    #[test]
    fn sweep_and_inverse() {
        let rows = lambda0_sweep(0.5, 3.0, 6, 64).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].c, 0.5);
        assert_eq!(rows[5].c, 3.0);
        assert_eq!(rows[5].lambda0, lambda_top(3.0, 64).unwrap());
        assert!(rows.windows(2).all(|p| p[1].lambda0 > p[0].lambda0));
        let single = lambda0_sweep(5.0, 5.0, 1, 64).unwrap();
        assert_eq!(single.len(), 1);
        assert!(lambda0_sweep(2.0, 1.0, 4, 64).is_err());

        let inv = c_for_lambda0(0.7, 64, 1e-8).unwrap();
        assert!(inv.bisection_steps <= 60);
        assert_abs_diff_eq!(lambda_top(inv.c, 64).unwrap(), 0.7, epsilon = 1e-8);
        assert!(c_for_lambda0(0.8, 64, 1e-8).unwrap().c > c_for_lambda0(0.5, 64, 1e-8).unwrap().c);
        assert!(c_for_lambda0(1.0, 64, 1e-8).is_err());
    }

    #[test]
    fn angular_conversion() {
        assert_abs_diff_eq!(angular_c(0.5, 2.0), 2.0 * PI, epsilon = 1e-15);
    }
}
