//! Localization functionals: the concentrations `α_T`, `β_Ω` and the
//! weighted spreadings `γ(f, a)`, `ζ(f, b)`.
//!
//! Frequencies are measured in the transform's own variable (cycles per unit
//! time), so `ζ(f, b)` weights `|f̂(ω)|²` by `w₂(ω / b)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::quadrature::run_integral;
use crate::signal::{energy, fourier, Domain, SampledSignal};
use crate::weights::{lp_indicator, WeightSpec};

/// `∫ w(x/a)|f(x)|² dx` by Riemann sum on the signal's own grid.
fn weighted_energy(f: &SampledSignal, w: &WeightSpec, a: f64) -> f64 {
    f.grid()
        .points()
        .zip(f.values())
        .map(|(x, v)| w.eval(x / a) * v.norm_sqr())
        .sum::<f64>()
        * f.grid().dx()
}

fn nonzero_energy(f: &SampledSignal) -> Result<f64> {
    let e = energy(f);
    if e > 0.0 {
        Ok(e)
    } else {
        Err(Error::ZeroNorm)
    }
}

fn require_time(f: &SampledSignal) -> Result<()> {
    match f.domain() {
        Domain::Time => Ok(()),
        got => Err(Error::DomainError {
            expected: Domain::Time,
            got,
        }),
    }
}

/// Energies inside and outside `[-h, h]`. Each side is integrated from its
/// own samples only, with interpolated end cells up to `±h`, so a jump at the
/// cut never leaks across it while narrow windows stay accurate.
fn split_energy(f: &SampledSignal, h: f64) -> (f64, f64) {
    let grid = f.grid();
    let dx = grid.dx();
    let g: Vec<f64> = f.values().iter().map(|v| v.norm_sqr()).collect();
    let xs: Vec<f64> = grid.points().collect();
    let inside = |x: f64| lp_indicator(x / h) == 0.0;
    let Some(first) = xs.iter().position(|&x| inside(x)) else {
        return (0.0, g.iter().sum::<f64>() * dx);
    };
    let last = xs.iter().rposition(|&x| inside(x)).unwrap_or(first);
    let n = xs.len();
    let core = run_integral(&g[first..=last], xs[first], dx, -h, h);
    let left = run_integral(&g[..first], xs[0], dx, xs[0], -h);
    let right = match last + 1 < n {
        true => run_integral(&g[last + 1..], xs[last + 1], dx, h, xs[n - 1]),
        false => 0.0,
    };
    (core.max(0.0), (left + right).max(0.0))
}

fn spread(f: &SampledSignal, w: &WeightSpec, scale: f64) -> Result<f64> {
    require_positive("scale", scale)?;
    let total = nonzero_energy(f)?;
    if matches!(w, WeightSpec::LpIndicator) {
        let (inside, outside) = split_energy(f, scale);
        return Ok((outside / (inside + outside)).sqrt().clamp(0.0, 1.0));
    }
    Ok((weighted_energy(f, w, scale) / total).sqrt())
}

/// Time spreading `γ(f, a) = (∫ w₁(x/a)|f(x)|² dx)^{1/2} / ‖f‖`.
pub fn gamma(f: &SampledSignal, w1: &WeightSpec, a: f64) -> Result<f64> {
    require_positive("a", a)?;
    require_time(f)?;
    spread(f, w1, a)
}

/// Frequency spreading `ζ(f, b) = (∫ w₂(ω/b)|f̂(ω)|² dω)^{1/2} / ‖f‖`.
pub fn zeta(f: &SampledSignal, w2: &WeightSpec, b: f64) -> Result<f64> {
    require_positive("b", b)?;
    require_time(f)?;
    spread(&fourier(f)?, w2, b)
}

/// Share of the energy where the indicator weight vanishes; the complement
/// of the indicator spreading, so `α² + γ² = 1`.
fn concentration(f: &SampledSignal, half_width: f64) -> Result<f64> {
    nonzero_energy(f)?;
    let (inside, outside) = split_energy(f, half_width);
    Ok((inside / (inside + outside)).sqrt().clamp(0.0, 1.0))
}

/// Time concentration `α_T(f) = ‖f·1_{[-T,T]}‖ / ‖f‖`.
pub fn alpha(f: &SampledSignal, t: f64) -> Result<f64> {
    require_positive("T", t)?;
    require_time(f)?;
    concentration(f, t)
}

/// Frequency concentration `β_Ω(f) = ‖f̂·1_{[-Ω,Ω]}‖ / ‖f‖`.
pub fn beta(f: &SampledSignal, omega: f64) -> Result<f64> {
    require_positive("Omega", omega)?;
    require_time(f)?;
    concentration(&fourier(f)?, omega)
}

/// A point `(γ(f,a), ζ(f,b), a·b)` together with the signal that realizes it.
#[derive(Debug, Clone)]
pub struct RealizablePoint {
    gamma: f64,
    zeta: f64,
    a: f64,
    b: f64,
    signal: Arc<SampledSignal>,
}

impl RealizablePoint {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn c(&self) -> f64 {
        self.a * self.b
    }

    pub fn scales(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn signal(&self) -> &SampledSignal {
        &self.signal
    }
}

pub fn spreading_point(
    f: &SampledSignal,
    w1: &WeightSpec,
    w2: &WeightSpec,
    a: f64,
    b: f64,
) -> Result<RealizablePoint> {
    Ok(RealizablePoint {
        gamma: gamma(f, w1, a)?,
        zeta: zeta(f, w2, b)?,
        a,
        b,
        signal: Arc::new(f.clone()),
    })
}

/// `(γᵐ, ζⁿ, c)`.
pub fn power_coords(pt: &RealizablePoint, m: u32, n: u32) -> (f64, f64, f64) {
    (
        pt.gamma.powi(m as i32),
        pt.zeta.powi(n as i32),
        pt.c(),
    )
}

/// Threshold above which [`tail_bound`] flags a spreading value.
pub const TAIL_FLAG_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostic {
    /// `w(x_max/a)` times the energy in the outer sixteenth of the grid,
    /// relative to the weighted energy.
    pub bound: f64,
    pub flagged: bool,
}

/// Estimates how much weighted mass a truncated grid may be missing. Works
/// for either domain; pass `fourier(f)` for frequency spreadings.
pub fn tail_bound(f: &SampledSignal, w: &WeightSpec, a: f64) -> Result<TailDiagnostic> {
    require_positive("a", a)?;
    let total = nonzero_energy(f)?;
    let weighted = weighted_energy(f, w, a);
    let edge = w.eval(f.grid().x_max() / a);
    let tail = crate::signal::tail_mass(f, 1.0 / 16.0) * total;
    let bound = if weighted > 0.0 {
        edge * tail / weighted
    } else if edge * tail > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(TailDiagnostic {
        bound,
        flagged: bound > TAIL_FLAG_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{band_limit, dilate_l2, sample, translate, Grid, SignalFamily};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(2048, 12.0).unwrap()
    }

    fn gauss(d: f64) -> SampledSignal {
        sample(&SignalFamily::NormalizedGaussian { d }, &grid()).unwrap()
    }

    fn lumpy() -> SampledSignal {
        let g = grid();
        let values: Vec<f64> = g
            .points()
            .map(|x| (-(x - 0.4f64).powi(2) * 3.0).exp() + 0.6 * (-(x + 0.9f64).powi(2) * 5.0).exp())
            .collect();
        SampledSignal::from_real(g, &values).unwrap()
    }

    #[test]
    fn gaussian_second_moments() {
        let f = gauss(1.0);
        let w = WeightSpec::Homogeneous(2);
        let expected = 1.0 / (2.0 * PI.sqrt());
        assert_abs_diff_eq!(gamma(&f, &w, 1.0).unwrap(), expected, epsilon = 1e-6);
        assert_abs_diff_eq!(zeta(&f, &w, 1.0).unwrap(), expected, epsilon = 1e-6);
        let pt = spreading_point(&f, &w, &w, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(pt.gamma(), 0.28209, epsilon = 1e-5);
        assert_eq!(pt.c(), 1.0);
    }

    #[test]
    fn supported_signals_have_zero_lp_spreading() {
        let ind = sample(&SignalFamily::Indicator { h: 0.5 }, &grid()).unwrap();
        assert_eq!(gamma(&ind, &WeightSpec::LpIndicator, 1.0).unwrap(), 0.0);
        assert_eq!(alpha(&ind, 1.0).unwrap(), 1.0);
        let bl = band_limit(&gauss(1.0), 0.5).unwrap();
        assert_abs_diff_eq!(zeta(&bl, &WeightSpec::LpIndicator, 0.5).unwrap(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn complementarity() {
        let f = lumpy();
        for t in [0.1, 0.5, 1.0, 2.3] {
            let a = alpha(&f, t).unwrap();
            let g = gamma(&f, &WeightSpec::LpIndicator, t).unwrap();
            assert_abs_diff_eq!(a * a + g * g, 1.0, epsilon = 1e-12);
            let b = beta(&f, t).unwrap();
            let z = zeta(&f, &WeightSpec::LpIndicator, t).unwrap();
            assert_abs_diff_eq!(b * b + z * z, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn narrow_band_concentration() {
        // |ĝ|² = √2 e^{-2πω²}, so β_W² = erf(√(2π) W); W spans under two frequency cells.
        let f = gauss(1.0);
        for w in [0.06, 0.0845, 0.3] {
            let exact = statrs::function::erf::erf((2.0 * PI).sqrt() * w).sqrt();
            assert_abs_diff_eq!(beta(&f, w).unwrap(), exact, epsilon = 5e-6);
        }
        for t in [0.013, 0.41, 1.0] {
            let exact = statrs::function::erf::erf((2.0 * PI).sqrt() * t).sqrt();
            assert_abs_diff_eq!(alpha(&f, t).unwrap(), exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn homogeneous_scale_law() {
        let f = lumpy();
        for k in 1..=4u32 {
            let w = WeightSpec::Homogeneous(k);
            let base = gamma(&f, &w, 1.0).unwrap();
            for a in [0.3, 2.0, 5.0] {
                let scaled = gamma(&f, &w, a).unwrap();
                assert_abs_diff_eq!(scaled, a.powf(-(k as f64) / 2.0) * base, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn scaling_lemma() {
        let f = lumpy();
        let w = WeightSpec::Homogeneous(2);
        for k in [0.5, 2.0, 3.0] {
            let fk = dilate_l2(&f, k).unwrap();
            assert_abs_diff_eq!(
                gamma(&fk, &w, k * 1.3).unwrap(),
                gamma(&f, &w, 1.3).unwrap(),
                epsilon = 1e-6
            );
            assert_abs_diff_eq!(
                zeta(&fk, &w, 0.8 / k).unwrap(),
                zeta(&f, &w, 0.8).unwrap(),
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn zeta_is_translation_invariant() {
        let f = lumpy();
        let w = WeightSpec::Homogeneous(2);
        let moved = translate(&f, 1.37).unwrap();
        assert_abs_diff_eq!(
            zeta(&moved, &w, 1.0).unwrap(),
            zeta(&f, &w, 1.0).unwrap(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn gamma_decreases_with_scale() {
        let f = lumpy();
        let w = WeightSpec::Homogeneous(3);
        let values: Vec<f64> = [0.2, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&a| gamma(&f, &w, a).unwrap())
            .collect();
        assert!(values.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn power_coordinates() {
        let f = gauss(1.0);
        let w = WeightSpec::Homogeneous(2);
        let pt = spreading_point(&f, &w, &w, 2.0, 0.5).unwrap();
        let (x, y, c) = power_coords(&pt, 1, 1);
        assert_eq!((x, y, c), (pt.gamma(), pt.zeta(), 1.0));
        let (x2, y3, _) = power_coords(&pt, 2, 3);
        assert_abs_diff_eq!(x2, pt.gamma().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(y3, pt.zeta().powi(3), epsilon = 1e-15);
    }

    #[test]
    fn errors() {
        let zero = SampledSignal::from_real(grid(), &vec![0.0; 2048]).unwrap();
        let w = WeightSpec::Homogeneous(2);
        assert_eq!(gamma(&zero, &w, 1.0), Err(Error::ZeroNorm));
        assert_eq!(alpha(&zero, 1.0), Err(Error::ZeroNorm));
        assert!(matches!(gamma(&gauss(1.0), &w, 0.0), Err(Error::InvalidParameter(_))));
        let spectrum = fourier(&gauss(1.0)).unwrap();
        assert!(matches!(zeta(&spectrum, &w, 1.0), Err(Error::DomainError { .. })));
    }

    #[test]
    fn tail_diagnostic() {
        let w = WeightSpec::Homogeneous(2);
        assert!(!tail_bound(&gauss(1.0), &w, 1.0).unwrap().flagged);
        let wide = sample(&SignalFamily::NormalizedGaussian { d: 8.0 }, &grid()).unwrap();
        assert!(tail_bound(&wide, &w, 1.0).unwrap().flagged);
    }
}
