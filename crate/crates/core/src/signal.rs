//! Sampled signals on a uniform symmetric grid and the basic operator set:
//! Fourier transform (`e^{-2πixω}` convention), translation, modulation,
//! dilation, time limiting and band limiting.
//!
//! The grid spans `[-x_max, x_max)` with `n` samples, so `x_j = (j - n/2)·dx`
//! and `x = 0` is always a sample point. The dual frequency grid has the same
//! shape with half-width `n / (4 x_max)`, which makes [`Grid::dual`] an
//! involution.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    x_max: f64,
}

impl Grid {
    pub const MIN_SAMPLES: usize = 16;

    pub fn new(n: usize, x_max: f64) -> Result<Self> {
        if n < Self::MIN_SAMPLES || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid size must be even and at least {}, got {n}",
                Self::MIN_SAMPLES
            )));
        }
        require_positive("x_max", x_max)?;
        Ok(Self { n, x_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / self.n as f64
    }

    /// Coordinate of sample `j`.
    pub fn point(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// The frequency grid paired with this grid by the DFT.
    pub fn dual(&self) -> Grid {
        Grid {
            n: self.n,
            x_max: self.n as f64 / (4.0 * self.x_max),
        }
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && (self.x_max - other.x_max).abs() <= 1e-12 * self.x_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Time,
    Frequency,
}

/// Parametric signal families understood by [`sample`].
#[derive(Debug, Clone, PartialEq)]
pub enum SignalFamily {
    /// `2^{1/4} d^{-1/2} e^{-π(x/d)²}`, unit L2 norm.
    NormalizedGaussian { d: f64 },
    /// 1 on `|x| <= h`, 0 elsewhere.
    Indicator { h: f64 },
    /// Hermite function of the given order dilated by `d` (unit L2 norm).
    HermiteGaussian { order: usize, d: f64 },
    Custom(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: Grid,
    values: Vec<Complex64>,
    domain: Domain,
}

impl SampledSignal {
    pub fn new(grid: Grid, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid,
            values,
            domain,
        })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Domain::Time,
        )
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Same samples, read as a function of the other variable. Used where a
    /// spectrum is treated as a signal in its own right (`f̂̂(x) = f(-x)`).
    pub fn reinterpret(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_values(|_, v| v * factor)
    }

    /// `|f(x)|²` at every sample.
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    fn map_values(&self, mut f: impl FnMut(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(x, &v)| f(x, v))
            .collect();
        Self {
            grid: self.grid,
            values,
            domain: self.domain,
        }
    }

    fn require_domain(&self, expected: Domain) -> Result<()> {
        if self.domain == expected {
            Ok(())
        } else {
            Err(Error::DomainError {
                expected,
                got: self.domain,
            })
        }
    }
}

pub(crate) fn gaussian_value(x: f64, d: f64) -> f64 {
    let t = x / d;
    2f64.powf(0.25) / d.sqrt() * (-PI * t * t).exp()
}

/// Hermite functions `φ_0..=φ_order` at `x / d`, each scaled by `d^{-1/2}`.
/// `φ_0` is computed exactly as [`gaussian_value`].
pub(crate) fn hermite_values(x: f64, d: f64, order: usize) -> Vec<f64> {
    let t = x / d;
    let mut out = Vec::with_capacity(order + 1);
    out.push(gaussian_value(x, d));
    if order >= 1 {
        out.push((4.0 * PI).sqrt() * t * out[0]);
    }
    for m in 1..order {
        let m_f = m as f64;
        let next = (4.0 * PI / (m_f + 1.0)).sqrt() * t * out[m]
            - (m_f / (m_f + 1.0)).sqrt() * out[m - 1];
        out.push(next);
    }
    out
}

pub fn sample(family: &SignalFamily, grid: &Grid) -> Result<SampledSignal> {
    let values: Vec<Complex64> = match family {
        SignalFamily::NormalizedGaussian { d } => {
            require_positive("d", *d)?;
            grid.points()
                .map(|x| Complex64::new(gaussian_value(x, *d), 0.0))
                .collect()
        }
        SignalFamily::Indicator { h } => {
            require_positive("h", *h)?;
            grid.points()
                .map(|x| Complex64::new(if x.abs() <= *h { 1.0 } else { 0.0 }, 0.0))
                .collect()
        }
        SignalFamily::HermiteGaussian { order, d } => {
            require_positive("d", *d)?;
            grid.points()
                .map(|x| Complex64::new(hermite_values(x, *d, *order)[*order], 0.0))
                .collect()
        }
        SignalFamily::Custom(values) => values.clone(),
    };
    SampledSignal::new(*grid, values, Domain::Time)
}

pub fn l2_norm(f: &SampledSignal) -> f64 {
    energy(f).sqrt()
}

/// `Σ|f_j|² dx`.
pub fn energy(f: &SampledSignal) -> f64 {
    f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid.dx()
}

pub fn inner(f: &SampledSignal, g: &SampledSignal) -> Result<Complex64> {
    if !f.grid.same_as(&g.grid) {
        return Err(Error::GridMismatch(format!(
            "{:?} vs {:?}",
            f.grid, g.grid
        )));
    }
    g.require_domain(f.domain)?;
    let sum: Complex64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(sum * f.grid.dx())
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// `(-1)^j` times the global phase `(-1)^{n/2}` that centres both grids.
fn centring_sign(j: usize, n: usize) -> f64 {
    if (j + n / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Continuous-convention transform of samples on `grid`, returned on
/// `grid.dual()`. `inverse` selects the `e^{+2πixω}` kernel.
fn transform(values: &[Complex64], grid: &Grid, inverse: bool) -> Vec<Complex64> {
    let n = grid.n();
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
        .collect();
    plan(n, inverse).process(&mut buf);
    let dx = grid.dx();
    buf.iter_mut()
        .enumerate()
        .for_each(|(k, v)| *v *= dx * centring_sign(k, n));
    buf
}

/// `f̂(ω) = ∫ f(x) e^{-2πixω} dx` sampled on the dual grid.
pub fn fourier(f: &SampledSignal) -> Result<SampledSignal> {
    f.require_domain(Domain::Time)?;
    Ok(SampledSignal {
        grid: f.grid.dual(),
        values: transform(&f.values, &f.grid, false),
        domain: Domain::Frequency,
    })
}

/// `f(x) = ∫ f̂(ω) e^{2πixω} dω`.
pub fn inverse_fourier(spectrum: &SampledSignal) -> Result<SampledSignal> {
    spectrum.require_domain(Domain::Frequency)?;
    Ok(SampledSignal {
        grid: spectrum.grid.dual(),
        values: transform(&spectrum.values, &spectrum.grid, true),
        domain: Domain::Time,
    })
}

/// `T_a f(x) = f(x - a)`. Whole-sample shifts move samples and zero-fill;
/// fractional shifts use the FFT phase ramp `e^{-2πiaω}`.
pub fn translate(f: &SampledSignal, a: f64) -> Result<SampledSignal> {
    f.require_domain(Domain::Time)?;
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("shift must be finite, got {a}")));
    }
    let steps = a / f.grid.dx();
    if (steps - steps.round()).abs() < 1e-9 {
        let shift = steps.round() as i64;
        let n = f.grid.n() as i64;
        let values = (0..n)
            .map(|j| {
                let src = j - shift;
                if (0..n).contains(&src) {
                    f.values[src as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        return Ok(SampledSignal {
            grid: f.grid,
            values,
            domain: Domain::Time,
        });
    }
    let spectrum = fourier(f)?;
    let shifted = spectrum.map_values(|w, v| v * Complex64::from_polar(1.0, -2.0 * PI * a * w));
    inverse_fourier(&shifted)
}

/// `M_b f(x) = e^{ibx} f(x)` (angular `b`).
pub fn modulate(f: &SampledSignal, b: f64) -> Result<SampledSignal> {
    f.require_domain(Domain::Time)?;
    Ok(f.map_values(|x, v| v * Complex64::from_polar(1.0, b * x)))
}

/// Band-limited (trigonometric) interpolant of `f` evaluated at `xs`.
/// Points outside `[-x_max, x_max)` evaluate to zero.
pub fn interpolate(f: &SampledSignal, xs: &[f64]) -> Result<Vec<Complex64>> {
    f.require_domain(Domain::Time)?;
    let spectrum = fourier(f)?;
    let freq = spectrum.grid;
    let n = freq.n();
    let d_omega = freq.dx();
    let w0 = freq.point(0);
    let x_max = f.grid.x_max();
    let out = xs
        .iter()
        .map(|&x| {
            if x < -x_max || x >= x_max {
                return Complex64::new(0.0, 0.0);
            }
            // Nyquist bin split evenly between ±W keeps real data real.
            let mut acc = spectrum.values[0] * (2.0 * PI * x * w0).cos();
            let step = Complex64::from_polar(1.0, 2.0 * PI * x * d_omega);
            let mut phase = Complex64::from_polar(1.0, 2.0 * PI * x * freq.point(1));
            for k in 1..n {
                acc += spectrum.values[k] * phase;
                phase *= step;
            }
            acc * d_omega
        })
        .collect();
    Ok(out)
}

/// `S_a f(x) = f(x / a)`.
pub fn dilate_unnormalized(f: &SampledSignal, a: f64) -> Result<SampledSignal> {
    require_positive("a", a)?;
    f.require_domain(Domain::Time)?;
    if a == 1.0 {
        return Ok(f.clone());
    }
    let xs: Vec<f64> = f.grid.points().map(|x| x / a).collect();
    let values = interpolate(f, &xs)?;
    Ok(SampledSignal {
        grid: f.grid,
        values,
        domain: Domain::Time,
    })
}

/// `f_k(x) = k^{-1/2} f(x / k)`, the norm-preserving dilation.
pub fn dilate_l2(f: &SampledSignal, k: f64) -> Result<SampledSignal> {
    require_positive("k", k)?;
    Ok(dilate_unnormalized(f, k)?.scaled(1.0 / k.sqrt()))
}

/// `D_h`: zero every sample with `|x| > h`.
pub fn time_limit(f: &SampledSignal, h: f64) -> Result<SampledSignal> {
    require_positive("h", h)?;
    f.require_domain(Domain::Time)?;
    Ok(f.map_values(|x, v| if x.abs() > h { Complex64::new(0.0, 0.0) } else { v }))
}

/// `B_m`: keep only spectral content with `|ω| <= m`.
pub fn band_limit(f: &SampledSignal, m: f64) -> Result<SampledSignal> {
    require_positive("m", m)?;
    let spectrum = fourier(f)?;
    let clipped = spectrum.map_values(|w, v| if w.abs() > m { Complex64::new(0.0, 0.0) } else { v });
    inverse_fourier(&clipped)
}

/// Fraction of the energy carried by the outer `edge_fraction` of the grid
/// on each side. A cheap truncation diagnostic; callers want this below
/// roughly `1e-12` for well-resolved signals.
pub fn tail_mass(f: &SampledSignal, edge_fraction: f64) -> f64 {
    let total = energy(f);
    if total == 0.0 {
        return 0.0;
    }
    let cut = (1.0 - edge_fraction) * f.grid.x_max();
    let tail: f64 = f
        .grid
        .points()
        .zip(&f.values)
        .filter(|(x, _)| x.abs() >= cut)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>()
        * f.grid.dx();
    tail / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        Grid::new(1024, 8.0).unwrap()
    }

    fn gauss(d: f64) -> SampledSignal {
        sample(&SignalFamily::NormalizedGaussian { d }, &grid()).unwrap()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(15, 1.0).is_err());
        assert!(Grid::new(17, 1.0).is_err());
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        let g = Grid::new(16, 2.0).unwrap();
        assert_eq!(g.point(8), 0.0);
        assert_eq!(g.point(0), -2.0);
        assert_abs_diff_eq!(g.dual().dx(), 1.0 / (16.0 * g.dx()), epsilon = 1e-15);
        assert_eq!(g.dual().dual(), g);
    }

    #[test]
    fn gaussian_has_unit_norm() {
        assert_abs_diff_eq!(l2_norm(&gauss(1.0)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn indicator_norm() {
        let g = grid();
        let f = sample(&SignalFamily::Indicator { h: 1.0 }, &g).unwrap();
        assert!((energy(&f) - 2.0).abs() <= 2.0 * g.dx());
        assert!((l2_norm(&f) - 2f64.sqrt()).abs() <= g.dx());
    }

    #[test]
    fn zero_custom_signal() {
        let g = grid();
        let f = sample(&SignalFamily::Custom(vec![Complex64::new(0.0, 0.0); 1024]), &g).unwrap();
        assert_eq!(l2_norm(&f), 0.0);
        let bad = sample(&SignalFamily::Custom(vec![Complex64::new(0.0, 0.0); 10]), &g);
        assert!(matches!(bad, Err(Error::GridMismatch(_))));
    }

    #[test]
    fn rejects_bad_scales() {
        let g = grid();
        assert!(matches!(
            sample(&SignalFamily::NormalizedGaussian { d: 0.0 }, &g),
            Err(Error::InvalidParameter(_))
        ));
        assert!(sample(&SignalFamily::Indicator { h: -1.0 }, &g).is_err());
        assert!(dilate_l2(&gauss(1.0), 0.0).is_err());
        assert!(time_limit(&gauss(1.0), 0.0).is_err());
        assert!(band_limit(&gauss(1.0), -2.0).is_err());
    }

    #[test]
    fn inner_product_properties() {
        let f = gauss(1.0);
        let ff = inner(&f, &f).unwrap();
        assert_abs_diff_eq!(ff.re, energy(&f), epsilon = 1e-14);
        assert_abs_diff_eq!(ff.im, 0.0);

        let mf = modulate(&f, 2.0 * PI * 5.0).unwrap();
        assert!(inner(&f, &mf).unwrap().norm() < ff.norm());

        let odd = SampledSignal::from_real(
            grid(),
            &grid().points().map(|x| x * (-x * x).exp()).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_abs_diff_eq!(inner(&f, &odd).unwrap().norm(), 0.0, epsilon = 1e-14);

        let other = sample(&SignalFamily::NormalizedGaussian { d: 1.0 }, &Grid::new(512, 8.0).unwrap()).unwrap();
        assert!(matches!(inner(&f, &other), Err(Error::GridMismatch(_))));
        let spec = fourier(&f).unwrap();
        assert!(inner(&f, &spec.reinterpret(Domain::Frequency)).is_err());
    }

    #[test]
    fn gaussian_transform_is_dual_gaussian() {
        for d in [0.5, 1.0, 2.0] {
            let spec = fourier(&gauss(d)).unwrap();
            let expect: Vec<Complex64> = spec
                .grid()
                .points()
                .map(|w| Complex64::new(gaussian_value(w, 1.0 / d), 0.0))
                .collect();
            assert!(max_diff(spec.values(), &expect) < 1e-10, "d = {d}");
        }
    }

    #[test]
    fn indicator_transform_matches_sinc() {
        // Riemann-sum error ~ dx²·π/12, so this needs a fine grid.
        let g = Grid::new(8192, 4.0).unwrap();
        let f = sample(&SignalFamily::Indicator { h: 1.0 }, &g).unwrap();
        let spec = fourier(&f).unwrap();
        let w = 0.25;
        let k = spec.grid().points().position(|p| (p - w).abs() < 1e-12).unwrap();
        let expect = (2.0 * PI * w).sin() / (PI * w);
        assert!((spec.values()[k] - Complex64::new(expect, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn fourier_requires_time_domain() {
        let spec = fourier(&gauss(1.0)).unwrap();
        assert!(matches!(fourier(&spec), Err(Error::DomainError { .. })));
        assert!(inverse_fourier(&gauss(1.0)).is_err());
    }

    #[test]
    fn double_transform_reflects() {
        let f = translate(&gauss(0.7), 1.3).unwrap();
        let twice = fourier(&fourier(&f).unwrap().reinterpret(Domain::Time)).unwrap();
        let n = f.grid().n();
        // f(-x_j) = f(x_{n-j}); j = 0 maps to the (negligible) wrap sample.
        for j in 1..n {
            assert!((twice.values()[j] - f.values()[n - j]).norm() < 1e-8);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f = modulate(&gauss(1.2), 3.0).unwrap();
        let back = inverse_fourier(&fourier(&f).unwrap()).unwrap();
        assert!(max_diff(back.values(), f.values()) < 1e-12);
    }

    #[test]
    fn translation() {
        let f = gauss(1.0);
        assert_eq!(translate(&f, 0.0).unwrap(), f);
        let shifted = translate(&f, 0.37).unwrap();
        let expect: Vec<Complex64> = grid()
            .points()
            .map(|x| Complex64::new(gaussian_value(x - 0.37, 1.0), 0.0))
            .collect();
        assert!(max_diff(shifted.values(), &expect) < 1e-10);
        let whole = translate(&f, 2.0).unwrap();
        assert_eq!(whole.values()[512 + 128], f.values()[512]);
    }

    #[test]
    fn modulation_keeps_magnitude() {
        let f = gauss(1.0);
        let m = modulate(&f, 7.5).unwrap();
        for (a, b) in f.values().iter().zip(m.values()) {
            assert_abs_diff_eq!(a.norm(), b.norm(), epsilon = 1e-15);
        }
    }

    #[test]
    fn dilation_preserves_norm_and_inverts() {
        let f = gauss(1.0);
        let d = dilate_l2(&f, 2.0).unwrap();
        assert_abs_diff_eq!(l2_norm(&d), 1.0, epsilon = 1e-6);
        let expect: Vec<Complex64> = grid()
            .points()
            .map(|x| Complex64::new(gaussian_value(x, 2.0), 0.0))
            .collect();
        assert!(max_diff(d.values(), &expect) < 1e-9);
        let back = dilate_l2(&d, 0.5).unwrap();
        assert!(max_diff(back.values(), f.values()) < 1e-8);
        let s = dilate_unnormalized(&f, 1.5).unwrap();
        assert!((s.values()[512] - f.values()[512]).norm() < 1e-12);
    }

    #[test]
    fn projections() {
        let f = translate(&modulate(&gauss(0.8), 4.0).unwrap(), 0.3).unwrap();
        let g = modulate(&gauss(1.7), -2.0).unwrap();
        let once = time_limit(&f, 1.0).unwrap();
        assert_eq!(time_limit(&once, 1.0).unwrap(), once);
        assert!(l2_norm(&once) <= l2_norm(&f));

        let b = band_limit(&f, 0.6).unwrap();
        assert!(l2_norm(&b) <= l2_norm(&f));
        assert!(max_diff(band_limit(&b, 0.6).unwrap().values(), b.values()) < 1e-12);
        let lhs = inner(&b, &g).unwrap();
        let rhs = inner(&f, &band_limit(&g, 0.6).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
        let lhs = inner(&once, &g).unwrap();
        let rhs = inner(&f, &time_limit(&g, 1.0).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn hermite_functions_are_orthonormal_eigenfunctions() {
        // x_max = sqrt(n)/2 makes the grid its own dual.
        let g = Grid::new(1024, 16.0).unwrap();
        assert_eq!(g.dual(), g);
        let fns: Vec<SampledSignal> = (0..5)
            .map(|order| sample(&SignalFamily::HermiteGaussian { order, d: 1.0 }, &g).unwrap())
            .collect();
        for (i, a) in fns.iter().enumerate() {
            for (j, b) in fns.iter().enumerate() {
                let ip = inner(a, b).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
            // φ̂_n = (-i)^n φ_n
            let spec = fourier(a).unwrap();
            let factor = Complex64::new(0.0, -1.0).powu(i as u32);
            for (s, v) in spec.values().iter().zip(a.values()) {
                assert!((s - factor * v).norm() < 1e-10);
            }
        }
        assert_eq!(
            sample(&SignalFamily::HermiteGaussian { order: 0, d: 1.3 }, &g).unwrap(),
            sample(&SignalFamily::NormalizedGaussian { d: 1.3 }, &g).unwrap()
        );
    }

    #[test]
    fn tail_mass_diagnostic() {
        assert!(tail_mass(&gauss(1.0), 1.0 / 16.0) < 1e-12);
        let wide = gauss(6.0);
        assert!(tail_mass(&wide, 1.0 / 16.0) > 1e-6);
    }
}
