//! Seeded random test signals for the inequality checks.
//!
//! Out of every ten consecutive signals, four are Gaussian mixtures (a
//! single-component mixture is a centred Gaussian), three are translated and
//! modulated Gaussians and three are smoothed indicators. All are normalized
//! to unit energy.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::Result;
use crate::signal::{gaussian_value, l2_norm, Grid, SampledSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusKind {
    /// Centred, unmodulated Gaussian: the equality case of the second-moment
    /// inequality.
    PureGaussian,
    GaussianMixture,
    ModulatedGaussian,
    SmoothedIndicator,
}

impl CorpusKind {
    pub fn name(&self) -> &'static str {
        match self {
            CorpusKind::PureGaussian => "pure-gaussian",
            CorpusKind::GaussianMixture => "gaussian-mixture",
            CorpusKind::ModulatedGaussian => "modulated-gaussian",
            CorpusKind::SmoothedIndicator => "smoothed-indicator",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusSignal {
    pub index: usize,
    pub kind: CorpusKind,
    pub signal: SampledSignal,
}

/// Per-signal generator: stream `index` of the seeded ChaCha generator.
pub fn signal_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn normalized(grid: &Grid, values: Vec<Complex64>) -> Result<SampledSignal> {
    let f = SampledSignal::new(*grid, values, crate::signal::Domain::Time)?;
    let norm = l2_norm(&f);
    Ok(f.scaled(1.0 / norm))
}

fn corpus_signal(seed: u64, index: usize, grid: &Grid) -> Result<CorpusSignal> {
    let mut rng = signal_rng(seed, index);
    let (kind, values): (CorpusKind, Vec<Complex64>) = match index % 10 {
        0..=3 => {
            let m = rng.gen_range(1..=3usize);
            if m == 1 {
                let d = rng.gen_range(0.5..1.5);
                let v = grid.points().map(|x| Complex64::new(gaussian_value(x, d), 0.0)).collect();
                (CorpusKind::PureGaussian, v)
            } else {
                // Centres at least 0.8 apart keep the mixture visibly non-Gaussian.
                let spacing = rng.gen_range(0.8..2.0);
                let start = rng.gen_range(-1.5..0.0);
                let comps: Vec<(f64, f64, f64)> = (0..m)
                    .map(|i| {
                        let amp = rng.gen_range(0.3..1.0) * if rng.gen_bool(0.25) { -1.0 } else { 1.0 };
                        (start + spacing * i as f64, rng.gen_range(0.5..1.5), amp)
                    })
                    .collect();
                let v = grid
                    .points()
                    .map(|x| {
                        let s: f64 = comps.iter().map(|&(c, d, a)| a * gaussian_value(x - c, d)).sum();
                        Complex64::new(s, 0.0)
                    })
                    .collect();
                (CorpusKind::GaussianMixture, v)
            }
        }
        4..=6 => {
            let d = rng.gen_range(0.5..1.5);
            let x0 = rng.gen_range(-2.0..2.0);
            let freq = rng.gen_range(0.3..3.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            let b = 2.0 * PI * freq;
            let v = grid
                .points()
                .map(|x| Complex64::from_polar(gaussian_value(x - x0, d), b * x))
                .collect();
            (CorpusKind::ModulatedGaussian, v)
        }
        _ => {
            let h = rng.gen_range(0.3..2.0);
            let s = rng.gen_range(0.15..0.5);
            let v = grid
                .points()
                .map(|x| Complex64::new(0.5 * (erf((x + h) / s) - erf((x - h) / s)), 0.0))
                .collect();
            (CorpusKind::SmoothedIndicator, v)
        }
    };
    Ok(CorpusSignal {
        index,
        kind,
        signal: normalized(grid, values)?,
    })
}

/// `n` signals; signal `i` depends only on `(seed, i)`.
pub fn generate(n: usize, seed: u64, grid: &Grid) -> Result<Vec<CorpusSignal>> {
    (0..n).map(|i| corpus_signal(seed, i, grid)).collect()
}
