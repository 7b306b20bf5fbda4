//! Margin checks of the uncertainty inequalities over a random corpus.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{generate, signal_rng, CorpusKind, CorpusSignal};
use crate::error::{Error, Result};
use crate::possibility::{verify_hpw, verify_lp_inequality, verify_lp_weak_inequality};
use crate::prolate::c_for_lambda0;
use crate::signal::Grid;

/// `λ₀` levels exercised by the LP suites.
pub const LP_LEVELS: [f64; 3] = [0.5, 0.7, 0.8];
pub const DEFAULT_MARGIN_FLOOR: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lp,
    LpWeak,
    Hpw,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Lp, Suite::LpWeak, Suite::Hpw];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lp => "lp",
            Suite::LpWeak => "lp_weak",
            Suite::Hpw => "hpw",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Suite::Lp),
            "lp_weak" | "lp-weak" => Ok(Suite::LpWeak),
            "hpw" => Ok(Suite::Hpw),
            _ => Err(Error::InvalidParameter(format!("unknown suite '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub n_signals: usize,
    pub seed: u64,
    pub grid: Grid,
    pub n_quad: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n_signals: 200,
            seed: 0,
            grid: Grid::new(2048, 12.0).expect("valid default grid"),
            n_quad: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    pub suite: Suite,
    pub index: usize,
    pub kind: CorpusKind,
    pub lambda0: Option<f64>,
    pub t: Option<f64>,
    pub omega: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub relative_margin: f64,
    /// Second-moment suite only.
    pub equality: Option<bool>,
    /// Weak LP suite only: `strong LHS <= √2 · weak LHS`.
    pub strong_within_sqrt2: Option<bool>,
}

impl MarginRow {
    pub fn violates(&self, floor: f64) -> bool {
        self.relative_margin.is_nan()
            || self.relative_margin < floor
            || self.strong_within_sqrt2 == Some(false)
    }
}

/// Half-width `T` drawn for an LP check of signal `index`; the band limit
/// is then `Ω = c / T`.
fn draw_t(seed: u64, index: usize) -> f64 {
    // Separate stream family from the corpus parameters.
    let mut rng = signal_rng(seed ^ 0x5eed_7a11_0000_0001, index);
    rng.gen_range(0.3..2.0)
}

fn lp_rows(suite: Suite, s: &CorpusSignal, levels: &[(f64, f64)], seed: u64) -> Result<Vec<MarginRow>> {
    let t = draw_t(seed, s.index);
    levels
        .iter()
        .map(|&(lambda0, c)| {
            let omega = c / t;
            let base = MarginRow {
                suite,
                index: s.index,
                kind: s.kind,
                lambda0: Some(lambda0),
                t: Some(t),
                omega: Some(omega),
                lhs: 0.0,
                rhs: 0.0,
                margin: 0.0,
                relative_margin: 0.0,
                equality: None,
                strong_within_sqrt2: None,
            };
            Ok(if suite == Suite::Lp {
                let r = verify_lp_inequality(&s.signal, t, omega, lambda0)?;
                MarginRow {
                    lhs: r.lhs,
                    rhs: r.rhs,
                    margin: r.margin,
                    relative_margin: r.relative_margin,
                    ..base
                }
            } else {
                let r = verify_lp_weak_inequality(&s.signal, t, omega, lambda0)?;
                MarginRow {
                    lhs: r.weak_lhs,
                    rhs: r.weak_rhs,
                    margin: r.weak_margin,
                    relative_margin: r.weak_relative_margin,
                    strong_within_sqrt2: Some(r.strong_within_sqrt2),
                    ..base
                }
            })
        })
        .collect()
}

/// Runs one suite over a freshly generated corpus. LP suites check every
/// signal at each level in [`LP_LEVELS`].
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<MarginRow>> {
    if cfg.n_signals == 0 {
        return Err(Error::InvalidParameter("n_signals must be at least 1".into()));
    }
    let corpus = generate(cfg.n_signals, cfg.seed, &cfg.grid)?;
    let levels: Vec<(f64, f64)> = match suite {
        Suite::Hpw => Vec::new(),
        _ => LP_LEVELS
            .iter()
            .map(|&l| c_for_lambda0(l, cfg.n_quad, 1e-12).map(|inv| (inv.lambda0, inv.c)))
            .collect::<Result<_>>()?,
    };
    let per_signal: Vec<Vec<MarginRow>> = corpus
        .par_iter()
        .map(|s| match suite {
            Suite::Hpw => {
                let r = verify_hpw(&s.signal)?;
                Ok(vec![MarginRow {
                    suite,
                    index: s.index,
                    kind: s.kind,
                    lambda0: None,
                    t: None,
                    omega: None,
                    lhs: r.product,
                    rhs: r.bound,
                    margin: r.margin,
                    relative_margin: r.relative_margin,
                    equality: Some(r.equality),
                    strong_within_sqrt2: None,
                }])
            }
            _ => lp_rows(suite, s, &levels, cfg.seed),
        })
        .collect::<Result<_>>()?;
    Ok(per_signal.into_iter().flatten().collect())
}
