//! Direct checks of the uncertainty inequalities on concrete signals.
//!
//! `omega` is an angular band limit: the frequency tail is the energy of `f̂`
//! outside `|ω| <= omega / 2π`, matching `c = ΩT` in the eigenvalue problem.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::signal::{energy, fourier, SampledSignal};
use crate::spreading::{gamma, tail_bound, zeta, TAIL_FLAG_THRESHOLD};
use crate::weights::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpMarginReport {
    pub t: f64,
    pub omega: f64,
    /// `ΩT`.
    pub c: f64,
    pub lambda0: f64,
    pub norm: f64,
    /// `(∫_{|x|>T} |f|²)^{1/2}`
    pub time_tail: f64,
    /// `(∫_{|ω|>Ω/2π} |f̂|²)^{1/2}`
    pub freq_tail: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// `margin / ‖f‖`
    pub relative_margin: f64,
}

fn tails(f: &SampledSignal, t: f64, omega: f64, lambda0: f64) -> Result<(f64, f64, f64)> {
    require_positive("T", t)?;
    require_positive("Omega", omega)?;
    if !(lambda0 > 0.0 && lambda0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda0 must lie in (0, 1), got {lambda0}"
        )));
    }
    let norm = energy(f).sqrt();
    let lp = WeightSpec::LpIndicator;
    let time_tail = gamma(f, &lp, t)? * norm;
    let freq_tail = zeta(f, &lp, omega / (2.0 * PI))? * norm;
    Ok((norm, time_tail, freq_tail))
}

/// `‖f‖_{|x|>T} + ‖f̂‖_{|ω|>Ω/2π} >= √(1-λ₀) ‖f‖`.
pub fn verify_lp_inequality(f: &SampledSignal, t: f64, omega: f64, lambda0: f64) -> Result<LpMarginReport> {
    let (norm, time_tail, freq_tail) = tails(f, t, omega, lambda0)?;
    let lhs = time_tail + freq_tail;
    let rhs = (1.0 - lambda0).sqrt() * norm;
    Ok(LpMarginReport {
        t,
        omega,
        c: omega * t,
        lambda0,
        norm,
        time_tail,
        freq_tail,
        lhs,
        rhs,
        margin: lhs - rhs,
        relative_margin: (lhs - rhs) / norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakLpMarginReport {
    pub base: LpMarginReport,
    /// `(‖f‖²_{|x|>T} + ‖f̂‖²_{|ω|>Ω/2π})^{1/2}`
    pub weak_lhs: f64,
    /// `√(1-√λ₀) ‖f‖`, the sharp lower bound for the sum of squared tails.
    pub weak_rhs: f64,
    pub weak_margin: f64,
    pub weak_relative_margin: f64,
    /// `√(1-λ₀) ‖f‖`: the larger bound sometimes quoted for the weak form.
    /// It fails for signals near the optimal arc, so it is reported only.
    pub quoted_rhs: f64,
    pub quoted_margin: f64,
    /// Whether `strong LHS <= √2 · weak LHS`.
    pub strong_within_sqrt2: bool,
}

pub fn verify_lp_weak_inequality(
    f: &SampledSignal,
    t: f64,
    omega: f64,
    lambda0: f64,
) -> Result<WeakLpMarginReport> {
    let base = verify_lp_inequality(f, t, omega, lambda0)?;
    let weak_lhs = base.time_tail.hypot(base.freq_tail);
    let weak_rhs = (1.0 - lambda0.sqrt()).sqrt() * base.norm;
    let quoted_rhs = base.rhs;
    Ok(WeakLpMarginReport {
        base,
        weak_lhs,
        weak_rhs,
        weak_margin: weak_lhs - weak_rhs,
        weak_relative_margin: (weak_lhs - weak_rhs) / base.norm,
        quoted_rhs,
        quoted_margin: weak_lhs - quoted_rhs,
        strong_within_sqrt2: base.lhs <= SQRT_2 * weak_lhs * (1.0 + 1e-15),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpwMarginReport {
    pub energy: f64,
    /// `(∫x²|f|²)^{1/2}`
    pub time_moment: f64,
    /// `(∫ω²|f̂|²)^{1/2}`
    pub freq_moment: f64,
    pub product: f64,
    /// `‖f‖² / 4π`
    pub bound: f64,
    pub margin: f64,
    /// `margin / ‖f‖²`
    pub relative_margin: f64,
    pub equality: bool,
}

pub const HPW_EQUALITY_TOL: f64 = 1e-6;

/// Centred second-moment inequality `(∫x²|f|²)^{1/2}(∫ω²|f̂|²)^{1/2} >= ‖f‖²/4π`.
pub fn verify_hpw(f: &SampledSignal) -> Result<HpwMarginReport> {
    let w = WeightSpec::Homogeneous(2);
    let time_diag = tail_bound(f, &w, 1.0)?;
    let freq_diag = tail_bound(&fourier(f)?, &w, 1.0)?;
    let worst = time_diag.bound.max(freq_diag.bound);
    if worst > TAIL_FLAG_THRESHOLD {
        return Err(Error::TailWarning {
            bound: worst,
            threshold: TAIL_FLAG_THRESHOLD,
        });
    }
    let e = energy(f);
    let norm = e.sqrt();
    let time_moment = gamma(f, &w, 1.0)? * norm;
    let freq_moment = zeta(f, &w, 1.0)? * norm;
    let product = time_moment * freq_moment;
    let bound = e / (4.0 * PI);
    let margin = product - bound;
    Ok(HpwMarginReport {
        energy: e,
        time_moment,
        freq_moment,
        product,
        bound,
        margin,
        relative_margin: margin / e,
        equality: margin.abs() <= HPW_EQUALITY_TOL * e,
    })
}
