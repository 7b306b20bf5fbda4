//! The LP boundary as an arc of an ellipse centred at the origin.
//!
//! In concentration coordinates the arc satisfies
//! `α² + β² - 2√λ₀ αβ = 1 - λ₀`; in spreading coordinates the cross term
//! flips sign, `γ² + ζ² + 2√λ₀ γζ = 1 - λ₀`, which swaps the axes.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::boundary::CoordinateSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub major_axis_dir: [f64; 2],
    pub minor_axis_dir: [f64; 2],
    pub semi_major: f64,
    pub semi_minor: f64,
    pub foci: [[f64; 2]; 2],
}

impl EllipseParams {
    pub fn focal_distance(&self) -> f64 {
        self.foci[0][0].hypot(self.foci[0][1])
    }

    /// `|p - F₁| + |p - F₂|`.
    pub fn focal_sum(&self, p: (f64, f64)) -> f64 {
        self.foci
            .iter()
            .map(|f| (p.0 - f[0]).hypot(p.1 - f[1]))
            .sum()
    }
}

fn cross_sign(coords: CoordinateSystem) -> Result<f64> {
    match coords {
        CoordinateSystem::Concentration => Ok(-1.0),
        CoordinateSystem::Spreading => Ok(1.0),
        other => Err(Error::NotSupported(format!(
            "ellipse form exists only in concentration or spreading coordinates, not {other}"
        ))),
    }
}

pub fn ellipse_canonical(lambda0: f64, coords: CoordinateSystem) -> Result<EllipseParams> {
    if !(lambda0 > 0.0 && lambda0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda0 must lie in (0, 1), got {lambda0}"
        )));
    }
    let sign = cross_sign(coords)?;
    let s = lambda0.sqrt();
    let semi_major = ((1.0 - lambda0) / (1.0 - s)).sqrt();
    let semi_minor = ((1.0 - lambda0) / (1.0 + s)).sqrt();
    let diag = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    let anti = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
    let (major, minor) = if sign < 0.0 { (diag, anti) } else { (anti, diag) };
    let focus = 2f64.sqrt() * lambda0.powf(0.25);
    Ok(EllipseParams {
        major_axis_dir: major,
        minor_axis_dir: minor,
        semi_major,
        semi_minor,
        foci: [
            [focus * major[0], focus * major[1]],
            [-focus * major[0], -focus * major[1]],
        ],
    })
}

/// `(x² + y² ∓ 2√λ₀ xy) / (1 - λ₀)`, equal to 1 on the boundary.
pub fn quadratic_form(lambda0: f64, coords: CoordinateSystem, p: (f64, f64)) -> Result<f64> {
    let sign = cross_sign(coords)?;
    let (x, y) = p;
    Ok((x * x + y * y + sign * 2.0 * lambda0.sqrt() * x * y) / (1.0 - lambda0))
}
