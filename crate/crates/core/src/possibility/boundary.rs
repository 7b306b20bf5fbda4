//! Boundary curves of possibility maps and their curvature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::weights::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordinateSystem {
    /// `(α, β)`
    Concentration,
    /// `(α², β²)`
    ConcentrationSquared,
    /// `(γ, ζ)`
    Spreading,
    /// `(γ², ζ²)`
    SpreadingSquared,
    /// `(γᵐ, ζⁿ)`
    SpreadingPower { m: u32, n: u32 },
}

impl CoordinateSystem {
    pub fn spreading_power(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "power exponents must be at least 1, got ({m}, {n})"
            )));
        }
        Ok(Self::SpreadingPower { m, n })
    }

    fn is_spreading(&self) -> bool {
        !matches!(self, Self::Concentration | Self::ConcentrationSquared)
    }

    /// Maps a spreading pair `(γ, ζ)` into these coordinates.
    fn map_spreading(&self, g: f64, z: f64) -> Option<(f64, f64)> {
        match *self {
            Self::Spreading => Some((g, z)),
            Self::SpreadingSquared => Some((g * g, z * z)),
            Self::SpreadingPower { m, n } => Some((g.powi(m as i32), z.powi(n as i32))),
            _ => None,
        }
    }
}

impl fmt::Display for CoordinateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Concentration => write!(f, "concentration"),
            Self::ConcentrationSquared => write!(f, "concentration-squared"),
            Self::Spreading => write!(f, "spreading"),
            Self::SpreadingSquared => write!(f, "spreading-squared"),
            Self::SpreadingPower { m, n } => write!(f, "spreading-power:{m},{n}"),
        }
    }
}

impl FromStr for CoordinateSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concentration" => Ok(Self::Concentration),
            "concentration-squared" => Ok(Self::ConcentrationSquared),
            "spreading" => Ok(Self::Spreading),
            "spreading-squared" => Ok(Self::SpreadingSquared),
            other => {
                let bad = || Error::InvalidParameter(format!("unknown coordinate system '{other}'"));
                let rest = other.strip_prefix("spreading-power:").ok_or_else(bad)?;
                let (m, n) = rest.split_once(',').ok_or_else(bad)?;
                let m = m.trim().parse().map_err(|_| bad())?;
                let n = n.trim().parse().map_err(|_| bad())?;
                Self::spreading_power(m, n)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MapModel {
    /// Indicator weights, parameterized directly by `λ₀`.
    Lp { lambda0: f64 },
    /// Second-moment weights at scale product `c`.
    Hpw { c: f64 },
    /// `|x|^k` weights with constant `C` at scale product `c`.
    Homogeneous { k: u32, constant: f64, c: f64 },
}

impl MapModel {
    pub fn name(&self) -> &'static str {
        match self {
            MapModel::Lp { .. } => "lp",
            MapModel::Hpw { .. } => "hpw",
            MapModel::Homogeneous { .. } => "homogeneous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PossibilityBoundary {
    pub coords: CoordinateSystem,
    pub model: MapModel,
    pub points: Vec<(f64, f64)>,
    pub closed_form: Option<String>,
}

fn require_lambda0(lambda0: f64) -> Result<()> {
    if lambda0 > 0.0 && lambda0 < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "lambda0 must lie in (0, 1), got {lambda0}"
        )))
    }
}

/// Samples `arccos α + arccos β = arccos √λ₀` as
/// `θ ↦ (cos θ, cos(θ₀ - θ))`, `θ ∈ [0, θ₀]`, and maps it into `coords`
/// (spreading coordinates use `γ = sin θ`, `ζ = sin(θ₀ - θ)`).
pub fn lp_boundary(lambda0: f64, coords: CoordinateSystem, n_pts: usize) -> Result<PossibilityBoundary> {
    require_lambda0(lambda0)?;
    if n_pts < 2 {
        return Err(Error::InvalidParameter(format!("n_pts must be at least 2, got {n_pts}")));
    }
    let theta0 = lambda0.sqrt().acos();
    let points = (0..n_pts)
        .map(|i| {
            let t = if i + 1 == n_pts {
                theta0
            } else {
                theta0 * i as f64 / (n_pts - 1) as f64
            };
            let u = theta0 - t;
            match coords {
                CoordinateSystem::Concentration => (t.cos(), u.cos()),
                CoordinateSystem::ConcentrationSquared => (t.cos().powi(2), u.cos().powi(2)),
                _ => coords
                    .map_spreading(t.sin(), u.sin())
                    .expect("spreading coordinates"),
            }
        })
        .collect();
    Ok(PossibilityBoundary {
        coords,
        model: MapModel::Lp { lambda0 },
        points,
        closed_form: Some(format!("arccos(alpha) + arccos(beta) = arccos(sqrt({lambda0}))")),
    })
}

/// `ψ(γ, ζ) = 1 / (4πγζ)`.
pub fn hpw_psi(gamma: f64, zeta: f64) -> Result<f64> {
    require_positive("gamma", gamma)?;
    require_positive("zeta", zeta)?;
    Ok(1.0 / (4.0 * PI * gamma * zeta))
}

/// `ψ = C (γᵐ ζᵐ)^{-2/(km)}` evaluated on power coordinates `gm = γᵐ`,
/// `zm = ζᵐ`.
pub fn homogeneous_psi(k: u32, m: u32, constant: f64, gm: f64, zm: f64) -> Result<f64> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "k and m must be positive, got k = {k}, m = {m}"
        )));
    }
    require_positive("C", constant)?;
    require_positive("gm", gm)?;
    require_positive("zm", zm)?;
    Ok(constant * (gm * zm).powf(-2.0 / (k as f64 * m as f64)))
}

/// Level curve `γζ = product` sampled log-uniformly over four decades
/// centred on the symmetric point, ordered by increasing `γ`.
fn hyperbola(product: f64, coords: CoordinateSystem, n_pts: usize) -> Vec<(f64, f64)> {
    let mid = product.sqrt();
    (0..n_pts)
        .map(|i| {
            let s = -2.0 + 4.0 * i as f64 / (n_pts - 1) as f64;
            let g = mid * 10f64.powf(s);
            coords
                .map_spreading(g, product / g)
                .expect("spreading coordinates")
        })
        .collect()
}

/// Level-`c` boundary for one of the supported weight/model pairs.
pub fn map_slice(
    weights: (&WeightSpec, &WeightSpec),
    model: MapModel,
    coords: CoordinateSystem,
    n_pts: usize,
) -> Result<PossibilityBoundary> {
    if n_pts < 2 {
        return Err(Error::InvalidParameter(format!("n_pts must be at least 2, got {n_pts}")));
    }
    let unsupported = || {
        Error::NotSupported(format!(
            "{} model with weights ({:?}, {:?}) in {coords} coordinates",
            model.name(),
            weights.0,
            weights.1
        ))
    };
    match model {
        MapModel::Lp { lambda0 } => {
            if weights != (&WeightSpec::LpIndicator, &WeightSpec::LpIndicator) {
                return Err(unsupported());
            }
            lp_boundary(lambda0, coords, n_pts)
        }
        MapModel::Hpw { c } => {
            require_positive("c", c)?;
            let w = WeightSpec::Homogeneous(2);
            if weights != (&w, &w) || !coords.is_spreading() {
                return Err(unsupported());
            }
            Ok(PossibilityBoundary {
                coords,
                model,
                points: hyperbola(1.0 / (4.0 * PI * c), coords, n_pts),
                closed_form: Some(format!("gamma = 1 / (4 pi {c} zeta)")),
            })
        }
        MapModel::Homogeneous { k, constant, c } => {
            require_positive("c", c)?;
            require_positive("C", constant)?;
            let w = WeightSpec::Homogeneous(k);
            if k == 0 || weights != (&w, &w) || !coords.is_spreading() {
                return Err(unsupported());
            }
            Ok(PossibilityBoundary {
                coords,
                model,
                points: hyperbola((constant / c).powf(k as f64 / 2.0), coords, n_pts),
                closed_form: Some(format!("gamma zeta = ({constant} / {c})^({k}/2)")),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curvature {
    Convex,
    Concave,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// Second divided differences scaled by `Δx² / Δy` of the whole curve.
    pub second_differences: Vec<f64>,
    pub second_difference_signs: Vec<i8>,
    pub verdict: Curvature,
}

pub const CONVEXITY_TOL: f64 = 1e-10;

/// Curvature of the ordinate as a function of the abscissa.
pub fn convexity_report(boundary: &PossibilityBoundary) -> Result<ConvexityReport> {
    let mut pts = boundary.points.clone();
    if pts.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "need at least 5 points, got {}",
            pts.len()
        )));
    }
    if pts.windows(2).all(|p| p[1].0 < p[0].0) {
        pts.reverse();
    }
    if !pts.windows(2).all(|p| p[1].0 > p[0].0) {
        return Err(Error::InvalidInput("abscissa is not strictly monotone".into()));
    }
    let (x0, x1) = (pts[0].0, pts[pts.len() - 1].0);
    let (ylo, yhi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let y_span = if yhi > ylo { yhi - ylo } else { 1.0 };
    let scale = (x1 - x0).powi(2) / y_span;
    let second_differences: Vec<f64> = pts
        .windows(3)
        .map(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            let d = 2.0 * ((c.1 - b.1) / (c.0 - b.0) - (b.1 - a.1) / (b.0 - a.0)) / (c.0 - a.0);
            d * scale
        })
        .collect();
    let signs: Vec<i8> = second_differences
        .iter()
        .map(|&d| {
            if d > CONVEXITY_TOL {
                1
            } else if d < -CONVEXITY_TOL {
                -1
            } else {
                0
            }
        })
        .collect();
    let any_pos = signs.contains(&1);
    let any_neg = signs.contains(&-1);
    let verdict = match (any_pos, any_neg) {
        (true, false) => Curvature::Convex,
        (false, true) => Curvature::Concave,
        _ => Curvature::Mixed,
    };
    Ok(ConvexityReport {
        second_differences,
        second_difference_signs: signs,
        verdict,
    })
}
