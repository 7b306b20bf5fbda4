//! Realizability of concentration pairs `(α, β)` and spreading pairs
//! `(γ, ζ)` for the indicator weights, given `λ₀`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Realizable,
    Impossible,
    OutsideDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    /// Clause (1..=4) of the characterization that decided the point; `None`
    /// outside the domain.
    pub condition_index: Option<u8>,
}

impl MembershipVerdict {
    fn outside() -> Self {
        Self {
            verdict: Verdict::OutsideDomain,
            condition_index: None,
        }
    }

    fn decide(clause: u8, holds: bool) -> Self {
        Self {
            verdict: if holds {
                Verdict::Realizable
            } else {
                Verdict::Impossible
            },
            condition_index: Some(clause),
        }
    }

    pub fn is_realizable(&self) -> bool {
        self.verdict == Verdict::Realizable
    }
}

fn in_unit_square(p: f64, q: f64) -> bool {
    (0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q)
}

fn valid_lambda0(lambda0: f64) -> bool {
    lambda0 > 0.0 && lambda0 < 1.0
}

/// Concentration-pair membership. Domain: the unit square without
/// `(0,1)`, `(1,0)` and `(1,1)`. Points on the boundary curve are realizable.
pub fn lp_membership(alpha: f64, beta: f64, lambda0: f64) -> MembershipVerdict {
    if !valid_lambda0(lambda0) || !in_unit_square(alpha, beta) {
        return MembershipVerdict::outside();
    }
    if [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)].contains(&(alpha, beta)) {
        return MembershipVerdict::outside();
    }
    let s = lambda0.sqrt();
    if alpha == 0.0 {
        MembershipVerdict::decide(1, beta < 1.0)
    } else if alpha < s {
        MembershipVerdict::decide(2, true)
    } else if alpha < 1.0 {
        MembershipVerdict::decide(3, alpha.acos() + beta.acos() >= s.acos())
    } else {
        MembershipVerdict::decide(4, beta > 0.0 && beta <= s)
    }
}

/// Spreading-pair membership. Domain: the unit square without `(0,0)`,
/// `(0,1)` and `(1,0)`.
pub fn lp_star_membership(gamma: f64, zeta: f64, lambda0: f64) -> MembershipVerdict {
    if !valid_lambda0(lambda0) || !in_unit_square(gamma, zeta) {
        return MembershipVerdict::outside();
    }
    if [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)].contains(&(gamma, zeta)) {
        return MembershipVerdict::outside();
    }
    let r = (1.0 - lambda0).sqrt();
    if gamma == 0.0 {
        MembershipVerdict::decide(1, zeta >= r && zeta < 1.0)
    } else if gamma <= r {
        let lhs = (1.0 - gamma * gamma).sqrt().acos() + (1.0 - zeta * zeta).sqrt().acos();
        MembershipVerdict::decide(2, lhs >= lambda0.sqrt().acos())
    } else if gamma < 1.0 {
        MembershipVerdict::decide(3, true)
    } else {
        MembershipVerdict::decide(4, true)
    }
}
