//! Possibility maps: which spreading or concentration pairs a single signal
//! can realize at a given scale product, and checks of the inequalities that
//! bound them.

mod boundary;
mod ellipse;
mod membership;
mod verify;

pub use boundary::{
    convexity_report, homogeneous_psi, hpw_psi, lp_boundary, map_slice, ConvexityReport,
    CoordinateSystem, Curvature, MapModel, PossibilityBoundary, CONVEXITY_TOL,
};
pub use ellipse::{ellipse_canonical, quadratic_form, EllipseParams};
pub use membership::{lp_membership, lp_star_membership, MembershipVerdict, Verdict};
pub use verify::{
    verify_hpw, verify_lp_inequality, verify_lp_weak_inequality, HpwMarginReport, LpMarginReport,
    WeakLpMarginReport, HPW_EQUALITY_TOL,
};
