//! Even weight functions `w(x)` used by the spreading functionals, their
//! dilations `S_a w(x) = w(x/a)`, a numerical classifier for the two weight
//! families (finite limit / polynomial divergence), and the growth bound
//! `C(h, x*) = sup_{x >= x*} w(x+h)/w(x)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Piecewise-linear weight given on `0 <= x_0 < x_1 < ...`; constant beyond
/// the last node and mirrored to negative `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedWeight {
    xs: Vec<f64>,
    ws: Vec<f64>,
}

impl TabulatedWeight {
    pub fn new(xs: Vec<f64>, ws: Vec<f64>) -> Result<Self> {
        if xs.len() != ws.len() || xs.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least two (x, w) pairs of equal length, got {} and {}",
                xs.len(),
                ws.len()
            )));
        }
        if xs[0] < 0.0 || xs.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidInput(
                "tabulated x must be non-negative and strictly increasing".into(),
            ));
        }
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput(
                "tabulated weights must be finite and non-negative".into(),
            ));
        }
        Ok(Self { xs, ws })
    }

    /// Reads a two-column `x,w` CSV. Blank lines, `#` comments and a
    /// non-numeric header row are skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected two columns",
                    line_no + 1
                )));
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(w)) => {
                    xs.push(x);
                    ws.push(w);
                }
                _ if xs.is_empty() => continue, // header
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "line {}: could not parse '{line}'",
                        line_no + 1
                    )))
                }
            }
        }
        Self::new(xs, ws)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_csv_str(&text)
    }

    /// Tabulates `f` on the given non-negative nodes.
    pub fn from_fn(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let ws = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, ws)
    }

    pub fn x_last(&self) -> f64 {
        *self.xs.last().expect("validated non-empty")
    }

    fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        let last = self.xs.len() - 1;
        if x <= self.xs[0] {
            return self.ws[0];
        }
        if x >= self.xs[last] {
            return self.ws[last];
        }
        let i = self.xs.partition_point(|&p| p <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ws[i] + t * (self.ws[i + 1] - self.ws[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightSpec {
    /// 1 for `|x| > 1`, 0 otherwise.
    LpIndicator,
    /// `|x|^k`.
    Homogeneous(u32),
    Tabulated(TabulatedWeight),
}

impl WeightSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WeightSpec::LpIndicator => lp_indicator(x),
            WeightSpec::Homogeneous(k) => x.abs().powi(*k as i32),
            WeightSpec::Tabulated(t) => t.eval(x),
        }
    }

    /// Homogeneity degree, when the weight has one.
    pub fn degree(&self) -> Option<u32> {
        match self {
            WeightSpec::Homogeneous(k) => Some(*k),
            _ => None,
        }
    }
}

pub(crate) fn lp_indicator(x: f64) -> f64 {
    if x.abs() > 1.0 {
        1.0
    } else {
        0.0
    }
}

/// `S_a w(x) = w(x/a)`.
pub fn eval_scaled(w: &WeightSpec, a: f64, x: f64) -> Result<f64> {
    require_positive("a", a)?;
    Ok(w.eval(x / a))
}

/// `C(h, x*) = sup{ w(x+h)/w(x) : x >= x* }`, probed on a uniform grid over
/// `[x*, probe_max]` and combined with the analytic tail limit. Returns
/// `f64::INFINITY` when any probed ratio divides by a vanishing weight.
pub fn c_bound(w: &WeightSpec, h: f64, x_star: f64, probe_max: f64) -> Result<f64> {
    require_positive("h", h)?;
    require_positive("x_star", x_star)?;
    if !(probe_max.is_finite() && probe_max > x_star) {
        return Err(Error::InvalidParameter(format!(
            "probe_max ({probe_max}) must exceed x_star ({x_star})"
        )));
    }
    const PROBES: usize = 4000;
    // Every supported family has w(x+h)/w(x) → 1 as x → ∞.
    let mut sup = 1.0f64;
    for i in 0..=PROBES {
        let x = x_star + (probe_max - x_star) * i as f64 / PROBES as f64;
        let (num, den) = (w.eval(x + h), w.eval(x));
        if den == 0.0 {
            if num > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        sup = sup.max(num / den);
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    /// Right end of the probe range `[0, x_max]`.
    pub x_max: f64,
    /// Uniform probe points used for continuity/monotonicity checks.
    pub n_points: usize,
    /// Shifts `h` tested for the finiteness of `C(h, x*)`.
    pub h_values: Vec<f64>,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self {
            x_max: 1000.0,
            n_points: 20_001,
            h_values: vec![0.1, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailBehavior {
    FiniteLimit { limit: f64 },
    PolynomialDivergence { degree_estimate: f64 },
    Inconclusive { slope: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub vanishes_at_zero: bool,
    pub continuous: bool,
    /// Largest jump that survived repeated bisection.
    pub persistent_jump: f64,
    pub even: bool,
    pub strictly_increasing: bool,
    pub tail: TailBehavior,
    pub c_bound_finite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightClassKind {
    Type1 { limit: f64 },
    TypeInfinity,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClass {
    pub class: WeightClassKind,
    pub probe_report: ProbeReport,
}

fn loglog_slope(w: &WeightSpec, lo: f64, hi: f64) -> f64 {
    const M: usize = 64;
    let pts: Vec<(f64, f64)> = (0..M)
        .map(|i| {
            let x = lo * (hi / lo).powf(i as f64 / (M - 1) as f64);
            (x.ln(), w.eval(x).ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / M as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / M as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

const MAX_POLY_DEGREE: f64 = 64.0;

fn probe_tail(w: &WeightSpec, x_max: f64) -> TailBehavior {
    let (far, near) = (x_max, x_max / 10.0);
    if w.eval(near / 10.0) <= 0.0 {
        return TailBehavior::Inconclusive { slope: f64::NAN };
    }
    let slope = loglog_slope(w, near, far);
    let earlier = loglog_slope(w, near / 10.0, near);
    let rel_change = (w.eval(far) - w.eval(near)) / w.eval(far);
    if slope.abs() < 1e-2 && rel_change.abs() < 1e-2 {
        TailBehavior::FiniteLimit { limit: w.eval(far) }
    } else if (0.5..=MAX_POLY_DEGREE).contains(&slope) && slope <= earlier + 0.1 {
        // A growth rate that is not accelerating is treated as polynomial.
        TailBehavior::PolynomialDivergence {
            degree_estimate: slope,
        }
    } else {
        TailBehavior::Inconclusive { slope }
    }
}

/// Numerical evidence for the weight class. Never guesses: any inconclusive
/// probe yields [`WeightClassKind::Unclassified`].
pub fn classify(w: &WeightSpec, probe: &ProbeParams) -> Result<WeightClass> {
    if !(probe.x_max.is_finite() && probe.x_max > 0.0) || probe.n_points < 3 {
        return Err(Error::InvalidParameter(format!(
            "empty probe range (x_max = {}, n_points = {})",
            probe.x_max, probe.n_points
        )));
    }
    let n = probe.n_points;
    let xs: Vec<f64> = (0..n)
        .map(|i| probe.x_max * i as f64 / (n - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| w.eval(x)).collect();

    let vanishes_at_zero = w.eval(0.0).abs() <= 1e-12;
    let even = xs.iter().all(|&x| {
        let (a, b) = (w.eval(x), w.eval(-x));
        (a - b).abs() <= 1e-12 * a.abs().max(1.0)
    });
    let strictly_increasing = vals.windows(2).all(|p| p[1] > p[0]);

    // Bisect into the largest jump; a continuous weight's jump collapses.
    let (mut lo, mut hi, initial_jump) = vals
        .windows(2)
        .enumerate()
        .map(|(i, p)| (xs[i], xs[i + 1], (p[1] - p[0]).abs()))
        .fold((0.0, 0.0, -1.0), |acc, item| if item.2 > acc.2 { item } else { acc });
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        if (w.eval(mid) - w.eval(lo)).abs() >= (w.eval(hi) - w.eval(mid)).abs() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let persistent_jump = (w.eval(hi) - w.eval(lo)).abs();
    let continuous = !(persistent_jump > 1e-9 && persistent_jump > 0.25 * initial_jump);

    let tail = probe_tail(w, probe.x_max);
    let c_bound_finite = probe.h_values.iter().all(|&h| {
        [1.0, probe.x_max / 10.0].iter().any(|&x0| {
            x0 < probe.x_max
                && c_bound(w, h, x0, probe.x_max)
                    .map(f64::is_finite)
                    .unwrap_or(false)
        })
    });

    let probe_report = ProbeReport {
        vanishes_at_zero,
        continuous,
        persistent_jump,
        even,
        strictly_increasing,
        tail,
        c_bound_finite,
    };
    let basic = vanishes_at_zero && continuous && even && strictly_increasing;
    let class = match (basic, tail) {
        (true, TailBehavior::FiniteLimit { limit }) => WeightClassKind::Type1 { limit },
        (true, TailBehavior::PolynomialDivergence { .. }) if c_bound_finite => {
            WeightClassKind::TypeInfinity
        }
        _ => WeightClassKind::Unclassified,
    };
    Ok(WeightClass {
        class,
        probe_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn saturating() -> WeightSpec {
        // x²/(1+x²): continuous, even, increasing, limit 1.
        let xs: Vec<f64> = (0..=4000)
            .map(|i| if i == 0 { 0.0 } else { 1e-3 * 1e7f64.powf(i as f64 / 4000.0) })
            .collect();
        WeightSpec::Tabulated(TabulatedWeight::from_fn(xs, |x| x * x / (1.0 + x * x)).unwrap())
    }

    #[test]
    fn scaled_evaluation() {
        let lp = WeightSpec::LpIndicator;
        assert_eq!(eval_scaled(&lp, 3.0, 2.0).unwrap(), 0.0);
        assert_eq!(eval_scaled(&lp, 3.0, 4.0).unwrap(), 1.0);
        assert_eq!(eval_scaled(&lp, 3.0, -4.0).unwrap(), 1.0);
        assert_eq!(eval_scaled(&WeightSpec::Homogeneous(2), 2.0, 4.0).unwrap(), 4.0);
        assert_eq!(eval_scaled(&WeightSpec::Homogeneous(3), 1.7, 0.0).unwrap(), 0.0);
        assert!(matches!(
            eval_scaled(&lp, 0.0, 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn homogeneous_scaling_law() {
        for k in 1..=6 {
            let w = WeightSpec::Homogeneous(k);
            for &(a, x) in &[(0.5, 1.3), (2.0, -4.0), (3.7, 0.25)] {
                let lhs = eval_scaled(&w, a, x).unwrap();
                let rhs = a.powi(-(k as i32)) * w.eval(x);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
                let g: f64 = 1.9;
                assert_relative_eq!(w.eval(g * x), g.powi(k as i32) * w.eval(x), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn classify_homogeneous_as_type_infinity() {
        let report = classify(&WeightSpec::Homogeneous(2), &ProbeParams::default()).unwrap();
        assert_eq!(report.class, WeightClassKind::TypeInfinity, "{report:?}");
        match report.probe_report.tail {
            TailBehavior::PolynomialDivergence { degree_estimate } => {
                assert!((degree_estimate - 2.0).abs() < 1e-6)
            }
            other => panic!("unexpected tail {other:?}"),
        }
    }

    #[test]
    fn classify_saturating_as_type1() {
        let report = classify(&saturating(), &ProbeParams::default()).unwrap();
        match report.class {
            WeightClassKind::Type1 { limit } => assert!((limit - 1.0).abs() < 1e-5),
            other => panic!("expected Type1, got {other:?}"),
        }
    }

    #[test]
    fn lp_indicator_is_unclassified() {
        let report = classify(&WeightSpec::LpIndicator, &ProbeParams::default()).unwrap();
        assert_eq!(report.class, WeightClassKind::Unclassified);
        assert!(!report.probe_report.continuous);
        assert!(!report.probe_report.strictly_increasing);
    }

    #[test]
    fn exponential_growth_is_not_type_infinity() {
        let xs: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.05).collect();
        let w = WeightSpec::Tabulated(
            TabulatedWeight::from_fn(xs, |x| x.exp() - 1.0).unwrap(),
        );
        let probe = ProbeParams {
            x_max: 90.0,
            ..ProbeParams::default()
        };
        assert_eq!(classify(&w, &probe).unwrap().class, WeightClassKind::Unclassified);
    }

    #[test]
    fn classify_rejects_empty_probe() {
        let probe = ProbeParams {
            x_max: 0.0,
            ..ProbeParams::default()
        };
        assert!(matches!(
            classify(&WeightSpec::Homogeneous(2), &probe),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn growth_bound_values() {
        let w = WeightSpec::Homogeneous(2);
        assert_eq!(c_bound(&w, 1.0, 1.0, 100.0).unwrap(), 4.0);
        let tiny = c_bound(&w, 1e-6, 1.0, 100.0).unwrap();
        assert!(tiny > 1.0 && tiny < 1.0 + 1e-5);
        assert_eq!(
            c_bound(&WeightSpec::LpIndicator, 1.0, 0.5, 10.0).unwrap(),
            f64::INFINITY
        );
        assert!(c_bound(&w, 1.0, 2.0, 1.0).is_err());
        assert!(c_bound(&w, 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn growth_bound_monotonicity() {
        for w in [WeightSpec::Homogeneous(2), WeightSpec::Homogeneous(5), saturating()] {
            let mut prev = f64::INFINITY;
            for x_star in [0.5, 1.0, 2.0, 5.0, 20.0] {
                let c = c_bound(&w, 0.7, x_star, 200.0).unwrap();
                assert!(c <= prev, "non-increasing in x*");
                prev = c;
            }
            let mut prev = 0.0;
            for h in [0.1, 0.5, 1.0, 3.0] {
                let c = c_bound(&w, h, 1.0, 200.0).unwrap();
                assert!(c >= prev, "non-decreasing in h");
                prev = c;
            }
        }
    }

    #[test]
    fn tabulated_csv() {
        let text = "# weights\nx,w\n0,0\n1,0.5\n2,0.75\n";
        let t = TabulatedWeight::from_csv_str(text).unwrap();
        let w = WeightSpec::Tabulated(t);
        assert_eq!(w.eval(0.5), 0.25);
        assert_eq!(w.eval(-1.5), 0.625);
        assert_eq!(w.eval(10.0), 0.75);
        assert!(TabulatedWeight::from_csv_str("0,0\n1,1\n0.5,2\n").is_err());
        assert!(TabulatedWeight::from_csv_str("0,0\n1,x\n").is_err());
        assert!(TabulatedWeight::from_csv_str("0,0,1\n").is_err());
    }
}
