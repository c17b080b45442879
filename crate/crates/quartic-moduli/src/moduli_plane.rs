//! The `(L, K)` plane: the vector field 𝒱, the boundary graphs `u`, `v`, `w`, `m`,
//! region membership, first integrals, and flowing a point to its class label.
//!
//! 𝒱 is even in `L` in its first component and odd in its second, so everything
//! here works with `|L|` and reports canonical points with `L ≥ 0`.

use serde::{Deserialize, Serialize};

use crate::constants::{self, l_b, K_A, K_B, K_W1};
use crate::error::{Error, Result};
use crate::ode::{Dopri, Stop};

/// Tolerance for matching fixed points and boundary graphs.
pub const EPS_REGION: f64 = 1e-9;

/// Distances to a boundary graph below this are rounding noise, not proximity.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuliPoint {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl ModuliPoint {
    pub const fn new(l: f64, k: f64) -> Self {
        Self { l, k }
    }

    pub fn abs_l(self) -> Self {
        Self::new(self.l.abs(), self.k)
    }

    pub fn dist(self, other: ModuliPoint) -> f64 {
        (self.l - other.l).hypot(self.k - other.k)
    }
}

/// `𝒱 = (9/2 L² + 4K − 1) ∂_L + L(6K + 1/2) ∂_K`.
pub fn field(p: ModuliPoint) -> (f64, f64) {
    (4.5 * p.l * p.l + 4.0 * p.k - 1.0, p.l * (6.0 * p.k + 0.5))
}

/// The three zeros of 𝒱.
pub fn fixed_points() -> [ModuliPoint; 3] {
    [ModuliPoint::new(0.0, K_A), ModuliPoint::new(l_b(), K_B), ModuliPoint::new(-l_b(), K_B)]
}

/// `u(K) = √2/(3√3) √(1 − 36K + √((1+12K)³))` for `K ≥ −1/12`; the lower branch on
/// `K < 1/4`, the upper one beyond.
pub fn boundary_u(k: f64) -> Result<f64> {
    if !(k >= K_B) {
        return Err(Error::DomainError { what: "u(K) needs K >= -1/12", value: k });
    }
    let s = 1.0 + 12.0 * k;
    let inner = (1.0 - 36.0 * k + (s * s * s).sqrt()).max(0.0);
    Ok(2f64.sqrt() / (3.0 * 3f64.sqrt()) * inner.sqrt())
}

/// `v(K) = 4√(−2K)/3` for `K ≤ −1/12`.
pub fn boundary_v(k: f64) -> Result<f64> {
    if !(k <= K_B) {
        return Err(Error::DomainError { what: "v(K) needs K <= -1/12", value: k });
    }
    Ok(4.0 * (-2.0 * k).sqrt() / 3.0)
}

/// `w(K) = √(6 − 216K)/9` for `K ≤ −1/12`.
pub fn boundary_w(k: f64) -> Result<f64> {
    if !(k <= K_B) {
        return Err(Error::DomainError { what: "w(K) needs K <= -1/12", value: k });
    }
    Ok((6.0 - 216.0 * k).sqrt() / 9.0)
}

/// `∂_K u = 6(−2 + √(1+12K)) / √(6 − 216K + 6√((1+12K)³))`.
pub fn boundary_u_slope(k: f64) -> Result<f64> {
    if !(k > K_B) {
        return Err(Error::DomainError { what: "u'(K) needs K > -1/12", value: k });
    }
    let s = 1.0 + 12.0 * k;
    Ok(6.0 * (-2.0 + s.sqrt()) / (6.0 - 216.0 * k + 6.0 * (s * s * s).sqrt()).sqrt())
}

/// `∂_K w = −12/√(6 − 216K)`.
pub fn boundary_w_slope(k: f64) -> Result<f64> {
    if !(k <= K_B) {
        return Err(Error::DomainError { what: "w'(K) needs K <= -1/12", value: k });
    }
    Ok(-12.0 / (6.0 - 216.0 * k).sqrt())
}

/// `U`, the `K` at which the upper branch of `u` reaches `L = 1`.
pub fn constant_u() -> f64 {
    constants::constant_u()
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    FixedPoint_A,
    FixedPoint_B,
    UGraph_Lower,
    UGraph_Upper,
    WGraph,
    MGraph,
    ClosedInterior_Upper,
    ClosedInterior_Lower,
    ClosedAxis,
    Incomplete_WExterior,
    Incomplete_Wedge,
    Incomplete_AboveBell,
    NoHyperbolicStructure,
}

impl RegionTag {
    /// Whether the maximal curve of a point with this tag is closed.
    pub fn is_closed(self) -> bool {
        use RegionTag::*;
        matches!(
            self,
            FixedPoint_A | FixedPoint_B | UGraph_Lower | ClosedInterior_Upper | ClosedInterior_Lower | ClosedAxis
        )
    }
}

/// A region tag with the signed distance to the nearest boundary (positive on the
/// side of larger `|L|` or larger `K`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub tag: RegionTag,
    pub signed_distance: f64,
    pub near_boundary: bool,
}

pub fn region(p: ModuliPoint) -> Region {
    region_with_tol(p, EPS_REGION)
}

pub fn region_with_tol(p: ModuliPoint, eps: f64) -> Region {
    use RegionTag::*;
    if !(p.l.is_finite() && p.k.is_finite()) {
        return Region { tag: NoHyperbolicStructure, signed_distance: f64::NAN, near_boundary: false };
    }
    let q = p.abs_l();
    let (a, k) = (q.l, q.k);

    let mut nearest = f64::INFINITY;
    let mut consider = |d: f64| {
        if d.abs() < nearest.abs() {
            nearest = d;
        }
    };
    let fa = ModuliPoint::new(0.0, K_A);
    let fb = ModuliPoint::new(l_b(), K_B);
    consider(q.dist(fa));
    consider(q.dist(fb));
    consider(k - K_B);
    if k <= K_B {
        consider(a - boundary_w(k).unwrap());
    } else {
        consider(a - boundary_u(k).unwrap());
    }
    // a point that sits on a graph up to rounding is unambiguous
    let near_boundary = nearest.abs() < 10.0 * eps && nearest.abs() > EXACT_TOL;
    let finish = |tag: RegionTag| Region { tag, signed_distance: nearest, near_boundary };

    if q.dist(fa) <= eps {
        return finish(FixedPoint_A);
    }
    if q.dist(fb) <= eps {
        return finish(FixedPoint_B);
    }
    if (k - K_B).abs() <= eps {
        return finish(if a < l_b() { ClosedAxis } else { MGraph });
    }
    if k < K_B {
        let w = boundary_w(k).unwrap();
        return finish(if (a - w).abs() <= eps {
            WGraph
        } else if a < w {
            ClosedInterior_Lower
        } else {
            Incomplete_WExterior
        });
    }
    let u = boundary_u(k).unwrap();
    let on_graph = (a - u).abs() <= eps;
    let tag = if k <= K_A {
        if on_graph {
            UGraph_Lower
        } else if a < u {
            ClosedInterior_Upper
        } else {
            Incomplete_Wedge
        }
    } else if on_graph {
        UGraph_Upper
    } else if a < u {
        Incomplete_AboveBell
    } else {
        Incomplete_Wedge
    };
    finish(tag)
}

/// Which closed-form first integral applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `K < −1/12` with `|L| < w(K)`, coordinate `φ = L/w(K)`.
    Lower,
    /// `−1/12 < K < 1/4` with `|L| < u(K)`.
    Bell,
    /// `K > 1/4` with `|L| < u(K)`.
    AboveBell,
}

/// Coordinates `(φ, ψ)` after straightening the boundary graph, with the
/// conserved value `c` and the integrand `J(ψ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub chart: Chart,
    pub phi: f64,
    pub psi: f64,
    pub c: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

fn lower_axis_value(s: f64) -> f64 {
    (4.0 + 3.0 * s) / s.powf(1.5)
}

fn u_axis_value(s: f64) -> f64 {
    1.0 + (4.0 - 3.0 * s) / s.powf(1.5)
}

pub fn first_integral(p: ModuliPoint) -> Result<FlowState> {
    let q = p.abs_l();
    let (a, k) = (q.l, q.k);
    let reg = region(p);
    match reg.tag {
        RegionTag::ClosedInterior_Lower => {
            let phi = a / boundary_w(k)?;
            let s = -(1.0 + 12.0 * k);
            let c = (1.0 - phi * phi) * lower_axis_value(s);
            let j = -27.0 * (1.0 - 4.0 * k) / ((1.0 + 12.0 * k) * (1.0 - 36.0 * k));
            Ok(FlowState { chart: Chart::Lower, phi: p.l.signum() * phi, psi: k, c, j })
        }
        RegionTag::ClosedInterior_Upper | RegionTag::Incomplete_AboveBell => {
            let phi = a / boundary_u(k)?;
            let s = 1.0 + 12.0 * k;
            let c = (1.0 - phi * phi) * u_axis_value(s);
            let j = -27.0 * (1.0 - 4.0 * k) / (s * (1.0 - 36.0 * k + (s * s * s).sqrt()));
            let chart = if k < K_A { Chart::Bell } else { Chart::AboveBell };
            Ok(FlowState { chart, phi: p.l.signum() * phi, psi: k, c, j })
        }
        _ => Err(Error::DomainError { what: "first integral undefined for this region", value: k }),
    }
}

/// Bisection in `ln s` for a monotone function on `(lo, hi)`.
fn solve_monotone(g: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64, increasing: bool) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        let above = g(m.exp()) > target;
        if above == increasing {
            b = m;
        } else {
            a = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    (0.5 * (a + b)).exp()
}

/// `K̃` where the level set `c` of the given chart meets `L = 0`.
pub fn axis_crossing(chart: Chart, c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::DomainError { what: "first-integral level must be positive", value: c });
    }
    Ok(match chart {
        Chart::Lower => {
            let s = solve_monotone(lower_axis_value, c, 1e-300_f64.max(f64::MIN_POSITIVE), 1e300, false);
            -(1.0 + s) / 12.0
        }
        Chart::Bell => {
            let s = solve_monotone(u_axis_value, c, 1e-200, 4.0, false);
            (s - 1.0) / 12.0
        }
        Chart::AboveBell => {
            if c >= 1.0 {
                return Err(Error::DomainError { what: "above-bell level must lie in (0, 1)", value: c });
            }
            let s = solve_monotone(u_axis_value, c, 4.0, 1e200, true);
            (s - 1.0) / 12.0
        }
    })
}

/// How a canonical point was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The point is itself a fixed point or lies on an invariant graph with a fixed label.
    Exact,
    FirstIntegral(FlowState),
    Trajectory { arc_length: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Canonical {
    pub class_point: ModuliPoint,
    pub region: Region,
    pub certificate: Certificate,
}

/// Arc-length budget for the event-driven fallback.
const ARC_BUDGET: f64 = 1.0e3;

/// The unit-speed field `𝒱/|𝒱|`, zero at the fixed points.
fn unit_field(l: f64, k: f64) -> [f64; 2] {
    let (dl, dk) = field(ModuliPoint::new(l, k));
    let n = dl.hypot(dk);
    if n < 1e-14 {
        [0.0, 0.0]
    } else {
        [dl / n, dk / n]
    }
}

/// Unit-speed integral curves reach a fixed point in finite arc length, where the
/// direction field has no limit; integration halts inside this radius.
const FIXED_POINT_HALT: f64 = 1e-7;

fn at_fixed_point(l: f64, k: f64) -> bool {
    let q = ModuliPoint::new(l, k);
    fixed_points().iter().any(|fp| q.dist(*fp) < FIXED_POINT_HALT)
}

/// Follows the integral curve through `p` until `L` reaches `target`, trying both directions.
/// Returns the crossing point, the arc length travelled and the number of steps.
pub fn flow_to_l(p: ModuliPoint, target: f64) -> Result<(ModuliPoint, f64, usize)> {
    let start = p.abs_l();
    if (start.l - target).abs() <= 1e-15 {
        return Ok((start, 0.0, 0));
    }
    let (dl, _) = field(start);
    // the direction that initially moves toward the target goes first
    let first = if dl * (target - start.l) >= 0.0 { 1.0 } else { -1.0 };
    let solver = Dopri::default();
    for dir in [first, -first] {
        let sol = solver.integrate(
            |_, y: &[f64; 2]| {
                let v = unit_field(y[0], y[1]);
                [dir * v[0], dir * v[1]]
            },
            0.0,
            [start.l, start.k],
            ARC_BUDGET,
            Some(|y: &[f64; 2]| y[0] - target),
            |y: &[f64; 2]| at_fixed_point(y[0], y[1]),
        )?;
        if sol.stop == Stop::Event {
            let (s, y) = sol.last();
            return Ok((ModuliPoint::new(y[0], y[1]), s, sol.times.len()));
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "integral curve through ({}, {}) does not reach L = {target} within arc length {ARC_BUDGET}",
        p.l, p.k
    )))
}

/// The label of the integral curve through `p` on the generating set of its class.
pub fn canonical_representative(p: ModuliPoint) -> Result<Canonical> {
    canonical_representative_with_tol(p, EPS_REGION)
}

pub fn canonical_representative_with_tol(p: ModuliPoint, eps: f64) -> Result<Canonical> {
    use RegionTag::*;
    let reg = region_with_tol(p, eps);
    let exact = |l: f64, k: f64| Ok(Canonical { class_point: ModuliPoint::new(l, k), region: reg, certificate: Certificate::Exact });
    match reg.tag {
        NoHyperbolicStructure => Err(Error::Precondition("non-finite moduli point".into())),
        FixedPoint_A => exact(0.0, K_A),
        FixedPoint_B => exact(l_b(), K_B),
        UGraph_Lower => exact(constants::l_c(), 0.0),
        UGraph_Upper => exact(1.0, constant_u()),
        WGraph => exact(1.0, K_W1),
        MGraph => exact(1.0, K_B),
        ClosedAxis => exact(0.0, K_B),
        ClosedInterior_Lower | ClosedInterior_Upper | Incomplete_AboveBell if p.l == 0.0 => exact(0.0, p.k),
        ClosedInterior_Lower | ClosedInterior_Upper | Incomplete_AboveBell => {
            let via_integral = first_integral(p).and_then(|st| Ok((st, axis_crossing(st.chart, st.c)?)));
            match via_integral {
                Ok((st, k)) => Ok(Canonical {
                    class_point: ModuliPoint::new(0.0, k),
                    region: reg,
                    certificate: Certificate::FirstIntegral(st),
                }),
                Err(_) => {
                    let (q, arc, steps) = flow_to_l(p, 0.0)?;
                    Ok(Canonical {
                        class_point: ModuliPoint::new(0.0, q.k),
                        region: reg,
                        certificate: Certificate::Trajectory { arc_length: arc, steps },
                    })
                }
            }
        }
        Incomplete_WExterior | Incomplete_Wedge => {
            let (q, arc, steps) = flow_to_l(p, 1.0)?;
            Ok(Canonical {
                class_point: ModuliPoint::new(1.0, q.k),
                region: reg,
                certificate: Certificate::Trajectory { arc_length: arc, steps },
            })
        }
    }
}

/// Samples of the integral curve of `𝒱/|𝒱|` through `p` over the arc-length interval
/// `[0, arc]` (negative `arc` runs backwards).
///
/// Stops early when the curve enters the ball of radius `fixed_point_radius`
/// around a fixed point or leaves the box `|L|, |K| ≤ bound`.
pub fn trajectory(p: ModuliPoint, arc: f64, bound: f64, fixed_point_radius: f64) -> Result<Vec<(f64, ModuliPoint)>> {
    let radius = fixed_point_radius.max(FIXED_POINT_HALT);
    let sol = Dopri { rtol: 1e-12, atol: 1e-14, h_max: 0.01, ..Dopri::default() }.integrate(
        |_, y: &[f64; 2]| unit_field(y[0], y[1]),
        0.0,
        [p.l, p.k],
        arc,
        None::<fn(&[f64; 2]) -> f64>,
        |y: &[f64; 2]| {
            let q = ModuliPoint::new(y[0], y[1]);
            y[0].abs() > bound || y[1].abs() > bound || fixed_points().iter().any(|fp| q.dist(*fp) < radius)
        },
    )?;
    Ok(sol.times.iter().zip(&sol.states).map(|(&s, y)| (s, ModuliPoint::new(y[0], y[1]))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::l_c;

    #[test]
    fn field_examples() {
        for fp in fixed_points() {
            let (a, b) = field(fp);
            assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
        }
        let (a, b) = field(ModuliPoint::new(l_c(), 0.0));
        assert!((a + 1.0 / 3.0).abs() < 1e-15);
        assert!((b - 1.0 / (3.0 * 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn boundary_examples() {
        assert!((boundary_u(0.0).unwrap() - l_c()).abs() < 1e-15);
        assert_eq!(boundary_u(0.25).unwrap(), 0.0);
        assert!((boundary_w(-1.0 / 6.0).unwrap() - 42f64.sqrt() / 9.0).abs() < 1e-15);
        assert!((boundary_v(-0.5).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((boundary_w(-0.5).unwrap() - 114f64.sqrt() / 9.0).abs() < 1e-15);
        assert!(boundary_u(-0.1).is_err() && boundary_w(0.0).is_err() && boundary_v(0.0).is_err());
    }

    #[test]
    fn u_upper_meets_one_at_u() {
        assert!((boundary_u(constant_u()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn region_examples() {
        assert_eq!(region(ModuliPoint::new(0.0, 0.25)).tag, RegionTag::FixedPoint_A);
        assert_eq!(region(ModuliPoint::new(-l_b(), -1.0 / 12.0)).tag, RegionTag::FixedPoint_B);
        assert_eq!(region(ModuliPoint::new(4.0 / 27.0, 4.0 / 27.0)).tag, RegionTag::UGraph_Lower);
        assert_eq!(region(ModuliPoint::new(1.0, -25.0 / 72.0)).tag, RegionTag::WGraph);
        assert_eq!(region(ModuliPoint::new(1.0, 0.5)).tag, RegionTag::Incomplete_Wedge);
        assert_eq!(region(ModuliPoint::new(0.1, 0.5)).tag, RegionTag::Incomplete_AboveBell);
        assert_eq!(region(ModuliPoint::new(1.0, constant_u())).tag, RegionTag::UGraph_Upper);
        assert_eq!(region(ModuliPoint::new(1.0, -1.0 / 12.0)).tag, RegionTag::MGraph);
        assert_eq!(region(ModuliPoint::new(0.2, -1.0 / 12.0)).tag, RegionTag::ClosedAxis);
        assert_eq!(region(ModuliPoint::new(0.0, 0.0)).tag, RegionTag::ClosedInterior_Upper);
        assert_eq!(region(ModuliPoint::new(0.0, -1.0)).tag, RegionTag::ClosedInterior_Lower);
        assert_eq!(region(ModuliPoint::new(2.0, -1.0)).tag, RegionTag::Incomplete_WExterior);
        assert_eq!(region(ModuliPoint::new(f64::NAN, 0.0)).tag, RegionTag::NoHyperbolicStructure);
        assert!(region(ModuliPoint::new(l_c() + 5e-9, 0.0)).near_boundary);
    }

    #[test]
    fn first_integral_on_axis() {
        let st = first_integral(ModuliPoint::new(0.0, -1.0 / 6.0)).unwrap();
        assert!((st.c - 7.0).abs() < 1e-14);
        assert!(first_integral(ModuliPoint::new(l_c(), 0.0)).is_err());
        assert!(first_integral(ModuliPoint::new(0.0, 0.25)).is_err());
    }

    #[test]
    fn axis_crossing_inverts_axis_values() {
        for &k in &[-2.0, -0.5, -1.0 / 6.0, -0.09, -0.08, 0.0, 0.2, 0.26, 0.5, 3.0] {
            let st = first_integral(ModuliPoint::new(0.0, k)).unwrap();
            let back = axis_crossing(st.chart, st.c).unwrap();
            assert!((back - k).abs() < 1e-12 * (1.0 + k.abs()), "{k} -> {back}");
        }
    }

    #[test]
    fn lower_level_seven_maps_to_minus_one_sixth() {
        let k = -0.125;
        let phi = (1.0 - 7.0 / (11.0 * 2f64.sqrt())).sqrt();
        let p = ModuliPoint::new(phi * boundary_w(k).unwrap(), k);
        let c = canonical_representative(p).unwrap();
        assert!((c.class_point.k + 1.0 / 6.0).abs() < 1e-12, "{c:?}");
    }

    #[test]
    fn ode_fallback_agrees_with_first_integral() {
        for &(l, k) in &[(0.4, -0.2), (0.2, 0.1), (0.15, 0.6)] {
            let p = ModuliPoint::new(l, k);
            let by_integral = canonical_representative(p).unwrap().class_point.k;
            let (q, _, _) = flow_to_l(p, 0.0).unwrap();
            assert!(q.l.abs() < 1e-10);
            assert!((q.k - by_integral).abs() < 1e-8, "{p:?}: {} vs {by_integral}", q.k);
        }
    }

    #[test]
    fn strips_flow_to_line_l_one() {
        let c = canonical_representative(ModuliPoint::new(1.0, 0.5)).unwrap();
        assert_eq!(c.class_point, ModuliPoint::new(1.0, 0.5));
        let c = canonical_representative(ModuliPoint::new(1.5, 0.2)).unwrap();
        assert!((c.class_point.l - 1.0).abs() < 1e-15);
        assert!(c.class_point.k > -1.0 / 12.0 && c.class_point.k < constant_u(), "{c:?}");
        let c = canonical_representative(ModuliPoint::new(1.3, -0.3)).unwrap();
        assert!(c.class_point.k > -25.0 / 72.0 && c.class_point.k < -1.0 / 12.0, "{c:?}");
    }

    #[test]
    fn canonical_is_idempotent_along_a_trajectory() {
        let p = ModuliPoint::new(0.0, -0.3);
        let path = trajectory(p, 0.8, 10.0, 1e-2).unwrap();
        for (_, q) in path.iter().step_by(10) {
            let c = canonical_representative(*q).unwrap();
            assert!((c.class_point.k + 0.3).abs() < 1e-7, "{q:?} {c:?}");
        }
    }
}
