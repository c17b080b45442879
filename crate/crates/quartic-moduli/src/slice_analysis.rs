//! The slice `f_{L,K}(t) = h_{L,K}(1, t)` and everything read off from it:
//! roots, critical points, the centro-affine metric along the slice, `dom(ℋ)`,
//! closedness, singularity at infinity and component counts on the circle.
//!
//! Along the slice the Hessian determinant of `h_{L,K}` equals `−48` times the
//! metric numerator `−f f̈/4 + 3ḟ²/16`, so `dom(ℋ)` is the interval around `0`
//! on which both `f` and the numerator stay positive.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::{Poly, RealRoot};
use crate::quartic_form::{LinearMap2, Point2, QuarticForm};

/// Separation below which a slice root and a metric root count as the same boundary point.
pub const EPS_SEP: f64 = 1e-8;

/// The slice polynomial with its first two derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePoly {
    pub f: Poly,
    pub df: Poly,
    pub ddf: Poly,
}

/// How an endpoint of `dom(ℋ)` arises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    #[serde(rename = "f_zero")]
    ZeroOfF,
    #[serde(rename = "metric")]
    MetricDegenerate,
    #[serde(rename = "both")]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub t: f64,
    /// Coefficient of `dt²` in the pulled-back metric.
    pub g_value: f64,
    /// The quartic `−f f̈/4 + 3ḟ²/16`.
    pub g_numerator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceProfile {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub dom_lo: f64,
    pub dom_hi: f64,
    pub f_roots: Vec<f64>,
    pub g_roots: Vec<f64>,
    pub t_m: Option<f64>,
    pub t_big_m: Option<f64>,
    /// Boundary kinds at `dom_lo` and `dom_hi`, in that order.
    pub boundary: [BoundaryKind; 2],
    /// A slice root and metric root closer than [`EPS_SEP`] that do not coincide analytically.
    pub ambiguity: Option<(f64, f64)>,
}

/// Arc-length behaviour toward one end of `dom(ℋ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "length", rename_all = "snake_case")]
pub enum ArcLength {
    Divergent,
    Finite(f64),
}

pub fn slice_poly(l: f64, k: f64) -> SlicePoly {
    let f = Poly::new(vec![1.0, 0.0, -1.0, l, k]);
    let df = f.derivative();
    let ddf = df.derivative();
    SlicePoly { f, df, ddf }
}

/// `−f f̈/4 + 3ḟ²/16`; the degree 5 and 6 parts cancel identically and are dropped.
pub fn metric_numerator_poly(l: f64, k: f64) -> Poly {
    let s = slice_poly(l, k);
    let full = s.f.mul(&s.ddf).scale(-0.25).add(&s.df.mul(&s.df).scale(3.0 / 16.0));
    Poly::new(full.coeffs().iter().take(5).copied().collect())
}

/// Real critical points of `f`: always `0`, plus `t_m`, `t_M` when real (or `2/(3L)` for `K = 0`).
pub fn critical_points(l: f64, k: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let (tm, tbm) = extremal_points(l, k);
    out.extend(tm);
    out.extend(tbm);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + a.abs()));
    out
}

/// `(t_m, t_M)`, the non-zero solutions of `ḟ = 0`, when real.
pub fn extremal_points(l: f64, k: f64) -> (Option<f64>, Option<f64>) {
    if k == 0.0 {
        if l == 0.0 {
            return (None, None);
        }
        return (Some(2.0 / (3.0 * l)), None);
    }
    let disc = 9.0 * l * l + 32.0 * k;
    if disc < 0.0 {
        return (None, None);
    }
    let r = disc.sqrt();
    let base = -3.0 * l / (8.0 * k);
    (Some(base + r / (8.0 * k)), Some(base - r / (8.0 * k)))
}

pub fn metric(l: f64, k: f64, t: f64) -> Result<MetricSample> {
    let s = slice_poly(l, k);
    let num = metric_numerator_poly(l, k).eval(t);
    let f = s.f.eval(t);
    if f == 0.0 {
        return Err(Error::DivisionByZeroAtLevelSetBoundary { t });
    }
    Ok(MetricSample { t, g_value: num / (f * f), g_numerator: num })
}

fn is_double_root(s: &SlicePoly, t: f64) -> bool {
    s.df.eval(t).abs() <= 1e-7 * (1.0 + t.abs().powi(3))
}

fn root_values(roots: &[RealRoot]) -> Vec<f64> {
    roots.iter().map(|r| r.value).collect()
}

/// `dom(ℋ_{L,K})` together with the roots and boundary classification.
pub fn domain(l: f64, k: f64) -> Result<SliceProfile> {
    if !(l.is_finite() && k.is_finite()) {
        return Err(Error::Precondition(format!("non-finite moduli point ({l}, {k})")));
    }
    let s = slice_poly(l, k);
    let f_roots = root_values(&s.f.real_roots());
    let g_roots = root_values(&metric_numerator_poly(l, k).real_roots());

    let mut ambiguity = None;
    let mut endpoint = |positive: bool| -> Result<(f64, BoundaryKind)> {
        let pick = |v: &[f64]| -> Option<f64> {
            if positive {
                v.iter().copied().filter(|&t| t > 0.0).reduce(f64::min)
            } else {
                v.iter().copied().filter(|&t| t < 0.0).reduce(f64::max)
            }
        };
        let (fr, gr) = (pick(&f_roots), pick(&g_roots));
        match (fr, gr) {
            (None, None) => Err(Error::Precondition(format!(
                "no boundary root on the {} side of dom for ({l}, {k})",
                if positive { "positive" } else { "negative" }
            ))),
            (Some(a), None) => Ok((a, BoundaryKind::ZeroOfF)),
            (None, Some(b)) => Ok((b, BoundaryKind::MetricDegenerate)),
            (Some(a), Some(b)) => {
                if (a - b).abs() <= EPS_SEP * (1.0 + a.abs()) {
                    if !is_double_root(&s, a) {
                        ambiguity = Some((a, b));
                    }
                    Ok((a, BoundaryKind::Both))
                } else if a.abs() < b.abs() {
                    Ok((a, BoundaryKind::ZeroOfF))
                } else {
                    Ok((b, BoundaryKind::MetricDegenerate))
                }
            }
        }
    };
    let (lo, lo_kind) = endpoint(false)?;
    let (hi, hi_kind) = endpoint(true)?;
    let (t_m, t_big_m) = extremal_points(l, k);
    Ok(SliceProfile {
        l,
        k,
        dom_lo: lo,
        dom_hi: hi,
        f_roots,
        g_roots,
        t_m,
        t_big_m,
        boundary: [lo_kind, hi_kind],
        ambiguity,
    })
}

impl SliceProfile {
    pub fn contains(&self, t: f64) -> bool {
        t > self.dom_lo && t < self.dom_hi
    }

    pub fn is_closed(&self) -> Result<bool> {
        if let Some((f_root, metric_root)) = self.ambiguity {
            return Err(Error::BoundaryAmbiguous { f_root, metric_root });
        }
        Ok(self.boundary.iter().all(|b| matches!(b, BoundaryKind::ZeroOfF | BoundaryKind::Both)))
    }

    pub fn is_singular_at_infinity(&self) -> bool {
        let s = slice_poly(self.l, self.k);
        [self.dom_lo, self.dom_hi].iter().any(|&t| {
            s.f.eval(t).abs() <= 1e-9 * s.f.magnitude(t) && is_double_root(&s, t)
        })
    }

    /// `n` evenly spaced interior samples `(t, f, g)` across the domain.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let s = slice_poly(self.l, self.k);
        let num = metric_numerator_poly(self.l, self.k);
        (1..=n)
            .map(|i| {
                let t = self.dom_lo + (self.dom_hi - self.dom_lo) * i as f64 / (n + 1) as f64;
                let f = s.f.eval(t);
                (t, f, num.eval(t) / (f * f))
            })
            .collect()
    }
}

pub fn is_closed(l: f64, k: f64) -> Result<bool> {
    domain(l, k)?.is_closed()
}

pub fn is_singular_at_infinity(l: f64, k: f64) -> bool {
    domain(l, k).map(|p| p.is_singular_at_infinity()).unwrap_or(false)
}

/// Angles in `[0, 2π)` of the real lines on which the form vanishes.
pub fn zero_angles(h: &QuarticForm) -> Vec<f64> {
    let mut out = Vec::new();
    // chart y = s x with |s| ≤ 1, and chart x = s y with |s| < 1
    for r in h.dehomogenize_x().real_root_values() {
        if r.abs() <= 1.0 {
            out.push(r.atan());
        }
    }
    for r in h.dehomogenize_y().real_root_values() {
        if r.abs() < 1.0 {
            out.push(1f64.atan2(r));
        }
    }
    let mut all: Vec<f64> = out
        .iter()
        .flat_map(|&a| [a.rem_euclid(2.0 * PI), (a + PI).rem_euclid(2.0 * PI)])
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    all
}

/// Angles in `[0, 2π)` of the lines along which `q` has a local maximum just below zero,
/// close enough that the complex pair of zeros it hides lies within `sqrt(tol)` of the line.
pub fn touch_angles(q: &QuarticForm, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let charts = [(q.dehomogenize_x(), true), (q.dehomogenize_y(), false)];
    for (poly, x_chart) in &charts {
        let d2 = poly.derivative().derivative();
        for r in poly.derivative().real_root_values() {
            let inside = if *x_chart { r.abs() <= 1.0 } else { r.abs() < 1.0 };
            let (v, c) = (poly.eval(r), d2.eval(r));
            // q(r + iσ) ≈ q(r) − c σ²/2 vanishes at σ² = 2 q(r)/c
            if inside && v <= 0.0 && c < 0.0 && 2.0 * v / c <= tol {
                out.push(if *x_chart { r.atan() } else { 1f64.atan2(r) });
            }
        }
    }
    let mut all: Vec<f64> = out
        .iter()
        .flat_map(|&a| [a.rem_euclid(2.0 * PI), (a + PI).rem_euclid(2.0 * PI)])
        .collect();
    all.sort_by(f64::total_cmp);
    all
}

/// Cut angles closer than this are treated as one.
pub const ARC_MERGE: f64 = 1e-7;

/// Squared distance of a hidden complex pair below which the Hessian determinant touches zero.
pub const TOUCH_TOL: f64 = 1e-9;

/// Frames more anisotropic than this are worth re-reading the arcs through.
const BALANCE_COND: f64 = 8.0;

/// Maximal open arcs of the unit circle on which `h > 0` and `det ∂²h < 0`, as `(start, end)` angles
/// with `end > start` (an arc through angle `0` has `end > 2π`), sorted by start.
///
/// When `h` is the image of a tame form under a badly conditioned map, its zeros and those of
/// its Hessian determinant crowd into a narrow cone, and the determinant's coefficients lose
/// most of their digits to cancellation. The arcs are then recomputed for `h` pulled back
/// through the standard frame at a point of the widest arc, where the form is of moderate
/// size, and the cut angles are carried back.
///
/// A line where the Hessian determinant touches zero without changing sign is a cut, as are
/// lines where it comes within `TOUCH_TOL` of touching, so that a tangency survives rounding.
pub fn hyperbolic_arcs(h: &QuarticForm) -> Vec<(f64, f64)> {
    let naive = arcs_in_place(h);
    // a point of the widest arc, or failing that of a sector where h > 0
    let widest = naive.iter().max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0))).map(|&(a, b)| 0.5 * (a + b));
    let zeros = zero_angles(h);
    let sectors: Vec<f64> = if zeros.is_empty() {
        (0..8).map(|i| i as f64 * PI / 4.0).collect()
    } else {
        (0..zeros.len())
            .flat_map(|i| {
                let a = zeros[i];
                let b = if i + 1 < zeros.len() { zeros[i + 1] } else { zeros[0] + 2.0 * PI };
                (1..8).map(move |j| a + (b - a) * j as f64 / 8.0)
            })
            .collect()
    };
    let Some(frame) = widest
        .into_iter()
        .chain(sectors)
        .find_map(|t| tangent_frame(h, Point2::from_angle(t)))
    else {
        return naive;
    };
    if !(frame.condition_number() > BALANCE_COND) {
        return naive;
    }
    let inner = arcs_in_place(&h.pullback(&frame));
    if inner.is_empty() {
        return inner;
    }
    if inner.len() == 1 && inner[0].1 - inner[0].0 >= 2.0 * PI {
        return inner;
    }
    let angle = |t: f64| {
        let q = frame.apply(Point2::from_angle(t));
        q.y.atan2(q.x).rem_euclid(2.0 * PI)
    };
    let flip = frame.det() < 0.0;
    let mut arcs: Vec<(f64, f64)> = inner
        .into_iter()
        .map(|(s, e)| {
            let (s, e) = if flip { (angle(e), angle(s)) } else { (angle(s), angle(e)) };
            (s, if e <= s { e + 2.0 * PI } else { e })
        })
        .collect();
    arcs.sort_by(|x, y| x.0.total_cmp(&y.0));
    arcs
}

/// Columns `p / h(p)^{1/4}` and the tangent direction scaled so that `h` pulls back with
/// `x⁴` coefficient `1`, no `x³y` term and `x²y²` coefficient `−1`.
fn tangent_frame(h: &QuarticForm, p: Point2) -> Option<LinearMap2> {
    let value = h.eval(p);
    if !(value > 0.0) {
        return None;
    }
    let base = p.scaled(value.powf(-0.25));
    let (hx, hy) = h.gradient(base);
    let w = Point2::new(-hy, hx);
    let (hxx, hxy, hyy) = h.hessian(base);
    let quad = hxx * w.x * w.x + 2.0 * hxy * w.x * w.y + hyy * w.y * w.y;
    if !(quad < 0.0) {
        return None;
    }
    let frame = LinearMap2::from_columns(base, w.scaled((-2.0 / quad).sqrt()));
    frame.is_finite().then_some(frame)
}

fn arcs_in_place(h: &QuarticForm) -> Vec<(f64, f64)> {
    let hd = h.hessian_det_form();
    let mut cuts = zero_angles(h);
    cuts.extend(zero_angles(&hd));
    cuts.extend(touch_angles(&hd, TOUCH_TOL));
    cuts.sort_by(f64::total_cmp);
    // A multiple zero of h is also a zero of the Hessian determinant, and the two
    // computed angles can differ by rounding. Merging them avoids a sliver arc.
    cuts.dedup_by(|a, b| (*a - *b).abs() <= ARC_MERGE);
    if cuts.len() > 1 && cuts[0] + 2.0 * PI - cuts[cuts.len() - 1] <= ARC_MERGE {
        cuts.pop();
    }
    let good = |theta: f64| {
        let p = Point2::from_angle(theta);
        h.eval(p) > 0.0 && h.is_hyperbolic_point(p)
    };
    if cuts.is_empty() {
        return if good(0.0) { vec![(0.0, 2.0 * PI)] } else { Vec::new() };
    }
    let n = cuts.len();
    let mut arcs = Vec::new();
    for i in 0..n {
        let a = cuts[i];
        let b = if i + 1 < n { cuts[i + 1] } else { cuts[0] + 2.0 * PI };
        if good(0.5 * (a + b)) {
            arcs.push((a, b));
        }
    }
    arcs
}

/// Number of connected components of `{h = 1} ∩ {hyperbolic points}`.
pub fn count_components(h: &QuarticForm) -> usize {
    hyperbolic_arcs(h).len()
}

const DIVERGENCE_RATIO: f64 = 0.85;

/// Numerical witness for completeness: the centro-affine length from `0` toward each end of `dom`.
pub fn completeness_probe(l: f64, k: f64) -> Result<[ArcLength; 2]> {
    let prof = domain(l, k)?;
    let s = slice_poly(l, k);
    let num = metric_numerator_poly(l, k);
    let speed = |t: f64| {
        let f = s.f.eval(t);
        (num.eval(t) / (f * f)).max(0.0).sqrt()
    };
    // Dyadic shells toward the endpoint. Near a zero of f the speed blows up like
    // 1/|t - end| and every shell contributes the same amount; near a degenerate
    // metric it decays like a positive power and the shells shrink geometrically.
    // Shells stop at relative distance 2^-18 where the quotient is still well conditioned.
    let side = |end: f64| -> ArcLength {
        let mut total = 0.0;
        let mut prev = 0.0;
        let mut incs = Vec::with_capacity(18);
        for k in 1..=18 {
            let t = end * (1.0 - 0.5f64.powi(k));
            let inc = simpson(&speed, prev, t, 64).abs();
            total += inc;
            prev = t;
            incs.push(inc);
        }
        let (a, b) = (incs[incs.len() - 2], incs[incs.len() - 1]);
        let ratio = if a > 0.0 { b / a } else { 0.0 };
        if ratio > DIVERGENCE_RATIO {
            ArcLength::Divergent
        } else {
            ArcLength::Finite(total + b * ratio / (1.0 - ratio))
        }
    };
    Ok([side(prof.dom_lo), side(prof.dom_hi)])
}

fn simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = g(a) + g(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + h * i as f64);
    }
    acc * h / 3.0
}
