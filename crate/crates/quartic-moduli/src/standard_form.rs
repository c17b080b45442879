//! Reduction to the standard form `x⁴ − x²y² + L xy³ + K y⁴` at a chosen point,
//! and the moving frame `T ↦ 𝒜(T)` that slides the base point along the curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quartic_form::{LinearMap2, Point2, QuarticForm};
use crate::slice_analysis;

/// `(L, K)` together with a frame `A` such that `A*h = h_{L,K}` and `A (1,0)ᵀ` is the base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardForm {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub frame: LinearMap2,
    pub base_point: Point2,
}

impl StandardForm {
    /// A form that is already standard, with the identity frame at `(1, 0)`.
    pub fn from_lk(l: f64, k: f64) -> Self {
        Self { l, k, frame: LinearMap2::identity(), base_point: Point2::new(1.0, 0.0) }
    }

    pub fn form(&self) -> QuarticForm {
        QuarticForm::standard(self.l, self.k)
    }
}

/// Standard form of `h` based at the ray through `p`.
///
/// The point is first moved radially onto `{h = 1}`; the second frame column is
/// the positive multiple of `(−∂_y h, ∂_x h)` that makes the `x²y²` coefficient `−1`.
pub fn standardize(h: &QuarticForm, p: Point2) -> Result<StandardForm> {
    standardize_with_error(h, p).map(|(sf, _)| sf)
}

/// [`standardize`] together with a bound on the rounding error in `(L, K)`.
///
/// `(L, K)` is read back through [`lk_from_slice_coefficients`], so an inexact frame only
/// slides the base point along the curve. What remains is the cancellation in the pulled-back
/// coefficients, estimated by pulling `|h|` back through `|frame|`. The bound grows like the
/// fourth power of the condition number of any map applied to `h` beforehand, and no
/// reformulation in double precision removes that.
pub fn standardize_with_error(h: &QuarticForm, p: Point2) -> Result<(StandardForm, f64)> {
    let value = h.eval(p);
    if !(value > 0.0) {
        return Err(Error::NonPositiveValue { value });
    }
    if !h.is_hyperbolic_point(p) {
        return Err(Error::NotHyperbolic { x: p.x, y: p.y });
    }
    let base = p.scaled(value.powf(-0.25));
    let (hx, hy) = h.gradient(base);
    let w = Point2::new(-hy, hx);
    let (hxx, hxy, hyy) = h.hessian(base);
    let quad = hxx * w.x * w.x + 2.0 * hxy * w.x * w.y + hyy * w.y * w.y;
    if !(quad < 0.0) {
        return Err(Error::NotHyperbolic { x: p.x, y: p.y });
    }
    let r = (-2.0 / quad).sqrt();
    let frame = LinearMap2::from_columns(base, w.scaled(r));
    let pulled = h.pullback(&frame);
    let (l, k) = lk_from_slice_coefficients(pulled.coefficients());
    let abs_h = QuarticForm::new(h.c40.abs(), h.c31.abs(), h.c22.abs(), h.c13.abs(), h.c04.abs());
    let abs_frame = LinearMap2::new(frame.a11.abs(), frame.a12.abs(), frame.a21.abs(), frame.a22.abs());
    let scale = abs_h.pullback(&abs_frame).coefficients().into_iter().fold(0.0, f64::max);
    let error = 32.0 * f64::EPSILON * scale;
    Ok((StandardForm { l, k, frame, base_point: base }, error))
}

/// Flips the sign of `L` via `y ↦ −y` when needed so that `L ≥ 0`.
pub fn canonicalize_sign(sf: &StandardForm) -> StandardForm {
    if sf.l >= 0.0 {
        return *sf;
    }
    StandardForm {
        l: -sf.l,
        k: sf.k,
        frame: sf.frame.compose(&LinearMap2::diag(1.0, -1.0)),
        base_point: sf.base_point,
    }
}

fn check_in_domain(sf: &StandardForm, t: f64) -> Result<slice_analysis::SliceProfile> {
    let prof = slice_analysis::domain(sf.l, sf.k)?;
    if !prof.contains(t) {
        return Err(Error::OutOfDomain { t, lo: prof.dom_lo, hi: prof.dom_hi });
    }
    Ok(prof)
}

fn r_factor(l: f64, k: f64, t: f64, f: f64) -> f64 {
    let t2 = t * t;
    let poly = 16.0 - 48.0 * l * t + (-8.0 - 96.0 * k) * t2 + 56.0 * l * t2 * t
        + (-8.0 - 42.0 * l * l + 128.0 * k) * t2 * t2
        + (16.0 * l - 144.0 * l * k) * t2 * t2 * t
        + (-14.0 * l * l - 8.0 * k - 96.0 * k * k) * t2 * t2 * t2
        + (6.0 * l * l * l + 8.0 * l * k) * t2 * t2 * t2 * t
        + (6.0 * l * l * k + 16.0 * k * k) * t2 * t2 * t2 * t2;
    f.powf(0.25) * (4.0 - 2.0 * t2 + l * t2 * t) / poly.sqrt()
}

/// The frame `𝒜(T)` that carries `h_{L,K}` to the standard form based at the ray through `(1, T)`.
pub fn frame_at(sf: &StandardForm, t: f64) -> Result<LinearMap2> {
    check_in_domain(sf, t)?;
    Ok(frame_unchecked(sf.l, sf.k, t))
}

fn frame_unchecked(l: f64, k: f64, t: f64) -> LinearMap2 {
    let f = slice_analysis::slice_poly(l, k).f.eval(t);
    let s = f.powf(-0.25);
    let r = r_factor(l, k, t, f);
    let t2 = t * t;
    let shear = (2.0 * t - 3.0 * l * t2 - 4.0 * k * t2 * t) / (4.0 - 2.0 * t2 + l * t2 * t);
    LinearMap2::new(s, shear * r, s * t, r)
}

/// `(L(T), K(T))`: the standard-form parameters seen from the base point at slope `T`.
pub fn lk_curve(sf: &StandardForm, t: f64) -> Result<(f64, f64)> {
    check_in_domain(sf, t)?;
    Ok(lk_unchecked(sf.l, sf.k, t))
}

/// The closed forms for `L(T)` and `K(T)` without the domain check.
pub(crate) fn lk_unchecked(l: f64, k: f64, t: f64) -> (f64, f64) {
    let f = slice_analysis::slice_poly(l, k).f.eval(t);
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t2 * t2;
    let (l2, l3, k2) = (l * l, l * l * l, k * k);
    let lnum = -8.0 * l + (8.0 - 32.0 * k) * t - 20.0 * l * t2 + 20.0 * l2 * t3 + 40.0 * l * k * t4
        + (-2.0 * l2 - 8.0 * k + 32.0 * k2) * t4 * t
        + (l3 + 4.0 * l * k) * t4 * t2;
    let q = 8.0 - 24.0 * l * t + (4.0 - 48.0 * k) * t2 - 4.0 * l * t3 + (3.0 * l2 + 8.0 * k) * t4;
    let big = 8.0 - 24.0 * l * t + (-4.0 - 48.0 * k) * t2 + 28.0 * l * t3
        + (-4.0 - 21.0 * l2 + 64.0 * k) * t4
        + (8.0 * l - 72.0 * l * k) * t4 * t
        + (-7.0 * l2 - 4.0 * k - 48.0 * k2) * t4 * t2
        + (3.0 * l3 + 4.0 * l * k) * t4 * t3
        + (3.0 * l2 * k + 8.0 * k2) * t4 * t4;
    let l_t = -2.0 * std::f64::consts::SQRT_2 * f.sqrt() * lnum / (q * big.sqrt());

    let knum = 256.0 * k + 128.0 * l * t + (-64.0 - 192.0 * l2 - 256.0 * k) * t2
        + (128.0 * l - 256.0 * l * k) * t3
        + (16.0 - 80.0 * l2 + 384.0 * k - 256.0 * k2) * t4
        + (48.0 * l3 - 32.0 * l - 512.0 * l * k) * t4 * t
        + (8.0 * l2 + 352.0 * l2 * k - 64.0 * k - 256.0 * k2) * t4 * t2
        + (8.0 * l3 + 64.0 * l * k + 512.0 * l * k2) * t4 * t3
        + (-3.0 * l2 * l2 - 16.0 * l2 * k + 256.0 * k2 * k) * t4 * t4;
    let k_t = 0.25 * knum / (q * q);
    (l_t, k_t)
}

/// Standard-form `(L, K)` at `(1, 0)` of the form whose slice is `a₀ + a₁s + a₂s² + a₃s³ + a₄s⁴`.
///
/// With `D = 3a₁² − 8a₀a₂` (positive exactly at hyperbolic points),
/// `L = 8(a₁³ − 4a₀a₁a₂ + 8a₀²a₃)/(2D)^{3/2}` and
/// `K = (−3a₁⁴ + 16a₀a₁²a₂ − 64a₀²a₁a₃ + 256a₀³a₄)/(4D²)`.
pub fn lk_from_slice_coefficients(a: [f64; 5]) -> (f64, f64) {
    let [a0, a1, a2, a3, a4] = a;
    let d = 3.0 * a1 * a1 - 8.0 * a0 * a2;
    let l = 8.0 * (a1 * a1 * a1 - 4.0 * a0 * a1 * a2 + 8.0 * a0 * a0 * a3) / (2.0 * d).powf(1.5);
    let k = (-3.0 * a1.powi(4) + 16.0 * a0 * a1 * a1 * a2 - 64.0 * a0 * a0 * a1 * a3 + 256.0 * a0.powi(3) * a4)
        / (4.0 * d * d);
    (l, k)
}

/// `(L(T), K(T))` at `T = center + delta`, from the Taylor expansion of the slice about `center`.
///
/// The first `vanishing` Taylor coefficients at `center` are taken to be zero. Near a
/// root of the slice of that multiplicity this keeps the small values of `f` and `ḟ`
/// accurate where the closed forms in `T` cancel.
pub fn lk_about(l: f64, k: f64, center: f64, delta: f64, vanishing: usize) -> (f64, f64) {
    let f = slice_analysis::slice_poly(l, k).f;
    let mut b = [0.0; 5];
    let mut dj = f.clone();
    let mut fact = 1.0;
    for (j, bj) in b.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
            dj = dj.derivative();
        }
        *bj = if j < vanishing { 0.0 } else { dj.eval(center) / fact };
    }
    // re-expand about center + delta
    let mut a = [0.0; 5];
    for (i, ai) in a.iter_mut().enumerate() {
        let mut binom = 1.0;
        for j in i..5 {
            if j > i {
                binom *= j as f64 / (j - i) as f64;
            }
            *ai += binom * b[j] * delta.powi((j - i) as i32);
        }
    }
    lk_from_slice_coefficients(a)
}

/// The family `T ↦ (𝒜(T), L(T), K(T))` over `dom(ℋ_{L,K})`.
#[derive(Debug, Clone)]
pub struct FrameCurve {
    pub origin: StandardForm,
    pub profile: slice_analysis::SliceProfile,
}

impl FrameCurve {
    pub fn new(origin: StandardForm) -> Result<Self> {
        let profile = slice_analysis::domain(origin.l, origin.k)?;
        Ok(Self { origin, profile })
    }

    pub fn dom(&self) -> (f64, f64) {
        (self.profile.dom_lo, self.profile.dom_hi)
    }

    pub fn frame(&self, t: f64) -> Result<LinearMap2> {
        self.guard(t)?;
        Ok(frame_unchecked(self.origin.l, self.origin.k, t))
    }

    pub fn lk(&self, t: f64) -> Result<(f64, f64)> {
        self.guard(t)?;
        Ok(lk_unchecked(self.origin.l, self.origin.k, t))
    }

    fn guard(&self, t: f64) -> Result<()> {
        if self.profile.contains(t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { t, lo: self.profile.dom_lo, hi: self.profile.dom_hi })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{class_c_factor_map, l_b, l_c};

    #[test]
    fn taylor_evaluation_matches_closed_forms() {
        for &(l, k) in &[(0.0, 0.1), (0.3, -0.2), (l_c(), 0.0), (1.0, 0.5), (0.2, 0.8)] {
            let prof = slice_analysis::domain(l, k).unwrap();
            for i in 1..10 {
                let t = prof.dom_lo + (prof.dom_hi - prof.dom_lo) * i as f64 / 10.0;
                let (l1, k1) = lk_unchecked(l, k, t);
                let (l2, k2) = lk_about(l, k, 0.3, t - 0.3, 0);
                assert!((l1 - l2).abs() < 1e-9 * (1.0 + l1.abs()) && (k1 - k2).abs() < 1e-9 * (1.0 + k1.abs()),
                    "({l}, {k}) at {t}: ({l1}, {k1}) vs ({l2}, {k2})");
            }
        }
    }

    fn coeff_err(h: &QuarticForm, l: f64, k: f64) -> f64 {
        h.max_abs_diff(&QuarticForm::standard(l, k))
    }

    #[test]
    fn already_standard_gives_identity_frame() {
        let h = QuarticForm::standard(0.4, -0.2);
        let sf = standardize(&h, Point2::new(1.0, 0.0)).unwrap();
        assert!((sf.l - 0.4).abs() < 1e-15 && (sf.k + 0.2).abs() < 1e-15);
        let id = LinearMap2::identity();
        assert!((sf.frame.a11 - id.a11).abs() < 1e-15 && (sf.frame.a22 - id.a22).abs() < 1e-15);
        assert!(sf.frame.a12.abs() < 1e-15 && sf.frame.a21.abs() < 1e-15);
    }

    #[test]
    fn class_c_moved_base_point() {
        let q = 5f64.powf(0.25);
        let p = Point2::new(1.0 / q, 2.0 * 3f64.sqrt() / q);
        let sf = standardize(&QuarticForm::standard(l_c(), 0.0), p).unwrap();
        assert!((sf.l.abs() - 4.0 / 27.0).abs() < 1e-12, "{sf:?}");
        assert!((sf.k - 4.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn factor_form_returns_to_class_c() {
        let a = class_c_factor_map();
        let hat = QuarticForm::new(0.0, 1.0, -2.0, 1.0, 0.0);
        let p = a.inverse().unwrap().apply(Point2::new(1.0, 0.0));
        let sf = canonicalize_sign(&standardize(&hat, p).unwrap());
        assert!((sf.l - l_c()).abs() < 1e-12 && sf.k.abs() < 1e-12, "{sf:?}");
    }

    #[test]
    fn frame_invariants() {
        let h = QuarticForm::new(2.0, 0.3, -1.5, 0.2, 0.1);
        let p = Point2::new(0.9, 0.1);
        let sf = standardize(&h, p).unwrap();
        assert!(coeff_err(&h.pullback(&sf.frame), sf.l, sf.k) < 1e-12);
        let e1 = sf.frame.apply(Point2::new(1.0, 0.0));
        assert!((e1.x - sf.base_point.x).abs() < 1e-15 && (e1.y - sf.base_point.y).abs() < 1e-15);
        assert!((h.eval(sf.base_point) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_points() {
        let h = QuarticForm::standard(0.0, 0.25);
        assert!(matches!(standardize(&h, Point2::new(0.0, 0.0)), Err(Error::NonPositiveValue { .. })));
        let neg = QuarticForm::new(-1.0, 0.0, 0.0, 0.0, -1.0);
        assert!(matches!(standardize(&neg, Point2::new(1.0, 0.0)), Err(Error::NonPositiveValue { .. })));
        // x⁴ + y⁴ is convex, so positive but nowhere hyperbolic
        let convex = QuarticForm::new(1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(standardize(&convex, Point2::new(1.0, 0.3)), Err(Error::NotHyperbolic { .. })));
    }

    #[test]
    fn frame_at_zero_is_identity() {
        let sf = StandardForm::from_lk(0.3, -0.4);
        let a = frame_at(&sf, 0.0).unwrap();
        assert!((a.a11 - 1.0).abs() < 1e-15 && (a.a22 - 1.0).abs() < 1e-15);
        assert!(a.a12.abs() < 1e-15 && a.a21.abs() < 1e-15);
        assert_eq!(lk_curve(&sf, 0.0).unwrap(), (0.3, -0.4));
    }

    #[test]
    fn frame_matches_closed_forms() {
        for &(l, k) in &[(l_c(), 0.0), (0.3, -0.4), (1.0, 0.5), (0.2, 0.1), (0.0, -0.5)] {
            let sf = StandardForm::from_lk(l, k);
            let prof = slice_analysis::domain(l, k).unwrap();
            for i in 1..20 {
                let t = prof.dom_lo + (prof.dom_hi - prof.dom_lo) * i as f64 / 20.0;
                let a = frame_at(&sf, t).unwrap();
                let (lt, kt) = lk_curve(&sf, t).unwrap();
                let pulled = sf.form().pullback(&a);
                assert!(coeff_err(&pulled, lt, kt) < 1e-9, "({l},{k}) t={t}: {pulled} vs {lt},{kt}");
            }
        }
    }

    #[test]
    fn fixed_points_are_stationary() {
        for &(l, k) in &[(0.0, 0.25), (l_b(), -1.0 / 12.0), (-l_b(), -1.0 / 12.0)] {
            let sf = StandardForm::from_lk(l, k);
            let prof = slice_analysis::domain(l, k).unwrap();
            for &s in &[0.3, -0.3, 0.8, -0.8] {
                let t = if s > 0.0 { s * prof.dom_hi } else { -s * prof.dom_lo };
                let (lt, kt) = lk_curve(&sf, t).unwrap();
                assert!((lt - l).abs() < 1e-9 && (kt - k).abs() < 1e-9, "({l},{k}) t={t}: {lt} {kt}");
            }
        }
    }

    #[test]
    fn velocity_at_zero() {
        let (l, k) = (l_c(), 0.0);
        let sf = StandardForm::from_lk(l, k);
        let h = 1e-5;
        let (a, b) = (lk_curve(&sf, h).unwrap(), lk_curve(&sf, -h).unwrap());
        let v = ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h));
        assert!((v.0 + 1.0 / 3.0).abs() < 1e-6);
        assert!((v.1 - 1.0 / (3.0 * 3f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let sf = StandardForm::from_lk(0.0, 0.25);
        assert!(matches!(frame_at(&sf, 1.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(lk_curve(&sf, -2.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn sign_canonicalization() {
        let sf = canonicalize_sign(&StandardForm::from_lk(-1.0, 0.0));
        assert_eq!((sf.l, sf.k), (1.0, 0.0));
        assert!(QuarticForm::standard(-1.0, 0.0).pullback(&sf.frame).max_abs_diff(&sf.form()) < 1e-15);
        let sf = StandardForm::from_lk(0.0, 0.1);
        assert_eq!(canonicalize_sign(&sf), sf);
        let sf = canonicalize_sign(&StandardForm::from_lk(-l_b(), -1.0 / 12.0));
        assert_eq!(sf.l, l_b());
    }

    #[test]
    fn serde_shape() {
        let v = serde_json::to_value(StandardForm::from_lk(0.5, 0.25)).unwrap();
        assert_eq!(v["L"], 0.5);
        assert_eq!(v["frame"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
        assert_eq!(v["base_point"], serde_json::json!([1.0, 0.0]));
    }
}
