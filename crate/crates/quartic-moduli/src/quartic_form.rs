//! Homogeneous quartic forms on the plane, their calculus, and linear pullbacks.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::poly::Poly;

/// Default sign tolerance for hyperbolicity tests on degree-normalized quantities.
pub const EPS_SIGN: f64 = 1e-9;

/// `h = c40 x⁴ + c31 x³y + c22 x²y² + c13 xy³ + c04 y⁴`, monomial basis without binomial weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 5]", into = "[f64; 5]")]
pub struct QuarticForm {
    pub c40: f64,
    pub c31: f64,
    pub c22: f64,
    pub c13: f64,
    pub c04: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// The matrix `[[a11, a12], [a21, a22]]` acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct LinearMap2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

/// Outcome of the tolerance-guarded hyperbolicity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hyperbolicity {
    Hyperbolic,
    NotHyperbolic,
    /// `|det ∂²h| ≤ ε‖p‖⁴`; the sign cannot be trusted.
    Ambiguous,
}

impl From<[f64; 5]> for QuarticForm {
    fn from(c: [f64; 5]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4])
    }
}

impl From<QuarticForm> for [f64; 5] {
    fn from(h: QuarticForm) -> Self {
        h.coefficients()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(p: [f64; 2]) -> Self {
        Self::new(p[0], p[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl From<[[f64; 2]; 2]> for LinearMap2 {
    fn from(m: [[f64; 2]; 2]) -> Self {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<LinearMap2> for [[f64; 2]; 2] {
    fn from(a: LinearMap2) -> Self {
        [[a.a11, a.a12], [a.a21, a.a22]]
    }
}

impl QuarticForm {
    pub const fn new(c40: f64, c31: f64, c22: f64, c13: f64, c04: f64) -> Self {
        Self { c40, c31, c22, c13, c04 }
    }

    /// The standard form `x⁴ − x²y² + L xy³ + K y⁴`.
    pub const fn standard(l: f64, k: f64) -> Self {
        Self::new(1.0, 0.0, -1.0, l, k)
    }

    pub fn coefficients(&self) -> [f64; 5] {
        [self.c40, self.c31, self.c22, self.c13, self.c04]
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_finite())
    }

    /// Largest absolute coefficient.
    pub fn norm(&self) -> f64 {
        self.coefficients().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest coefficientwise difference to `other`.
    pub fn max_abs_diff(&self, other: &QuarticForm) -> f64 {
        self.coefficients()
            .iter()
            .zip(other.coefficients())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, s: f64) -> QuarticForm {
        let c = self.coefficients();
        QuarticForm::from(c.map(|v| v * s))
    }

    pub fn eval(&self, p: Point2) -> f64 {
        let (x, y) = (p.x, p.y);
        let (x2, y2) = (x * x, y * y);
        self.c40 * x2 * x2 + self.c31 * x2 * x * y + self.c22 * x2 * y2 + self.c13 * x * y2 * y + self.c04 * y2 * y2
    }

    /// `(∂_x h, ∂_y h)` at `p`.
    pub fn gradient(&self, p: Point2) -> (f64, f64) {
        let (x, y) = (p.x, p.y);
        let hx = 4.0 * self.c40 * x * x * x + 3.0 * self.c31 * x * x * y + 2.0 * self.c22 * x * y * y + self.c13 * y * y * y;
        let hy = self.c31 * x * x * x + 2.0 * self.c22 * x * x * y + 3.0 * self.c13 * x * y * y + 4.0 * self.c04 * y * y * y;
        (hx, hy)
    }

    /// `(h_xx, h_xy, h_yy)` at `p`, from the closed-form second partials.
    pub fn hessian(&self, p: Point2) -> (f64, f64, f64) {
        let (x, y) = (p.x, p.y);
        let hxx = 12.0 * self.c40 * x * x + 6.0 * self.c31 * x * y + 2.0 * self.c22 * y * y;
        let hxy = 3.0 * self.c31 * x * x + 4.0 * self.c22 * x * y + 3.0 * self.c13 * y * y;
        let hyy = 2.0 * self.c22 * x * x + 6.0 * self.c13 * x * y + 12.0 * self.c04 * y * y;
        (hxx, hxy, hyy)
    }

    pub fn hessian_det(&self, p: Point2) -> f64 {
        let (hxx, hxy, hyy) = self.hessian(p);
        hxx * hyy - hxy * hxy
    }

    /// The Hessian determinant as a quartic form in its own right.
    pub fn hessian_det_form(&self) -> QuarticForm {
        let hxx = Poly::new(vec![12.0 * self.c40, 6.0 * self.c31, 2.0 * self.c22]);
        let hxy = Poly::new(vec![3.0 * self.c31, 4.0 * self.c22, 3.0 * self.c13]);
        let hyy = Poly::new(vec![2.0 * self.c22, 6.0 * self.c13, 12.0 * self.c04]);
        let det = hxx.mul(&hyy).sub(&hxy.mul(&hxy));
        QuarticForm::from_dehomogenized(&det)
    }

    /// Builds the form whose restriction to `x = 1` is `p(y)` (index = power of `y`).
    pub fn from_dehomogenized(p: &Poly) -> QuarticForm {
        QuarticForm::new(p.coeff(0), p.coeff(1), p.coeff(2), p.coeff(3), p.coeff(4))
    }

    /// `h(1, t)` as a polynomial in `t`.
    pub fn dehomogenize_x(&self) -> Poly {
        Poly::new(self.coefficients().to_vec())
    }

    /// `h(t, 1)` as a polynomial in `t`.
    pub fn dehomogenize_y(&self) -> Poly {
        let c = self.coefficients();
        Poly::new(vec![c[4], c[3], c[2], c[1], c[0]])
    }

    pub fn classify_point(&self, p: Point2, eps: f64) -> Hyperbolicity {
        let (hxx, hxy, hyy) = self.hessian(p);
        let det = hxx * hyy - hxy * hxy;
        let band = eps * (hxx * hxx + 2.0 * hxy * hxy + hyy * hyy);
        if det.abs() <= band {
            Hyperbolicity::Ambiguous
        } else if det < 0.0 {
            Hyperbolicity::Hyperbolic
        } else {
            Hyperbolicity::NotHyperbolic
        }
    }

    /// Strict test `det ∂²h(p) < −ε_sign ‖∂²h(p)‖²` (Frobenius norm), unchanged by scaling `h` or `p`.
    pub fn is_hyperbolic_point(&self, p: Point2) -> bool {
        self.classify_point(p, EPS_SIGN) == Hyperbolicity::Hyperbolic
    }

    /// `A*h`, defined by `(A*h)(p) = h(A p)`.
    pub fn pullback(&self, a: &LinearMap2) -> QuarticForm {
        let px = Poly::linear(a.a11, a.a12);
        let py = Poly::linear(a.a21, a.a22);
        let c = self.coefficients();
        let mut acc = Poly::zero();
        for (k, ck) in c.iter().enumerate() {
            let term = px.pow(4 - k as u32).mul(&py.pow(k as u32)).scale(*ck);
            acc = acc.add(&term);
        }
        QuarticForm::from_dehomogenized(&acc)
    }
}

impl fmt::Display for QuarticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} x^4 + {} x^3y + {} x^2y^2 + {} xy^3 + {} y^4",
            self.c40, self.c31, self.c22, self.c13, self.c04
        )
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scaled(&self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    /// The unit vector at angle `theta`.
    pub fn from_angle(theta: f64) -> Point2 {
        Point2::new(theta.cos(), theta.sin())
    }
}

impl LinearMap2 {
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }

    /// Matrix with the given columns.
    pub fn from_columns(c1: Point2, c2: Point2) -> Self {
        Self::new(c1.x, c2.x, c1.y, c2.y)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn inverse(&self) -> Option<LinearMap2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Self::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(self.a11 * p.x + self.a12 * p.y, self.a21 * p.x + self.a22 * p.y)
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &LinearMap2) -> LinearMap2 {
        Self::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }

    pub fn column1(&self) -> Point2 {
        Point2::new(self.a11, self.a21)
    }

    pub fn column2(&self) -> Point2 {
        Point2::new(self.a12, self.a22)
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22].iter().all(|v| v.is_finite())
    }

    /// Condition number in the spectral norm.
    pub fn condition_number(&self) -> f64 {
        let m = nalgebra::Matrix2::new(self.a11, self.a12, self.a21, self.a22);
        let sv = m.singular_values();
        let (hi, lo) = (sv.max(), sv.min());
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn s3() -> f64 {
        3f64.sqrt()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(QuarticForm::standard(0.0, 0.25).eval(Point2::new(1.0, 0.0)), 1.0);
        let lb = 2.0 * SQRT2 / (3.0 * s3());
        let hb = QuarticForm::standard(lb, -1.0 / 12.0);
        assert!(hb.eval(Point2::new(1.0, 6f64.sqrt())).abs() < 1e-13);
        let hc = QuarticForm::standard(2.0 / (3.0 * s3()), 0.0);
        assert!(hc.eval(Point2::new(1.0, s3())).abs() < 1e-14);
    }

    #[test]
    fn gradient_examples() {
        let (gx, gy) = QuarticForm::standard(0.0, 0.25).gradient(Point2::new(1.0, SQRT2));
        assert!(gx.abs() < 1e-14 && gy.abs() < 1e-14);

        let lb = 2.0 * SQRT2 / (3.0 * s3());
        let (gx, gy) = QuarticForm::standard(lb, -1.0 / 12.0).gradient(Point2::new(1.0, -SQRT2 / s3()));
        assert!((gx - 64.0 / 27.0).abs() < 1e-13);
        assert!((gy - 32.0 * SQRT2 / (9.0 * s3())).abs() < 1e-13);

        let h = QuarticForm::new(0.3, -1.2, 2.0, 0.7, -0.1);
        assert_eq!(h.gradient(Point2::new(0.0, 0.0)), (0.0, 0.0));
    }

    #[test]
    fn hessian_det_matches_closed_form_for_axis_family() {
        for &k in &[-1.0, -0.2, 0.1, 0.25, 0.7] {
            let h = QuarticForm::standard(0.0, k);
            assert!((h.hessian_det(Point2::new(0.0, 1.0)) + 24.0 * k).abs() < 1e-13);
            assert!((h.hessian_det(Point2::new(1.0, 0.0)) + 24.0).abs() < 1e-13);
            for &(x, y) in &[(0.3f64, -1.1f64), (2.0, 0.5)] {
                let expect = 12.0 * (-2.0 * x.powi(4) - (1.0 - 12.0 * k) * x * x * y * y - 2.0 * k * y.powi(4));
                let got = h.hessian_det(Point2::new(x, y));
                assert!((got - expect).abs() < 1e-12 * expect.abs().max(1.0));
                let via_form = h.hessian_det_form().eval(Point2::new(x, y));
                assert!((via_form - expect).abs() < 1e-12 * expect.abs().max(1.0));
            }
        }
    }

    #[test]
    fn hyperbolic_examples() {
        assert!(QuarticForm::standard(0.0, 0.25).is_hyperbolic_point(Point2::new(1.0, 0.0)));
        assert!(QuarticForm::standard(0.0, 0.5).is_hyperbolic_point(Point2::new(0.0, 1.0)));
        let h = QuarticForm::standard(0.0, 0.25);
        assert!(!h.is_hyperbolic_point(Point2::new(1.0, SQRT2)));
        assert_eq!(h.classify_point(Point2::new(1.0, SQRT2), EPS_SIGN), Hyperbolicity::Ambiguous);
    }

    #[test]
    fn pullback_examples() {
        let h = QuarticForm::new(0.3, -1.2, 2.0, 0.7, -0.1);
        assert_eq!(h.pullback(&LinearMap2::identity()), h);

        let l = 2.0 / (3.0 * s3());
        let flipped = QuarticForm::standard(l, 0.0).pullback(&LinearMap2::diag(1.0, -1.0));
        assert!(flipped.max_abs_diff(&QuarticForm::standard(-l, 0.0)) < 1e-15);

        // the shear-and-scale that carries the class-c standard form onto xy(x-y)^2
        let a = crate::constants::class_c_factor_map();
        let target = QuarticForm::new(0.0, 1.0, -2.0, 1.0, 0.0);
        let got = QuarticForm::standard(l, 0.0).pullback(&a);
        assert!(got.max_abs_diff(&target) < 1e-14, "{got}");

        // with the two lower entries exchanged the result is not even divisible by y
        let swapped = LinearMap2::new(a.a11, a.a12, a.a22, a.a21);
        let bad = QuarticForm::standard(l, 0.0).pullback(&swapped);
        assert!(bad.c04.abs() < 1e-14 && bad.max_abs_diff(&target) > 0.1);
    }

    #[test]
    fn serde_shapes() {
        let h = QuarticForm::new(1.0, 0.0, -1.0, 1.0, -0.5);
        assert_eq!(serde_json::to_string(&h).unwrap(), "[1.0,0.0,-1.0,1.0,-0.5]");
        let a: LinearMap2 = serde_json::from_str("[[1,2],[3,4]]").unwrap();
        assert_eq!(a, LinearMap2::new(1.0, 2.0, 3.0, 4.0));
    }
}
