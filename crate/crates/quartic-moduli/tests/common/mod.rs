//! Closed forms written out independently of the library, used as test oracles.
#![allow(dead_code)]

use quartic_moduli::{LinearMap2, QuarticForm};
use rand::Rng;

pub fn s2() -> f64 {
    2f64.sqrt()
}
pub fn s3() -> f64 {
    3f64.sqrt()
}

pub fn l_b() -> f64 {
    2.0 * s2() / (3.0 * s3())
}

pub fn l_c() -> f64 {
    2.0 / (3.0 * s3())
}

pub fn field(l: f64, k: f64) -> (f64, f64) {
    (4.5 * l * l + 4.0 * k - 1.0, l * (6.0 * k + 0.5))
}

pub fn u(k: f64) -> f64 {
    s2() / (3.0 * s3()) * (1.0 - 36.0 * k + (1.0 + 12.0 * k).powf(1.5)).sqrt()
}

pub fn v(k: f64) -> f64 {
    4.0 * (-2.0 * k).sqrt() / 3.0
}

pub fn w(k: f64) -> f64 {
    (6.0 - 216.0 * k).sqrt() / 9.0
}

pub fn du(k: f64) -> f64 {
    let r = (1.0 + 12.0 * k).sqrt();
    6.0 * (-2.0 + r) / (6.0 - 216.0 * k + 6.0 * r * r * r).sqrt()
}

pub fn dw(k: f64) -> f64 {
    -12.0 / (6.0 - 216.0 * k).sqrt()
}

pub fn big_u() -> f64 {
    let s57 = 57f64.sqrt();
    let q = 46.0 + 6.0 * s57;
    (4.0 + (31.0 + 3.0 * s57) * q.powf(-1.0 / 3.0) + (100.0 + 12.0 * s57) * q.powf(-2.0 / 3.0)) / 24.0
}

pub fn z_max() -> f64 {
    let s6 = 6f64.sqrt();
    (18.0 - 2.0 * s6 - (48.0 + 378.0 * s6).sqrt()) / 25.0
}

pub fn k_of_z(z: f64) -> f64 {
    (-1.0 + z * z - z * z * z) / z.powi(4)
}

/// The conserved quantity of the vector field on the charts where it has a closed form.
pub fn conserved(l: f64, k: f64) -> f64 {
    if k < -1.0 / 12.0 {
        let phi = l / w(k);
        (1.0 - phi * phi) * (1.0 - 36.0 * k) / (-(1.0 + 12.0 * k).powi(3)).sqrt()
    } else {
        let phi = l / u(k);
        (1.0 - phi * phi) * (1.0 - 36.0 * k + (1.0 + 12.0 * k).powf(1.5)) / (1.0 + 12.0 * k).powf(1.5)
    }
}

/// Closedness of the curve through `(L, K)` read from the description of the non-closed set.
pub fn closed(l: f64, k: f64) -> bool {
    let a = l.abs();
    if k > 0.25 {
        false
    } else if k >= -1.0 / 12.0 {
        a <= u(k)
    } else {
        a < w(k)
    }
}

/// `f(t) = 1 − t² + L t³ + K t⁴` and its first two derivatives.
pub fn slice(l: f64, k: f64, t: f64) -> (f64, f64, f64) {
    (
        1.0 - t * t + l * t.powi(3) + k * t.powi(4),
        -2.0 * t + 3.0 * l * t * t + 4.0 * k * t.powi(3),
        -2.0 + 6.0 * l * t + 12.0 * k * t * t,
    )
}

/// `h(a x + b y, c x + d y)` evaluated directly.
pub fn eval_form(h: &QuarticForm, x: f64, y: f64) -> f64 {
    let [c40, c31, c22, c13, c04] = h.coefficients();
    c40 * x.powi(4) + c31 * x.powi(3) * y + c22 * x * x * y * y + c13 * x * y.powi(3) + c04 * y.powi(4)
}

/// Largest deviation of `h ∘ g` from `h` over a spread of unit vectors, relative to `|h|`.
pub fn invariance_defect(h: &QuarticForm, g: &LinearMap2) -> f64 {
    let scale = h.coefficients().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    (0..12)
        .map(|i| {
            let th = 0.37 + i as f64 * std::f64::consts::PI / 12.0;
            let (x, y) = (th.cos(), th.sin());
            let gx = g.a11 * x + g.a12 * y;
            let gy = g.a21 * x + g.a22 * y;
            let gn = gx.hypot(gy).max(1.0).powi(4);
            (eval_form(h, gx, gy) - eval_form(h, x, y)).abs() / (scale * gn)
        })
        .fold(0.0, f64::max)
}

pub fn matrix_condition(a: &LinearMap2) -> f64 {
    let fro2 = a.a11 * a.a11 + a.a12 * a.a12 + a.a21 * a.a21 + a.a22 * a.a22;
    let det = (a.a11 * a.a22 - a.a12 * a.a21).abs();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    ((fro2 + disc) / (fro2 - disc)).sqrt()
}

/// Entries uniform in `[−2, 2]`, rejected until the condition number is at most `max_cond`.
pub fn random_map(rng: &mut impl Rng, max_cond: f64) -> LinearMap2 {
    loop {
        let a = LinearMap2::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let c = matrix_condition(&a);
        if c.is_finite() && c <= max_cond {
            return a;
        }
    }
}

/// `R(α) diag(s, ±s/κ) R(β)` with `log κ` uniform on `[0, log max_cond]`, so that
/// badly conditioned maps up to the bound are actually drawn.
pub fn spread_map(rng: &mut impl Rng, max_cond: f64) -> LinearMap2 {
    let rot = |t: f64| LinearMap2::new(t.cos(), -t.sin(), t.sin(), t.cos());
    let kappa = rng.gen_range(0.0..max_cond.ln()).exp();
    let s = rng.gen_range(0.5..2.0);
    let flip = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let tau = std::f64::consts::TAU;
    rot(rng.gen_range(0.0..tau))
        .compose(&LinearMap2::diag(s, flip * s / kappa))
        .compose(&rot(rng.gen_range(0.0..tau)))
}
