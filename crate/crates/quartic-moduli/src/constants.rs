//! Exact constants of the moduli plane, evaluated in double precision.

/// `2√2/(3√3)`, the `L` coordinate of the non-axial fixed points of the moduli field.
pub fn l_b() -> f64 {
    2.0 * 2f64.sqrt() / (3.0 * 3f64.sqrt())
}

/// `K` coordinate of the axial fixed point `(0, 1/4)`.
pub const K_A: f64 = 0.25;

/// `K` coordinate of the fixed points `(±2√2/(3√3), −1/12)` and of the line `m`.
pub const K_B: f64 = -1.0 / 12.0;

/// `w⁻¹(1)`: the `K` value where the sharp lower boundary crosses `L = 1`.
pub const K_W1: f64 = -25.0 / 72.0;

/// `L` coordinate of the class-c representative `(2/(3√3), 0)`.
pub fn l_c() -> f64 {
    2.0 / (3.0 * 3f64.sqrt())
}

fn cube_root_term() -> f64 {
    46.0 + 6.0 * 57f64.sqrt()
}

/// `U = u_upper⁻¹(1)` from its radical expression.
pub fn constant_u() -> f64 {
    let s57 = 57f64.sqrt();
    let q = cube_root_term();
    (4.0 + (31.0 + 3.0 * s57) * q.powf(-1.0 / 3.0) + (100.0 + 12.0 * s57) * q.powf(-2.0 / 3.0)) / 24.0
}

/// Most negative admissible first root of `f_{1,K}`, reached as `K → U`.
pub fn z_min() -> f64 {
    let q = cube_root_term();
    (2.0 - q.cbrt() - 4.0 / q.cbrt()) / 3.0
}

/// First negative root of `f_{1,−25/72}`.
pub fn z_max() -> f64 {
    let s6 = 6f64.sqrt();
    (18.0 - 2.0 * s6 - (48.0 + 378.0 * s6).sqrt()) / 25.0
}

/// `K(z) = (−1 + z² − z³)/z⁴`, inverse of `K ↦` largest negative root of `f_{1,K}`.
pub fn k_of_z(z: f64) -> f64 {
    (-1.0 + z * z - z * z * z) / (z * z * z * z)
}

/// Shear parameter making the `K = U` form symmetric after the first root is moved to `y = 0`.
pub fn shear_c_at_u() -> f64 {
    let s57 = 57f64.sqrt();
    let q = cube_root_term();
    let q13 = q.cbrt();
    let q23 = q13 * q13;
    let num = 24.0 + (2.0 * s57 - 18.0) * q13 + (s57 - 9.0) * q23;
    let den = -80.0 + (2.0 * s57 - 2.0) * q13 + (-5.0 * s57 + 37.0) * q23;
    num / den
}

/// Linear map `A` with `A*(x⁴ − x²y² + 2/(3√3) xy³) = xy(x − y)²`.
///
/// It sends `x` to a multiple of `x`, the simple factor `y + (√3/2)x` to a
/// multiple of `y` and the double factor `y − √3x` to a multiple of `x − y`.
pub fn class_c_factor_map() -> crate::LinearMap2 {
    let r2 = std::f64::consts::SQRT_2;
    crate::LinearMap2::new(
        r2 * 3f64.powf(-0.75),
        0.0,
        -3f64.powf(-0.25) / r2,
        3f64.powf(0.75) / r2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_value_of_u() {
        assert!((constant_u() - 1.054784062).abs() < 5e-10);
    }

    #[test]
    fn endpoints_of_z_range_map_to_k_range() {
        assert!((k_of_z(z_max()) - K_W1).abs() < 1e-12);
        assert!((k_of_z(z_min()) - constant_u()).abs() < 1e-12);
        assert!(z_min() < z_max() && z_max() < 0.0);
    }
}
