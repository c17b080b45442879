//! The acceptance criteria as a runnable table, used by `quartic-moduli verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classification::{self, ClassTag};
use crate::constants::{self, l_b, l_c, K_A, K_B, K_W1};
use crate::moduli_plane::{self, ModuliPoint, RegionTag};
use crate::quartic_form::{LinearMap2, QuarticForm};
use crate::slice_analysis;
use crate::standard_form::{self, StandardForm};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!("[{}] {:>2} {:<28} {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

fn result(id: u32, name: &'static str, outcome: Result<String, String>) -> CriterionResult {
    match outcome {
        Ok(detail) => CriterionResult { id, name, passed: true, detail },
        Err(detail) => CriterionResult { id, name, passed: false, detail },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs all fifteen criteria.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        result(1, "fixed points", fixed_points()),
        result(2, "boundary constants", boundary_constants()),
        result(3, "constant U", constant_u()),
        result(4, "domains", domains()),
        result(5, "classification grid", classification_grid()),
        result(6, "GL(2) invariance", gl2_invariance()),
        result(7, "velocity identity", velocity()),
        result(8, "tangency", tangency()),
        result(9, "first integral", first_integral_drift()),
        result(10, "flat point", flat_point()),
        result(11, "automorphisms", automorphism_soundness()),
        result(12, "component counts", component_counts()),
        result(13, "singular at infinity", singularity_table()),
        result(14, "limit geometries", limit_geometry_table()),
        result(15, "reduction endpoints", reduction_endpoints()),
    ]
}

fn norm(v: (f64, f64)) -> f64 {
    v.0.hypot(v.1)
}

fn fixed_points() -> Result<String, String> {
    let fps = moduli_plane::fixed_points();
    let worst = fps.iter().map(|p| norm(moduli_plane::field(*p))).fold(0.0, f64::max);
    ensure(worst <= 1e-14, || format!("|V| = {worst:e} at a fixed point"))?;
    let mut min = f64::INFINITY;
    for i in 0..100 {
        for j in 0..100 {
            let p = ModuliPoint::new(-1.5 + 3.0 * i as f64 / 99.0, -0.6 + 1.9 * j as f64 / 99.0);
            if fps.iter().all(|f| f.dist(p) > 1e-2) {
                min = min.min(norm(moduli_plane::field(p)));
            }
        }
    }
    ensure(min >= 1e-3, || format!("|V| = {min:e} away from the fixed points"))?;
    Ok(format!("max |V| at zeros {worst:.1e}, min on grid {min:.3e}"))
}

fn boundary_constants() -> Result<String, String> {
    use moduli_plane::{boundary_u, boundary_v, boundary_w};
    let s3 = 3f64.sqrt();
    let checks = [
        (boundary_u(0.0), 2.0 / (3.0 * s3)),
        (boundary_u(0.25), 0.0),
        (boundary_u(K_B), l_b()),
        (boundary_w(K_B), l_b()),
        (boundary_v(K_B), l_b()),
        (boundary_w(K_W1), 1.0),
        (boundary_w(-1.0 / 6.0), 42f64.sqrt() / 9.0),
        (boundary_v(-0.5), 4.0 / 3.0),
    ];
    let mut worst = 0.0f64;
    for (got, want) in checks {
        let got = got.map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
    }
    ensure(worst <= 1e-12, || format!("worst deviation {worst:e}"))?;
    Ok(format!("worst deviation {worst:.1e}"))
}

fn constant_u() -> Result<String, String> {
    let u = moduli_plane::constant_u();
    let residual = (moduli_plane::boundary_u(u).map_err(|e| e.to_string())? - 1.0).abs();
    ensure(format!("{u:.9}") == "1.054784062", || format!("U = {u}"))?;
    ensure(residual <= 1e-12, || format!("u(U) - 1 = {residual:e}"))?;
    Ok(format!("U = {u:.12}, residual {residual:.1e}"))
}

fn domains() -> Result<String, String> {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let cases = [((0.0, K_A), (-s2, s2)), ((l_b(), K_B), (-s2 / s3, s6)), ((l_c(), 0.0), (-s3 / 2.0, s3))];
    let mut worst = 0.0f64;
    for ((l, k), (lo, hi)) in cases {
        let p = slice_analysis::domain(l, k).map_err(|e| e.to_string())?;
        worst = worst.max((p.dom_lo - lo).abs()).max((p.dom_hi - hi).abs());
    }
    ensure(worst <= 1e-10, || format!("endpoint error {worst:e}"))?;
    Ok(format!("endpoint error {worst:.1e}"))
}

/// Closedness read directly off the inequalities that describe the non-closed set.
fn closed_by_inequalities(l: f64, k: f64) -> bool {
    let a = l.abs();
    if k > K_A {
        false
    } else if k >= K_B {
        a <= moduli_plane::boundary_u(k).unwrap()
    } else {
        a < moduli_plane::boundary_w(k).unwrap()
    }
}

fn distance_to_boundaries(l: f64, k: f64) -> f64 {
    let mut d = (k - K_B).abs().min((k - K_A).abs());
    if k >= K_B {
        d = d.min((l - moduli_plane::boundary_u(k).unwrap()).abs());
    } else {
        d = d.min((l - moduli_plane::boundary_w(k).unwrap()).abs());
    }
    d
}

fn classification_grid() -> Result<String, String> {
    let (mut checked, mut skipped) = (0, 0);
    for i in 0..20 {
        for j in 0..20 {
            let l = 1.5 * i as f64 / 19.0;
            let k = -0.6 + 1.9 * j as f64 / 19.0;
            if distance_to_boundaries(l, k) <= 1e-6 {
                skipped += 1;
                continue;
            }
            let r = classification::classify(&QuarticForm::standard(l, k), None);
            ensure(r.closed == closed_by_inequalities(l, k), || format!("({l}, {k}) classified {} ", r.class_tag))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} points agree, {skipped} on boundaries skipped"))
}

/// The eight class representatives used across the criteria.
pub fn representatives() -> [(ClassTag, ModuliPoint); 8] {
    [
        (ClassTag::Closed_A, ModuliPoint::new(0.0, K_A)),
        (ClassTag::Closed_B, ModuliPoint::new(l_b(), K_B)),
        (ClassTag::Closed_C, ModuliPoint::new(l_c(), 0.0)),
        (ClassTag::Closed_D, ModuliPoint::new(0.0, -0.3)),
        (ClassTag::Incomplete_A, ModuliPoint::new(0.0, 0.6)),
        (ClassTag::Incomplete_B, ModuliPoint::new(1.0, 0.5)),
        (ClassTag::Incomplete_C, ModuliPoint::new(1.0, K_W1)),
        (ClassTag::Incomplete_D, ModuliPoint::new(1.0, constants::constant_u())),
    ]
}

/// A random invertible map with condition number at most `max_cond`.
pub fn random_map(rng: &mut impl Rng, max_cond: f64) -> LinearMap2 {
    loop {
        let a = LinearMap2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if a.det().abs() > 1e-3 && a.condition_number() <= max_cond {
            return a;
        }
    }
}

fn gl2_invariance() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for (tag, p) in representatives() {
        let h = QuarticForm::standard(p.l, p.k);
        let base = classification::classify(&h, None);
        ensure(base.class_tag == tag, || format!("representative of {tag} classified {}", base.class_tag))?;
        for _ in 0..20 {
            let a = random_map(&mut rng, 1e3);
            let r = classification::classify(&h.pullback(&a), None);
            ensure(r.class_tag == tag, || format!("{tag} moved by {a:?} classified {}", r.class_tag))?;
            if let (Some(x), Some(y)) = (base.parameter, r.parameter) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    ensure(worst <= 1e-6, || format!("parameter drift {worst:e}"))?;
    Ok(format!("160 transforms, parameter drift {worst:.1e}"))
}

fn random_closed_point(rng: &mut impl Rng) -> ModuliPoint {
    loop {
        let p = ModuliPoint::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.6..0.25));
        let reg = moduli_plane::region(p);
        if matches!(reg.tag, RegionTag::ClosedInterior_Lower | RegionTag::ClosedInterior_Upper) && reg.signed_distance.abs() > 1e-3 {
            return p;
        }
    }
}

fn velocity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let p = random_closed_point(&mut rng);
        let sf = StandardForm::from_lk(p.l, p.k);
        let plus = standard_form::lk_curve(&sf, h).map_err(|e| e.to_string())?;
        let minus = standard_form::lk_curve(&sf, -h).map_err(|e| e.to_string())?;
        let fd = ((plus.0 - minus.0) / (2.0 * h), (plus.1 - minus.1) / (2.0 * h));
        let v = moduli_plane::field(p);
        worst = worst.max((fd.0 - v.0).abs()).max((fd.1 - v.1).abs());
    }
    ensure(worst <= 1e-6, || format!("difference {worst:e}"))?;
    Ok(format!("30 points, difference {worst:.1e}"))
}

fn tangency() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..50 {
        // both branches of u, avoiding the cusp of the direction field at (0, 1/4)
        let k = if i < 25 { K_B + 0.005 + (0.24 - K_B) * i as f64 / 25.0 } else { 0.26 + 1.0 * (i - 25) as f64 / 25.0 };
        let u = moduli_plane::boundary_u(k).unwrap();
        let (dl, dk) = moduli_plane::field(ModuliPoint::new(u, k));
        let slope = moduli_plane::boundary_u_slope(k).unwrap();
        worst = worst.max((dl / dk - slope).abs() / slope.abs().max(1.0));
    }
    for i in 0..50 {
        let k = K_B - 0.005 - 2.0 * i as f64 / 49.0;
        let w = moduli_plane::boundary_w(k).unwrap();
        let (dl, dk) = moduli_plane::field(ModuliPoint::new(w, k));
        let slope = moduli_plane::boundary_w_slope(k).unwrap();
        worst = worst.max((dl / dk - slope).abs() / slope.abs().max(1.0));
    }
    ensure(worst <= 1e-8, || format!("slope mismatch {worst:e}"))?;
    Ok(format!("100 graph points, slope mismatch {worst:.1e}"))
}

fn first_integral_drift() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let regions = [
        (RegionTag::ClosedInterior_Lower, (-1.2, 1.2), (-1.0, -0.09)),
        (RegionTag::ClosedInterior_Upper, (-0.5, 0.5), (-0.08, 0.24)),
        (RegionTag::Incomplete_AboveBell, (-1.0, 1.0), (0.26, 1.5)),
    ];
    let mut worst = 0.0f64;
    for (tag, lr, kr) in regions {
        let mut n = 0;
        while n < 20 {
            let p = ModuliPoint::new(rng.gen_range(lr.0..lr.1), rng.gen_range(kr.0..kr.1));
            let reg = moduli_plane::region(p);
            if reg.tag != tag || reg.signed_distance.abs() < 1e-3 {
                continue;
            }
            let c0 = moduli_plane::first_integral(p).map_err(|e| e.to_string())?.c;
            for arc in [3.0, -3.0] {
                let path = moduli_plane::trajectory(p, arc, 20.0, 1e-2).map_err(|e| e.to_string())?;
                for (_, q) in path {
                    if moduli_plane::region(q).tag != tag {
                        break;
                    }
                    let c = moduli_plane::first_integral(q).map_err(|e| e.to_string())?.c;
                    worst = worst.max((c - c0).abs() / c0.abs());
                }
            }
            n += 1;
        }
    }
    ensure(worst <= 1e-6, || format!("relative drift {worst:e}"))?;
    Ok(format!("60 trajectories, relative drift {worst:.1e}"))
}

fn flat_point() -> Result<String, String> {
    let (l, k) = (42f64.sqrt() / 9.0, -1.0 / 6.0);
    let t0 = (21f64.sqrt() - 3.0) / 2f64.sqrt();
    let roots = slice_analysis::metric_numerator_poly(l, k).real_root_values();
    let t = roots.iter().copied().min_by(|a, b| (a - t0).abs().total_cmp(&(b - t0).abs())).ok_or("no metric root")?;
    let f = slice_analysis::slice_poly(l, k).f.eval(t);
    ensure((t - t0).abs() <= 1e-10, || format!("t0 = {t}"))?;
    ensure((f - (6.0 * 21f64.sqrt() - 27.0)).abs() <= 1e-10, || format!("f(t0) = {f}"))?;
    let closed = slice_analysis::is_closed(l, k).map_err(|e| e.to_string())?;
    ensure(!closed, || "reported closed".into())?;
    Ok(format!("t0 = {t:.12}, f(t0) = {f:.12}, not closed"))
}

fn family_samples() -> Vec<(ClassTag, Option<f64>)> {
    vec![
        (ClassTag::Closed_A, None),
        (ClassTag::Closed_B, None),
        (ClassTag::Closed_C, None),
        (ClassTag::Closed_D, Some(-0.5)),
        (ClassTag::Closed_D, Some(0.0)),
        (ClassTag::Closed_D, Some(0.1)),
        (ClassTag::Incomplete_A, Some(0.3)),
        (ClassTag::Incomplete_A, Some(1.0)),
        (ClassTag::Incomplete_A, Some(3.0)),
        (ClassTag::Incomplete_B, Some(-0.3)),
        (ClassTag::Incomplete_B, Some(0.0)),
        (ClassTag::Incomplete_B, Some(0.5)),
        (ClassTag::Incomplete_C, None),
        (ClassTag::Incomplete_D, None),
    ]
}

fn automorphism_soundness() -> Result<String, String> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (tag, p) in family_samples() {
        let g = classification::automorphisms(tag, p).map_err(|e| format!("{tag}: {e}"))?;
        let rep = tag.representative(p).unwrap();
        let h = QuarticForm::standard(rep.l, rep.k);
        let mut maps = g.discrete_generators.clone();
        if let Some(fam) = g.continuous_generator {
            maps.extend(classification::FAMILY_SAMPLES.iter().map(|&t| fam.at(t)));
        }
        for m in maps {
            worst = worst.max(h.pullback(&m).max_abs_diff(&h) / h.norm());
            count += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("residual {worst:e}"))?;
    Ok(format!("{count} generators, residual {worst:.1e}"))
}

fn component_counts() -> Result<String, String> {
    for (tag, p) in family_samples() {
        let rep = tag.representative(p).unwrap();
        let n = slice_analysis::count_components(&QuarticForm::standard(rep.l, rep.k));
        let want = match tag {
            ClassTag::Closed_B => 2,
            ClassTag::Closed_D if rep.k <= 0.0 => 2,
            _ => 4,
        };
        ensure(n == want, || format!("{tag} {p:?}: {n} components"))?;
    }
    Ok("all samples match".into())
}

fn singularity_table() -> Result<String, String> {
    for (tag, p) in family_samples() {
        let rep = tag.representative(p).unwrap();
        let s = slice_analysis::is_singular_at_infinity(rep.l, rep.k);
        let want = matches!(tag, ClassTag::Closed_A | ClassTag::Closed_B | ClassTag::Closed_C | ClassTag::Incomplete_D);
        ensure(s == want, || format!("{tag} {p:?}: singular_at_infinity = {s}"))?;
    }
    Ok("true exactly for Closed_A, Closed_B, Closed_C, Incomplete_D".into())
}

fn limit_geometry_table() -> Result<String, String> {
    use ClassTag::*;
    let expected: [(ClassTag, &[ClassTag]); 8] = [
        (Closed_A, &[Closed_A, Closed_A]),
        (Closed_B, &[Closed_B, Closed_B]),
        (Closed_C, &[Closed_A, Closed_B]),
        (Closed_D, &[Closed_B, Closed_B]),
        (Incomplete_A, &[]),
        (Incomplete_B, &[Closed_B]),
        (Incomplete_C, &[Closed_B]),
        (Incomplete_D, &[Closed_A]),
    ];
    for (tag, want) in expected {
        let mut got: Vec<ClassTag> = classification::limit_geometries(tag, None).iter().filter_map(|r| r.result).collect();
        got.sort_by_key(|t| t.name());
        ensure(got == want, || format!("{tag}: {got:?}"))?;
    }
    let mut worst = 0.0f64;
    let samples = [ModuliPoint::new(l_c(), 0.0), ModuliPoint::new(0.0, -0.5), ModuliPoint::new(0.0, 0.0), ModuliPoint::new(0.0, 0.2)];
    for p in samples {
        let tag = classification::classify(&QuarticForm::standard(p.l, p.k), None).class_tag;
        let sf = StandardForm::from_lk(p.l, p.k);
        for entry in classification::limit_geometries(tag, Some(p.k)) {
            let found = classification::verify_limit(&sf, entry.direction).map_err(|e| e.to_string())?;
            ensure(found.result == entry.result, || format!("{p:?} {:?}: {:?}", entry.direction, found.result))?;
            let target = match entry.result {
                Some(Closed_A) => ModuliPoint::new(0.0, K_A),
                _ => ModuliPoint::new(l_b(), K_B),
            };
            worst = worst.max(found.numeric_limit.unwrap().dist(target));
        }
    }
    ensure(worst <= 1e-5, || format!("limit error {worst:e}"))?;
    Ok(format!("table matches, limit error {worst:.1e}"))
}

fn reduction_endpoints() -> Result<String, String> {
    let at_w = classification::reduce_factor_form(K_W1).map_err(|e| e.to_string())?;
    ensure(at_w.c.abs() <= 1e-8, || format!("c(-25/72) = {}", at_w.c))?;
    let c_u = classification::extrapolate_c_at_u().map_err(|e| e.to_string())?;
    ensure((c_u + 2.0).abs() <= 1e-4, || format!("c(U) = {c_u}"))?;
    let mut worst = at_w.residual;
    for i in 0..10 {
        let k = K_W1 + (constants::constant_u() - K_W1) * i as f64 / 10.0;
        worst = worst.max(classification::reduce_factor_form(k).map_err(|e| e.to_string())?.residual);
    }
    ensure(worst <= 1e-8, || format!("residual {worst:e}"))?;
    let kz = constants::k_of_z(constants::z_max());
    ensure((kz - K_W1).abs() <= 1e-12, || format!("K(z_max) = {kz}"))?;
    Ok(format!("c(-25/72) = {:.1e}, c(U) = {c_u:.6}, residual {worst:.1e}", at_w.c))
}
