//! The fifteen acceptance criteria, one line of output each.
//!
//! Runs without the libtest harness so the summary is printed on every `cargo test`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use quartic_moduli::classification::{self, ClassTag, Direction};
use quartic_moduli::moduli_plane::{self, ModuliPoint, RegionTag};
use quartic_moduli::slice_analysis;
use quartic_moduli::standard_form::{self, StandardForm};
use quartic_moduli::QuarticForm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c01_fixed_points() -> Outcome {
    let zeros = [(0.0, 0.25), (l_b(), -1.0 / 12.0), (-l_b(), -1.0 / 12.0)];
    let mut worst = 0.0f64;
    for (l, k) in zeros {
        let (a, b) = moduli_plane::field(ModuliPoint::new(l, k));
        let (oa, ob) = field(l, k);
        check((a - oa).abs() <= 1e-15 && (b - ob).abs() <= 1e-15, || format!("field disagrees with oracle at ({l}, {k})"))?;
        worst = worst.max(a.hypot(b));
    }
    check(worst <= 1e-14, || format!("|V| = {worst:e} at a zero"))?;
    let lib_zeros = moduli_plane::fixed_points();
    check(lib_zeros.len() == 3, || format!("{} fixed points", lib_zeros.len()))?;
    for z in lib_zeros {
        check(zeros.iter().any(|&(l, k)| (z.l - l).abs() <= 1e-15 && (z.k - k).abs() <= 1e-15), || format!("unexpected fixed point {z:?}"))?;
    }
    let mut floor = f64::INFINITY;
    for i in 0..100 {
        for j in 0..100 {
            let l = -1.5 + 3.0 * i as f64 / 99.0;
            let k = -0.6 + 1.9 * j as f64 / 99.0;
            if zeros.iter().all(|&(zl, zk)| (l - zl).hypot(k - zk) > 1e-2) {
                let (a, b) = moduli_plane::field(ModuliPoint::new(l, k));
                floor = floor.min(a.hypot(b));
            }
        }
    }
    check(floor >= 1e-3, || format!("|V| = {floor:e} on the grid"))?;
    Ok(format!("|V| <= {worst:.1e} at zeros, >= {floor:.3e} elsewhere"))
}

fn c02_boundary_constants() -> Outcome {
    use moduli_plane::{boundary_u, boundary_v, boundary_w};
    let kb = -1.0 / 12.0;
    let cases: [(&str, f64, f64); 8] = [
        ("u(0)", boundary_u(0.0).unwrap(), 2.0 / (3.0 * s3())),
        ("u(1/4)", boundary_u(0.25).unwrap(), 0.0),
        ("u(-1/12)", boundary_u(kb).unwrap(), l_b()),
        ("w(-1/12)", boundary_w(kb).unwrap(), l_b()),
        ("v(-1/12)", boundary_v(kb).unwrap(), l_b()),
        ("w(-25/72)", boundary_w(-25.0 / 72.0).unwrap(), 1.0),
        ("w(-1/6)", boundary_w(-1.0 / 6.0).unwrap(), 42f64.sqrt() / 9.0),
        ("v(-1/2)", boundary_v(-0.5).unwrap(), 4.0 / 3.0),
    ];
    let mut worst = 0.0f64;
    for (name, got, want) in cases {
        check((got - want).abs() <= 1e-12, || format!("{name} = {got}, expected {want}"))?;
        worst = worst.max((got - want).abs());
    }
    for k in [-0.05, 0.1, 0.7] {
        let got = boundary_u(k).unwrap();
        check((got - u(k)).abs() <= 1e-12, || format!("u({k}) = {got} vs {}", u(k)))?;
    }
    for k in [-0.2, -1.0, -3.0] {
        check((boundary_w(k).unwrap() - w(k)).abs() <= 1e-12, || format!("w({k})"))?;
        check((boundary_v(k).unwrap() - v(k)).abs() <= 1e-12, || format!("v({k})"))?;
        check(v(k) > w(k), || format!("v <= w at {k}"))?;
    }
    Ok(format!("8 constants, worst {worst:.1e}"))
}

fn c03_constant_u() -> Outcome {
    let lib = moduli_plane::constant_u();
    check(format!("{lib:.9}") == "1.054784062", || format!("U = {lib}"))?;
    check((lib - big_u()).abs() <= 1e-14, || format!("U = {lib} vs closed form {}", big_u()))?;
    let residual = (u(lib) - 1.0).abs();
    check(residual <= 1e-12, || format!("u_upper(U) - 1 = {residual:e}"))?;
    Ok(format!("U = {lib:.12}, residual {residual:.1e}"))
}

fn c04_domains() -> Outcome {
    let cases = [
        ((0.0, 0.25), (-s2(), s2())),
        ((l_b(), -1.0 / 12.0), (-s2() / s3(), 6f64.sqrt())),
        ((l_c(), 0.0), (-s3() / 2.0, s3())),
    ];
    let mut worst = 0.0f64;
    for ((l, k), (lo, hi)) in cases {
        let p = slice_analysis::domain(l, k).map_err(|e| e.to_string())?;
        let err = (p.dom_lo - lo).abs().max((p.dom_hi - hi).abs());
        check(err <= 1e-10, || format!("dom at ({l}, {k}) = ({}, {})", p.dom_lo, p.dom_hi))?;
        worst = worst.max(err);
    }
    Ok(format!("3 domains, worst endpoint error {worst:.1e}"))
}

fn c05_grid() -> Outcome {
    let (mut agree, mut skipped) = (0, 0);
    for i in 0..20 {
        for j in 0..20 {
            let l = 1.5 * i as f64 / 19.0;
            let k = -0.6 + 1.9 * j as f64 / 19.0;
            let mut dist = (k + 1.0 / 12.0).abs().min((k - 0.25).abs());
            dist = dist.min(if k >= -1.0 / 12.0 { (l - u(k)).abs() } else { (l - w(k)).abs() });
            if dist <= 1e-6 {
                skipped += 1;
                continue;
            }
            let r = classification::classify(&QuarticForm::standard(l, k), None);
            check(r.closed == closed(l, k), || format!("({l:.4}, {k:.4}): {} but predicate says closed = {}", r.class_tag, closed(l, k)))?;
            agree += 1;
        }
    }
    Ok(format!("{agree} points agree, {skipped} skipped"))
}

fn representatives() -> Vec<(ClassTag, f64, f64)> {
    vec![
        (ClassTag::Closed_A, 0.0, 0.25),
        (ClassTag::Closed_B, l_b(), -1.0 / 12.0),
        (ClassTag::Closed_C, l_c(), 0.0),
        (ClassTag::Closed_D, 0.0, -0.3),
        (ClassTag::Incomplete_A, 0.0, 0.6),
        (ClassTag::Incomplete_B, 1.0, 0.5),
        (ClassTag::Incomplete_C, 1.0, -25.0 / 72.0),
        (ClassTag::Incomplete_D, 1.0, big_u()),
    ]
}

fn c06_gl2() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0x6a11);
    let mut worst = 0.0f64;
    let mut worst_cond = 0.0f64;
    for (tag, l, k) in representatives() {
        let h = QuarticForm::standard(l, k);
        let base = classification::classify(&h, None);
        check(base.class_tag == tag, || format!("({l}, {k}) classified {}", base.class_tag))?;
        for _ in 0..20 {
            let a = random_map(&mut rng, 1e3);
            worst_cond = worst_cond.max(matrix_condition(&a));
            let r = classification::classify(&h.pullback(&a), None);
            check(r.class_tag == tag, || format!("{tag} under {a:?} (cond {:.1}) became {}", matrix_condition(&a), r.class_tag))?;
            match (base.parameter, r.parameter) {
                (Some(p), Some(q)) => worst = worst.max((p - q).abs()),
                (None, None) => {}
                (p, q) => return Err(format!("{tag}: parameter {p:?} vs {q:?}")),
            }
        }
    }
    check(worst <= 1e-6, || format!("parameter drift {worst:e}"))?;
    Ok(format!("160 maps up to cond {worst_cond:.0}, parameter drift {worst:.1e}"))
}

fn c07_velocity() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let step = 1e-5;
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 30 {
        let (l, k) = (rng.gen_range(-1.0..1.0), rng.gen_range(-0.6..0.25));
        if !closed(l, k) {
            continue;
        }
        let sf = StandardForm::from_lk(l, k);
        let (lp, kp) = standard_form::lk_curve(&sf, step).map_err(|e| e.to_string())?;
        let (lm, km) = standard_form::lk_curve(&sf, -step).map_err(|e| e.to_string())?;
        let (dl, dk) = field(l, k);
        let err = ((lp - lm) / (2.0 * step) - dl).abs().max(((kp - km) / (2.0 * step) - dk).abs());
        check(err <= 1e-6, || format!("({l}, {k}): difference {err:e}"))?;
        worst = worst.max(err);
        n += 1;
    }
    Ok(format!("30 points, worst difference {worst:.1e}"))
}

fn c08_tangency() -> Outcome {
    let mut worst = 0.0f64;
    let mut test = |l: f64, k: f64, slope: f64, lib_slope: f64| -> Result<(), String> {
        let (dl, dk) = moduli_plane::field(ModuliPoint::new(l, k));
        let err = (dl / dk - slope).abs().max((lib_slope - slope).abs());
        check(err <= 1e-8, || format!("at K = {k}: field ratio {}, slope {slope}", dl / dk))?;
        worst = worst.max(err);
        Ok(())
    };
    for i in 0..50 {
        // both branches of u, staying clear of K = 1/4 where the slope blows up
        let k = if i < 25 { -0.08 + 0.32 * i as f64 / 25.0 } else { 0.27 + 0.05 * (i - 25) as f64 };
        test(moduli_plane::boundary_u(k).unwrap(), k, du(k), moduli_plane::boundary_u_slope(k).unwrap())?;
    }
    for i in 0..50 {
        let k = -0.09 - 0.04 * i as f64;
        test(moduli_plane::boundary_w(k).unwrap(), k, dw(k), moduli_plane::boundary_w_slope(k).unwrap())?;
    }
    Ok(format!("100 points, worst mismatch {worst:.1e}"))
}

fn c09_first_integral() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    // (chart tag, sampling box in L and K)
    let charts = [
        (RegionTag::ClosedInterior_Lower, (-1.3, 1.3), (-1.2, -0.09)),
        (RegionTag::ClosedInterior_Upper, (-0.55, 0.55), (-0.08, 0.245)),
        (RegionTag::Incomplete_AboveBell, (-1.5, 1.5), (0.255, 2.0)),
    ];
    let mut worst = 0.0f64;
    let mut samples = 0;
    for (tag, lr, kr) in charts {
        let mut n = 0;
        while n < 20 {
            let p = ModuliPoint::new(rng.gen_range(lr.0..lr.1), rng.gen_range(kr.0..kr.1));
            let reg = moduli_plane::region(p);
            if reg.tag != tag || reg.signed_distance.abs() < 1e-3 {
                continue;
            }
            let c0 = conserved(p.l, p.k);
            for arc in [4.0, -4.0] {
                let path = moduli_plane::trajectory(p, arc, 10.0, 1e-2).map_err(|e| e.to_string())?;
                for (_, q) in path {
                    if moduli_plane::region(q).tag != tag {
                        break;
                    }
                    let drift = (conserved(q.l, q.k) - c0).abs() / c0.abs();
                    check(drift <= 1e-6, || format!("{tag:?} from {p:?}: drift {drift:e} at {q:?}"))?;
                    worst = worst.max(drift);
                    samples += 1;
                }
            }
            n += 1;
        }
    }
    Ok(format!("60 trajectories, {samples} samples, worst drift {worst:.1e}"))
}

fn c10_flat_point() -> Outcome {
    let (l, k) = (42f64.sqrt() / 9.0, -1.0 / 6.0);
    let t0 = (21f64.sqrt() - 3.0) / s2();
    let (f, df, ddf) = slice(l, k, t0);
    // the metric −f''/(4f) + 3f'²/(16f²) has numerator 3f'² − 4 f f''
    let numerator = 3.0 * df * df - 4.0 * f * ddf;
    check(numerator.abs() <= 1e-10, || format!("oracle numerator {numerator:e}"))?;
    let roots = slice_analysis::metric_numerator_poly(l, k).real_root_values();
    let t = roots.iter().copied().min_by(|a, b| (a - t0).abs().total_cmp(&(b - t0).abs())).ok_or("no root")?;
    check((t - t0).abs() <= 1e-10, || format!("root {t}, expected {t0}"))?;
    let ft = slice_analysis::slice_poly(l, k).f.eval(t);
    check((ft - (6.0 * 21f64.sqrt() - 27.0)).abs() <= 1e-10, || format!("f(t0) = {ft}"))?;
    check(!slice_analysis::is_closed(l, k).map_err(|e| e.to_string())?, || "reported closed".into())?;
    Ok(format!("t0 = {t:.12}, f(t0) = {ft:.12}, not closed"))
}

fn parameter_samples() -> Vec<(ClassTag, Option<f64>)> {
    use ClassTag::*;
    vec![
        (Closed_A, None),
        (Closed_B, None),
        (Closed_C, None),
        (Closed_D, Some(-0.7)),
        (Closed_D, Some(0.0)),
        (Closed_D, Some(1.0 / 16.0)),
        (Incomplete_A, Some(0.26)),
        (Incomplete_A, Some(0.5)),
        (Incomplete_A, Some(2.0)),
        (Incomplete_B, Some(-0.3)),
        (Incomplete_B, Some(0.1)),
        (Incomplete_B, Some(0.9)),
        (Incomplete_C, None),
        (Incomplete_D, None),
    ]
}

fn c11_automorphisms() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (tag, p) in parameter_samples() {
        let g = classification::automorphisms(tag, p).map_err(|e| format!("{tag}: {e}"))?;
        let rep = tag.representative(p).map_err(|e| e.to_string())?;
        let h = QuarticForm::standard(rep.l, rep.k);
        let mut maps = g.discrete_generators.clone();
        if let Some(fam) = &g.continuous_generator {
            maps.extend([0.3, 0.7, 1.0].map(|t| fam.at(t)));
        }
        check(!maps.is_empty(), || format!("{tag}: no generators"))?;
        for m in maps {
            let coeff = h.pullback(&m).max_abs_diff(&h);
            let pointwise = invariance_defect(&h, &m);
            check(coeff <= 1e-12 && pointwise <= 1e-12, || format!("{tag} {p:?}: {m:?} moves h by {coeff:e} / {pointwise:e}"))?;
            worst = worst.max(coeff).max(pointwise);
            count += 1;
        }
    }
    Ok(format!("{count} generators, worst residual {worst:.1e}"))
}

fn c12_components() -> Outcome {
    use ClassTag::*;
    for (tag, p) in parameter_samples() {
        let rep = tag.representative(p).map_err(|e| e.to_string())?;
        let expected = match tag {
            Closed_B => 2,
            Closed_D if rep.k <= 0.0 => 2,
            _ => 4,
        };
        let n = slice_analysis::count_components(&QuarticForm::standard(rep.l, rep.k));
        check(n == expected, || format!("{tag} {p:?}: {n} components, expected {expected}"))?;
    }
    Ok("14 samples match 4/2/4/{4,2}/4/4/4/4".into())
}

fn c13_singular() -> Outcome {
    use ClassTag::*;
    for (tag, p) in parameter_samples() {
        let rep = tag.representative(p).map_err(|e| e.to_string())?;
        let expected = matches!(tag, Closed_A | Closed_B | Closed_C | Incomplete_D);
        let got = slice_analysis::is_singular_at_infinity(rep.l, rep.k);
        check(got == expected, || format!("{tag} {p:?}: {got}"))?;
        let report = classification::classify(&QuarticForm::standard(rep.l, rep.k), None);
        check(report.singular_at_infinity == expected, || format!("{tag} {p:?}: report says {}", report.singular_at_infinity))?;
    }
    Ok("true exactly for Closed_A, Closed_B, Closed_C, Incomplete_D".into())
}

fn c14_limits() -> Outcome {
    use ClassTag::*;
    let table: [(ClassTag, Vec<ClassTag>); 8] = [
        (Closed_A, vec![Closed_A, Closed_A]),
        (Closed_B, vec![Closed_B, Closed_B]),
        (Closed_C, vec![Closed_A, Closed_B]),
        (Closed_D, vec![Closed_B, Closed_B]),
        (Incomplete_A, vec![]),
        (Incomplete_B, vec![Closed_B]),
        (Incomplete_C, vec![Closed_B]),
        (Incomplete_D, vec![Closed_A]),
    ];
    for (tag, want) in &table {
        let mut got: Vec<ClassTag> = classification::limit_geometries(*tag, None).into_iter().filter_map(|r| r.result).collect();
        got.sort_by_key(|t| t.name());
        check(&got == want, || format!("{tag}: {got:?}"))?;
    }
    let fixed = |t: ClassTag| match t {
        Closed_A => (0.0, 0.25),
        _ => (l_b(), -1.0 / 12.0),
    };
    let mut worst = 0.0f64;
    let samples = [(l_c(), 0.0), (0.0, -0.6), (0.0, -0.05), (0.0, 0.0), (0.0, 0.15)];
    for (l, k) in samples {
        let tag = classification::classify(&QuarticForm::standard(l, k), None).class_tag;
        check(matches!(tag, Closed_C | Closed_D), || format!("({l}, {k}) is {tag}"))?;
        let sf = StandardForm::from_lk(l, k);
        let mut seen = Vec::new();
        for dir in [Direction::TowardDomLo, Direction::TowardDomHi] {
            let r = classification::verify_limit(&sf, dir).map_err(|e| e.to_string())?;
            let t = r.result.ok_or_else(|| format!("({l}, {k}) {dir:?}: no limit"))?;
            let q = r.numeric_limit.ok_or("missing numeric limit")?;
            let (fl, fk) = fixed(t);
            let d = (q.l.abs() - fl).hypot(q.k - fk);
            check(d <= 1e-5, || format!("({l}, {k}) {dir:?}: {q:?} is {d:e} from {t}"))?;
            worst = worst.max(d);
            seen.push(t);
        }
        seen.sort_by_key(|t| t.name());
        let row = &table.iter().find(|(t, _)| *t == tag).unwrap().1;
        check(&seen == row, || format!("({l}, {k}): limits {seen:?}"))?;
    }
    Ok(format!("table matches, {} sampled limits within {worst:.1e}", samples.len() * 2))
}

fn c15_reduction() -> Outcome {
    let k_w = -25.0 / 72.0;
    let start = classification::reduce_factor_form(k_w).map_err(|e| e.to_string())?;
    check(start.c.abs() <= 1e-8, || format!("c(-25/72) = {}", start.c))?;
    let mut worst = start.residual;
    let mut last_c = start.c;
    for i in 1..=20 {
        let k = k_w + (big_u() - k_w) * i as f64 / 21.0;
        let r = classification::reduce_factor_form(k).map_err(|e| e.to_string())?;
        check(r.c < last_c && r.c > -2.0, || format!("c({k}) = {} after {last_c}", r.c))?;
        check((k_of_z(r.z) - k).abs() <= 1e-10, || format!("K(z) = {} at K = {k}", k_of_z(r.z)))?;
        // the matrix really carries h_{1,K} to xy(x² + c xy + y²)
        let target = QuarticForm::new(0.0, 1.0, r.c, 1.0, 0.0);
        let moved = QuarticForm::standard(1.0, k).pullback(&r.matrix).max_abs_diff(&target);
        check(moved <= 1e-8, || format!("pullback residual {moved:e} at K = {k}"))?;
        worst = worst.max(r.residual).max(moved);
        last_c = r.c;
    }
    check(worst <= 1e-8, || format!("residual {worst:e}"))?;
    let limit = classification::extrapolate_c_at_u().map_err(|e| e.to_string())?;
    check((limit + 2.0).abs() <= 1e-4, || format!("c -> {limit}"))?;
    let kz = k_of_z(z_max());
    check((kz - k_w).abs() <= 1e-12, || format!("K(z_max) = {kz}"))?;
    check((quartic_moduli::constants::z_max() - z_max()).abs() <= 1e-15, || "z_max constant".into())?;
    Ok(format!("c(-25/72) = {:.1e}, c(U) ~ {limit:.8}, residual {worst:.1e}", start.c))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 15] = [
        ("fixed points", c01_fixed_points),
        ("boundary constants", c02_boundary_constants),
        ("constant U", c03_constant_u),
        ("domains", c04_domains),
        ("classification grid", c05_grid),
        ("GL(2) invariance", c06_gl2),
        ("velocity identity", c07_velocity),
        ("tangency", c08_tangency),
        ("first integral", c09_first_integral),
        ("flat point", c10_flat_point),
        ("automorphisms", c11_automorphisms),
        ("component counts", c12_components),
        ("singular at infinity", c13_singular),
        ("limit geometries", c14_limits),
        ("reduction endpoints", c15_reduction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {:<22} {tag}  {detail}", i + 1, name);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
