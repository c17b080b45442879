//! Canonical classes of hyperbolic quartics, their automorphism groups and limit
//! geometries, equivalence testing and the factor-form reduction of the `L = 1` family.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::constants::{self, l_b, l_c, K_A, K_B, K_W1};
use crate::error::{Error, Result};
use crate::moduli_plane::{self, Canonical, ModuliPoint, Region, RegionTag, EPS_REGION};
use crate::poly::{newton, Poly};
use crate::quartic_form::{LinearMap2, Point2, QuarticForm};
use crate::slice_analysis::{self, BoundaryKind};
use crate::standard_form::{self, lk_about, StandardForm};

/// Generators must reproduce the form to this relative accuracy.
pub const GENERATOR_TOL: f64 = 1e-12;

/// Parameters of the same family closer than this are treated as equal.
pub const PARAMETER_TOL: f64 = 1e-6;

/// Largest coefficient mismatch accepted for the factor-form reduction.
pub const REDUCTION_TOL: f64 = 1e-8;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    Closed_A,
    Closed_B,
    Closed_C,
    Closed_D,
    Incomplete_A,
    Incomplete_B,
    Incomplete_C,
    Incomplete_D,
    NonHyperbolic,
}

impl ClassTag {
    pub const ALL: [ClassTag; 8] = [
        ClassTag::Closed_A,
        ClassTag::Closed_B,
        ClassTag::Closed_C,
        ClassTag::Closed_D,
        ClassTag::Incomplete_A,
        ClassTag::Incomplete_B,
        ClassTag::Incomplete_C,
        ClassTag::Incomplete_D,
    ];

    pub fn is_closed(self) -> bool {
        matches!(self, ClassTag::Closed_A | ClassTag::Closed_B | ClassTag::Closed_C | ClassTag::Closed_D)
    }

    pub fn is_homogeneous(self) -> bool {
        matches!(self, ClassTag::Closed_A | ClassTag::Closed_B)
    }

    /// The one-parameter families `Closed_D(K)`, `Incomplete_A(K)` and `Incomplete_B(K)`.
    pub fn is_parametric(self) -> bool {
        matches!(self, ClassTag::Closed_D | ClassTag::Incomplete_A | ClassTag::Incomplete_B)
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::Closed_A => "Closed_A",
            ClassTag::Closed_B => "Closed_B",
            ClassTag::Closed_C => "Closed_C",
            ClassTag::Closed_D => "Closed_D",
            ClassTag::Incomplete_A => "Incomplete_A",
            ClassTag::Incomplete_B => "Incomplete_B",
            ClassTag::Incomplete_C => "Incomplete_C",
            ClassTag::Incomplete_D => "Incomplete_D",
            ClassTag::NonHyperbolic => "NonHyperbolic",
        }
    }

    /// Checks that `parameter` is admissible for this class.
    pub fn check_parameter(self, parameter: Option<f64>) -> Result<()> {
        let bad = |what: &'static str, value: f64| Err(Error::DomainError { what, value });
        match (self, parameter) {
            (ClassTag::Closed_D, Some(k)) if !(k < K_A) => bad("Closed_D needs K < 1/4", k),
            (ClassTag::Incomplete_A, Some(k)) if !(k > K_A) => bad("Incomplete_A needs K > 1/4", k),
            (ClassTag::Incomplete_B, Some(k)) if !(k > K_W1 && k < constants::constant_u()) => {
                bad("Incomplete_B needs K in (-25/72, U)", k)
            }
            (t, None) if t.is_parametric() => {
                Err(Error::Precondition(format!("{} needs a parameter", t.name())))
            }
            (ClassTag::NonHyperbolic, _) => Err(Error::Precondition("no class for a non-hyperbolic form".into())),
            _ => Ok(()),
        }
    }

    /// The point of the generating set labelling the class.
    pub fn representative(self, parameter: Option<f64>) -> Result<ModuliPoint> {
        self.check_parameter(parameter)?;
        let k = parameter.unwrap_or(f64::NAN);
        Ok(match self {
            ClassTag::Closed_A => ModuliPoint::new(0.0, K_A),
            ClassTag::Closed_B => ModuliPoint::new(l_b(), K_B),
            ClassTag::Closed_C => ModuliPoint::new(l_c(), 0.0),
            ClassTag::Closed_D | ClassTag::Incomplete_A => ModuliPoint::new(0.0, k),
            ClassTag::Incomplete_B => ModuliPoint::new(1.0, k),
            ClassTag::Incomplete_C => ModuliPoint::new(1.0, K_W1),
            ClassTag::Incomplete_D => ModuliPoint::new(1.0, constants::constant_u()),
            ClassTag::NonHyperbolic => unreachable!(),
        })
    }
}

impl std::fmt::Display for ClassTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Class of the curves through a point with the given region tag.
pub fn tag_for_region(tag: RegionTag) -> ClassTag {
    use RegionTag::*;
    match tag {
        FixedPoint_A => ClassTag::Closed_A,
        FixedPoint_B => ClassTag::Closed_B,
        UGraph_Lower => ClassTag::Closed_C,
        ClosedInterior_Upper | ClosedInterior_Lower | ClosedAxis => ClassTag::Closed_D,
        Incomplete_AboveBell => ClassTag::Incomplete_A,
        Incomplete_WExterior | Incomplete_Wedge | MGraph => ClassTag::Incomplete_B,
        WGraph => ClassTag::Incomplete_C,
        UGraph_Upper => ClassTag::Incomplete_D,
        NoHyperbolicStructure => ClassTag::NonHyperbolic,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    BoundaryProximity,
    NumericalFailure,
    BoundaryAmbiguous,
    HintRejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

/// A one-parameter subgroup `t ↦ exp(t X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousFamily {
    pub infinitesimal: LinearMap2,
}

impl ContinuousFamily {
    pub fn at(&self, t: f64) -> LinearMap2 {
        let x = self.infinitesimal;
        let m = (Matrix2::new(x.a11, x.a12, x.a21, x.a22) * t).exp();
        LinearMap2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismGroup {
    pub descriptor: String,
    pub continuous_generator: Option<ContinuousFamily>,
    pub discrete_generators: Vec<LinearMap2>,
    /// Largest relative coefficient mismatch of `g*h` against `h` over all generators
    /// (and the continuous family at the sample times).
    pub residual: f64,
}

/// Sample times at which a continuous family is checked.
pub const FAMILY_SAMPLES: [f64; 3] = [0.3, 0.7, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    TowardDomHi,
    TowardDomLo,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::TowardDomHi => 1.0,
            Direction::TowardDomLo => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitGeometryResult {
    pub direction: Direction,
    /// `Closed_A`, `Closed_B`, or absent when no limit geometry exists.
    pub result: Option<ClassTag>,
    pub numeric_limit: Option<ModuliPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionData {
    pub z: f64,
    #[serde(rename = "K_of_z")]
    pub k_of_z: f64,
    pub c: f64,
    pub z_min: f64,
    pub z_max: f64,
    /// `M` with `M*h_{1,K} = xy(x² + c xy + y²)`.
    pub matrix: LinearMap2,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub class_tag: ClassTag,
    pub parameter: Option<f64>,
    pub closed: bool,
    pub homogeneous: bool,
    pub singular_at_infinity: bool,
    pub components: usize,
    pub automorphism: Option<AutomorphismGroup>,
    pub limit_geometries: Vec<LimitGeometryResult>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ClassificationReport {
    pub fn near_boundary(&self) -> bool {
        self.diagnostics.iter().any(|d| d.kind == DiagnosticKind::BoundaryProximity)
    }

    pub fn numerical_failure(&self) -> bool {
        self.diagnostics.iter().any(|d| d.kind == DiagnosticKind::NumericalFailure)
    }
}

/// Everything computed on the way to a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub report: ClassificationReport,
    pub standard_form: Option<StandardForm>,
    pub region: Option<Region>,
    pub canonical: Option<Canonical>,
}

/// A hyperbolic point of `h` away from the ends of its arc, where standardizing is
/// ill-conditioned: `(1, 0)` if it lies in the middle half of an arc, else the midpoint
/// of the widest arc. Points of a strongly squashed form can fail the strict test even
/// inside an arc, so other points spread over the arcs, widest first, are tried after those.
pub fn find_hyperbolic_point(h: &QuarticForm) -> Option<Point2> {
    let mut arcs = slice_analysis::hyperbolic_arcs(h);
    let tau = 2.0 * std::f64::consts::PI;
    let usable = |p: Point2| h.eval(p) > 0.0 && h.is_hyperbolic_point(p);
    let e1 = Point2::new(1.0, 0.0);
    let e1_central = arcs.iter().any(|&(a, b)| {
        let quarter = 0.25 * (b - a);
        [0.0, tau].iter().any(|&t| t > a + quarter && t < b - quarter)
    });
    if e1_central && usable(e1) {
        return Some(e1);
    }
    arcs.sort_by(|x, y| (y.1 - y.0).total_cmp(&(x.1 - x.0)));
    [4usize, 3, 5, 2, 6, 1, 7]
        .iter()
        .flat_map(|&j| arcs.iter().map(move |&(a, b)| a + (b - a) * j as f64 / 8.0))
        .map(Point2::from_angle)
        .find(|&p| usable(p))
}

/// Orbit curves can pass close to a boundary graph or a fixed point without lying on it, so a
/// base point that reads as near a boundary is compared with others spread over the arcs. The
/// tolerance describes the resolution at the first base point, and is widened at each other
/// one by how much worse its rounding is. A fixed point is kept only if no base point leaves
/// it by ten times its own tolerance, since a homogeneous form reads the same from everywhere. Otherwise the base point
/// farthest from every boundary wins, provided it clears the tolerance band.
fn clearer_base_point(h: &QuarticForm, eps: f64, rounding: f64, first: &Region) -> Option<(StandardForm, Region)> {
    use RegionTag::{FixedPoint_A, FixedPoint_B};
    let at_fixed = |r: &Region| matches!(r.tag, FixedPoint_A | FixedPoint_B);
    let mut candidates = Vec::new();
    for (a, b) in slice_analysis::hyperbolic_arcs(h) {
        for i in 1..8 {
            let p = Point2::from_angle(a + (b - a) * i as f64 / 8.0);
            let Ok((sf, err)) = standard_form::standardize_with_error(h, p) else {
                continue;
            };
            if !(sf.l.is_finite() && sf.k.is_finite() && err.is_finite()) {
                continue;
            }
            let sf = standard_form::canonicalize_sign(&sf);
            let widened = eps * (err / rounding.max(f64::MIN_POSITIVE)).max(1.0);
            let lk = ModuliPoint::new(sf.l, sf.k);
            let region = moduli_plane::region_with_tol(lk, widened);
            let leaves = !at_fixed(&moduli_plane::region_with_tol(lk, 10.0 * widened));
            candidates.push((sf, region, leaves));
        }
    }
    let rank = |r: &Region| (!r.near_boundary, r.signed_distance.abs());
    let pool = candidates.into_iter().filter(|(_, r, leaves)| if at_fixed(first) { *leaves } else { !r.near_boundary });
    pool.map(|(sf, r, _)| (sf, r))
        .max_by(|x, y| rank(&x.1).partial_cmp(&rank(&y.1)).unwrap_or(std::cmp::Ordering::Equal))
}

pub fn classify(h: &QuarticForm, hint: Option<Point2>) -> ClassificationReport {
    classify_with_tol(h, hint, EPS_REGION).report
}

/// The full pipeline with an explicit region tolerance.
pub fn classify_with_tol(h: &QuarticForm, hint: Option<Point2>, eps: f64) -> Classification {
    let mut diagnostics = Vec::new();
    let mut components = if h.is_finite() { slice_analysis::count_components(h) } else { 0 };

    let point = match hint {
        Some(p) if h.eval(p) > 0.0 && h.is_hyperbolic_point(p) => Some(p),
        Some(p) => {
            diagnostics.push(Diagnostic {
                kind: DiagnosticKind::HintRejected,
                message: format!("hint ({}, {}) is not a hyperbolic point with h > 0", p.x, p.y),
            });
            find_hyperbolic_point(h)
        }
        None if h.is_finite() => find_hyperbolic_point(h),
        None => None,
    };
    let non_hyperbolic = |diagnostics| Classification {
        report: ClassificationReport {
            class_tag: ClassTag::NonHyperbolic,
            parameter: None,
            closed: false,
            homogeneous: false,
            singular_at_infinity: false,
            components,
            automorphism: None,
            limit_geometries: Vec::new(),
            diagnostics,
        },
        standard_form: None,
        region: None,
        canonical: None,
    };
    let Some(point) = point else {
        return non_hyperbolic(diagnostics);
    };
    let (sf, rounding) = match standard_form::standardize_with_error(h, point) {
        Ok((sf, err)) => (standard_form::canonicalize_sign(&sf), err),
        Err(e) => {
            diagnostics.push(Diagnostic { kind: DiagnosticKind::NumericalFailure, message: e.to_string() });
            return non_hyperbolic(diagnostics);
        }
    };
    // an ill-conditioned input cannot resolve (L, K) more finely than its own rounding
    let eps = eps.max(rounding);
    let mut sf = sf;
    let mut region = moduli_plane::region_with_tol(ModuliPoint::new(sf.l, sf.k), eps);
    let at_fixed = matches!(region.tag, RegionTag::FixedPoint_A | RegionTag::FixedPoint_B);
    if (region.near_boundary || at_fixed) && hint.is_none() {
        if let Some((alt_sf, alt_region)) = clearer_base_point(h, eps, rounding, &region) {
            (sf, region) = (alt_sf, alt_region);
        }
    }
    let lk = ModuliPoint::new(sf.l, sf.k);
    if region.near_boundary {
        diagnostics.push(Diagnostic {
            kind: DiagnosticKind::BoundaryProximity,
            message: format!(
                "(L, K) = ({}, {}) lies {:.3e} from a boundary graph; tagged {:?}",
                sf.l, sf.k, region.signed_distance, region.tag
            ),
        });
    }
    let class_tag = tag_for_region(region.tag);

    let canonical = match moduli_plane::canonical_representative_with_tol(lk, eps) {
        Ok(c) => Some(c),
        Err(e) => {
            diagnostics.push(Diagnostic { kind: DiagnosticKind::NumericalFailure, message: e.to_string() });
            None
        }
    };
    // the count is a class invariant, and the class point is free of the input's rounding
    if let Some(c) = &canonical {
        components = slice_analysis::count_components(&QuarticForm::standard(c.class_point.l, c.class_point.k));
    }
    let parameter = match (class_tag.is_parametric(), &canonical) {
        (true, Some(c)) => Some(c.class_point.k),
        _ => None,
    };
    if let Err(e) = slice_analysis::is_closed(sf.l, sf.k) {
        let kind = match e {
            Error::BoundaryAmbiguous { .. } => DiagnosticKind::BoundaryAmbiguous,
            _ => DiagnosticKind::NumericalFailure,
        };
        diagnostics.push(Diagnostic { kind, message: e.to_string() });
    }

    let class_point = canonical.as_ref().map(|c| c.class_point);
    let singular_at_infinity = class_point
        .map(|q| slice_analysis::is_singular_at_infinity(q.l, q.k))
        .unwrap_or(false);
    let automorphism = if class_tag.is_parametric() && parameter.is_none() {
        None
    } else {
        match automorphisms(class_tag, parameter) {
            Ok(g) => Some(g),
            Err(e) => {
                diagnostics.push(Diagnostic { kind: DiagnosticKind::NumericalFailure, message: e.to_string() });
                None
            }
        }
    };
    let limit_geometries = if class_tag.is_parametric() && parameter.is_none() {
        limit_table(class_tag)
    } else {
        limit_geometries_verified(class_tag, parameter).unwrap_or_else(|_| limit_table(class_tag))
    };

    Classification {
        report: ClassificationReport {
            class_tag,
            parameter,
            closed: class_tag.is_closed(),
            homogeneous: class_tag.is_homogeneous(),
            singular_at_infinity,
            components,
            automorphism,
            limit_geometries,
            diagnostics,
        },
        standard_form: Some(sf),
        region: Some(region),
        canonical,
    }
}

/// Whether the curve with standard form `(L, K)` is a homogeneous space, i.e. `𝒱` vanishes there.
pub fn is_homogeneous(l: f64, k: f64) -> bool {
    let (a, b) = moduli_plane::field(ModuliPoint::new(l, k));
    a.hypot(b) <= EPS_REGION
}

/// For a homogeneous `(L, K)`, whether `(|L|, K)` is one of the two critical-value pairs.
pub fn critical_value_check(l: f64, k: f64) -> Result<bool> {
    if !is_homogeneous(l, k) {
        return Err(Error::Precondition(format!("({l}, {k}) is not a homogeneous standard form")));
    }
    let q = ModuliPoint::new(l.abs(), k);
    Ok(q.dist(ModuliPoint::new(0.0, K_A)) <= EPS_REGION || q.dist(ModuliPoint::new(l_b(), K_B)) <= EPS_REGION)
}

fn generator_residual(h: &QuarticForm, g: &LinearMap2) -> f64 {
    h.pullback(g).max_abs_diff(h) / h.norm()
}

const SWAP: LinearMap2 = LinearMap2::new(0.0, 1.0, 1.0, 0.0);
const MINUS_ONE: LinearMap2 = LinearMap2::diag(-1.0, -1.0);

/// `P S P⁻¹`: the symmetry `S` of `P*h` transported back to `h`.
fn conjugate(p: &LinearMap2, s: &LinearMap2) -> Result<LinearMap2> {
    let inv = p.inverse().ok_or_else(|| Error::Precondition("singular normalising map".into()))?;
    Ok(p.compose(s).compose(&inv))
}

fn quarter_turn(k: f64) -> LinearMap2 {
    let r = k.powf(0.25);
    LinearMap2::new(0.0, -r, 1.0 / r, 0.0)
}

/// Gauss–Newton on the five equations `g*h = h` in the four entries of `g`.
fn polish_generator(h: &QuarticForm, mut g: LinearMap2) -> LinearMap2 {
    let target = nalgebra::Vector5::from(h.coefficients());
    let coeffs = |g: &LinearMap2| nalgebra::Vector5::from(h.pullback(g).coefficients());
    let entries = |g: &LinearMap2| nalgebra::Vector4::new(g.a11, g.a12, g.a21, g.a22);
    let from = |v: nalgebra::Vector4<f64>| LinearMap2::new(v[0], v[1], v[2], v[3]);
    for _ in 0..3 {
        let r = coeffs(&g) - target;
        if r.amax() <= f64::EPSILON {
            break;
        }
        let x = entries(&g);
        let step = 1e-6;
        let mut jac = nalgebra::Matrix5x4::zeros();
        for j in 0..4 {
            let mut e = nalgebra::Vector4::zeros();
            e[j] = step;
            let col = (coeffs(&from(x + e)) - coeffs(&from(x - e))) / (2.0 * step);
            jac.set_column(j, &col);
        }
        let Ok(dx) = jac.svd(true, true).solve(&r, 1e-12) else {
            break;
        };
        let next = from(x - dx);
        if generator_residual(h, &next) >= generator_residual(h, &g) {
            break;
        }
        g = next;
    }
    g
}

/// Automorphism group of the class representative, with verified generators.
pub fn automorphisms(tag: ClassTag, parameter: Option<f64>) -> Result<AutomorphismGroup> {
    let rep = tag.representative(parameter)?;
    let h = QuarticForm::standard(rep.l, rep.k);
    let flip = LinearMap2::diag(1.0, -1.0);
    let (descriptor, continuous, discrete): (&str, Option<LinearMap2>, Vec<LinearMap2>) = match tag {
        ClassTag::Closed_A => {
            let r2 = std::f64::consts::SQRT_2;
            ("ℝ⋉(ℤ₂⋉ℤ₂)", Some(LinearMap2::new(0.0, 1.0 / r2, r2, 0.0)), vec![flip, quarter_turn(K_A)])
        }
        ClassTag::Closed_B => {
            let r2 = std::f64::consts::SQRT_2;
            let a = LinearMap2::new(0.0, r2 / 2.0, r2, 2.0 / 3f64.sqrt());
            ("ℝ×ℤ₂", Some(a), vec![MINUS_ONE])
        }
        ClassTag::Closed_C => {
            let a = constants::class_c_factor_map();
            ("ℤ₂×ℤ₂", None, vec![MINUS_ONE, conjugate(&a, &SWAP)?])
        }
        ClassTag::Closed_D | ClassTag::Incomplete_A => {
            let k = rep.k;
            if k > 0.0 {
                ("ℤ₂⋉ℤ₂", None, vec![flip, quarter_turn(k)])
            } else {
                ("ℤ₂×ℤ₂", None, vec![flip, LinearMap2::diag(-1.0, 1.0)])
            }
        }
        ClassTag::Incomplete_B | ClassTag::Incomplete_C => {
            // the reduction matrix degenerates as K → U, so the conjugate is polished on h itself
            let red = reduce_factor_form(rep.k)?;
            ("ℤ₂×ℤ₂", None, vec![MINUS_ONE, polish_generator(&h, conjugate(&red.matrix, &SWAP)?)])
        }
        ClassTag::Incomplete_D => {
            // after the shear the form is y²(a x² + d y²), symmetric under x ↦ −x
            let z = constants::z_min();
            let m = LinearMap2::new(1.0, 0.0, z, 1.0).compose(&LinearMap2::new(1.0, constants::shear_c_at_u(), 0.0, 1.0));
            ("ℤ₂×ℤ₂", None, vec![MINUS_ONE, conjugate(&m, &LinearMap2::diag(-1.0, 1.0))?])
        }
        ClassTag::NonHyperbolic => unreachable!("rejected by check_parameter"),
    };
    let continuous_generator = continuous.map(|infinitesimal| ContinuousFamily { infinitesimal });
    let mut residual = discrete.iter().map(|g| generator_residual(&h, g)).fold(0.0, f64::max);
    if let Some(fam) = &continuous_generator {
        for t in FAMILY_SAMPLES {
            residual = residual.max(generator_residual(&h, &fam.at(t))).max(generator_residual(&h, &fam.at(-t)));
        }
    }
    if !(residual <= GENERATOR_TOL) {
        return Err(Error::VerificationFailure { residual });
    }
    Ok(AutomorphismGroup {
        descriptor: descriptor.to_string(),
        continuous_generator,
        discrete_generators: discrete,
        residual,
    })
}

/// The limit-geometry row of a class, without numerical verification.
pub fn limit_table(tag: ClassTag) -> Vec<LimitGeometryResult> {
    use ClassTag::*;
    use Direction::*;
    let entry = |direction, result| LimitGeometryResult { direction, result: Some(result), numeric_limit: None };
    match tag {
        Closed_A => vec![entry(TowardDomLo, Closed_A), entry(TowardDomHi, Closed_A)],
        Closed_B => vec![entry(TowardDomLo, Closed_B), entry(TowardDomHi, Closed_B)],
        Closed_C => vec![entry(TowardDomLo, Closed_B), entry(TowardDomHi, Closed_A)],
        Closed_D => vec![entry(TowardDomLo, Closed_B), entry(TowardDomHi, Closed_B)],
        Incomplete_A | NonHyperbolic => Vec::new(),
        Incomplete_B => vec![entry(TowardDomLo, Closed_B)],
        Incomplete_C => vec![entry(TowardDomLo, Closed_B)],
        Incomplete_D => vec![entry(TowardDomLo, Closed_A)],
    }
}

pub fn limit_geometries(tag: ClassTag, _parameter: Option<f64>) -> Vec<LimitGeometryResult> {
    limit_table(tag)
}

/// The table row with each entry checked by [`verify_limit`] on the class representative.
pub fn limit_geometries_verified(tag: ClassTag, parameter: Option<f64>) -> Result<Vec<LimitGeometryResult>> {
    let rep = tag.representative(parameter)?;
    let sf = StandardForm::from_lk(rep.l, rep.k);
    Ok(limit_table(tag)
        .into_iter()
        .map(|mut entry| {
            if let Ok(found) = verify_limit(&sf, entry.direction) {
                if found.result == entry.result {
                    entry.numeric_limit = found.numeric_limit;
                }
            }
            entry
        })
        .collect())
}

/// Refinement levels `k` of `T_k = end·(1 − 2^{−k})`.
pub const LIMIT_LEVELS: std::ops::RangeInclusive<i32> = 4..=24;

/// Agreement of consecutive samples and distance to a fixed point for a converged limit.
pub const LIMIT_TOL: f64 = 1e-5;

/// Pushes the base point toward one end of `dom` and reports the limiting `(|L|, K)`.
pub fn verify_limit(sf: &StandardForm, direction: Direction) -> Result<LimitGeometryResult> {
    let prof = slice_analysis::domain(sf.l, sf.k)?;
    let (end, kind) = match direction {
        Direction::TowardDomHi => (prof.dom_hi, prof.boundary[1]),
        Direction::TowardDomLo => (prof.dom_lo, prof.boundary[0]),
    };
    let slice = slice_analysis::slice_poly(sf.l, sf.k);
    let (center, vanishing) = match kind {
        BoundaryKind::MetricDegenerate => (end, 0),
        BoundaryKind::Both if prof.ambiguity.is_none() => (newton(&slice.df, end), 2),
        _ => (newton(&slice.f, end), 1),
    };
    let none = LimitGeometryResult { direction, result: None, numeric_limit: None };
    let mut history: Vec<ModuliPoint> = Vec::new();
    let mut settled = None;
    for k in LIMIT_LEVELS {
        let (l, kk) = lk_about(sf.l, sf.k, center, -end * 2f64.powi(-k), vanishing);
        if !(l.is_finite() && kk.is_finite()) {
            return Ok(none);
        }
        history.push(ModuliPoint::new(l.abs(), kk));
        if let [.., a, b, c] = history[..] {
            if a.dist(b) <= LIMIT_TOL && b.dist(c) <= LIMIT_TOL && a.dist(c) <= LIMIT_TOL {
                settled = Some(c);
                break;
            }
        }
    }
    let Some(last) = settled else {
        return Ok(none);
    };
    let result = if last.dist(ModuliPoint::new(0.0, K_A)) <= LIMIT_TOL {
        Some(ClassTag::Closed_A)
    } else if last.dist(ModuliPoint::new(l_b(), K_B)) <= LIMIT_TOL {
        Some(ClassTag::Closed_B)
    } else {
        None
    };
    Ok(LimitGeometryResult { direction, result, numeric_limit: result.map(|_| last) })
}

/// Whether two forms are linearly equivalent, by comparing their classifications.
pub fn equivalent(h1: &QuarticForm, h2: &QuarticForm) -> Result<bool> {
    let (a, b) = (classify(h1, None), classify(h2, None));
    for r in [&a, &b] {
        if r.near_boundary() {
            return Err(Error::Inconclusive("a form lies within the boundary-proximity band".into()));
        }
    }
    if a.class_tag != b.class_tag {
        return Ok(false);
    }
    match (a.parameter, b.parameter) {
        (Some(p), Some(q)) => Ok((p - q).abs() <= PARAMETER_TOL),
        (None, None) => Ok(true),
        _ => Err(Error::Inconclusive("a parametric class is missing its parameter".into())),
    }
}

/// Largest negative root of `f_{1,K}(t) = 1 − t² + t³ + K t⁴`.
fn largest_negative_root(k: f64) -> Option<f64> {
    let f = slice_analysis::slice_poly(1.0, k).f;
    f.real_root_values().into_iter().filter(|&t| t < 0.0).reduce(f64::max).map(|t| newton(&f, t))
}

/// Brings `h_{1,K}` to the factor form `xy(x² + c xy + y²)`.
pub fn reduce_factor_form(k: f64) -> Result<ReductionData> {
    let u = constants::constant_u();
    if !(k >= K_W1 && k < u) {
        return Err(Error::DomainError { what: "factor-form reduction needs K in [-25/72, U)", value: k });
    }
    let h = QuarticForm::standard(1.0, k);
    let z = largest_negative_root(k)
        .ok_or_else(|| Error::ReductionFailure(format!("f_(1,{k}) has no negative root")))?;
    let s1 = LinearMap2::new(1.0, 0.0, z, 1.0);
    let ht = h.pullback(&s1);

    // the shear x ↦ x + F y kills the y⁴ term; among the real roots F of the
    // remaining cubic take the one leaving the most definite quadratic factor
    let cubic = Poly::new(vec![ht.c04, ht.c13, ht.c22, ht.c31]);
    let mut best: Option<(f64, LinearMap2, QuarticForm)> = None;
    for f in cubic.real_root_values() {
        let f = newton(&cubic, f);
        let s2 = LinearMap2::new(1.0, f, 0.0, 1.0);
        let m = s1.compose(&s2);
        let hb = h.pullback(&m);
        let (a, b, d) = (hb.c31, hb.c22, hb.c13);
        if a * d <= 0.0 {
            continue;
        }
        let score = 1.0 - b * b / (4.0 * a * d);
        if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
            best = Some((score, m, hb));
        }
    }
    let (_, mut m, mut hb) =
        best.ok_or_else(|| Error::ReductionFailure("no shear leaves a definite quadratic factor".into()))?;
    if hb.c31 < 0.0 {
        m = m.compose(&LinearMap2::diag(-1.0, 1.0));
        hb = h.pullback(&m);
    }
    let (a, b, d) = (hb.c31, hb.c22, hb.c13);
    let alpha = a.powf(-0.375) * d.powf(0.125);
    let beta = d.powf(-0.375) * a.powf(0.125);
    m = m.compose(&LinearMap2::diag(alpha, beta));
    let c = b / (a * d).sqrt();
    let target = QuarticForm::new(0.0, 1.0, c, 1.0, 0.0);
    let residual = h.pullback(&m).max_abs_diff(&target);
    if !(residual <= REDUCTION_TOL) {
        return Err(Error::ReductionFailure(format!("pullback misses xy(x² + c xy + y²) by {residual:e}")));
    }
    Ok(ReductionData {
        z,
        k_of_z: constants::k_of_z(z),
        c,
        z_min: constants::z_min(),
        z_max: constants::z_max(),
        matrix: m,
        residual,
    })
}

/// Offsets `U − K` used to extrapolate `c` to `K = U`.
pub const U_OFFSETS: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

/// `lim_{K→U} c(K)` by Neville extrapolation in `U − K` to zero.
pub fn extrapolate_c_at_u() -> Result<f64> {
    let u = constants::constant_u();
    let mut table = Vec::with_capacity(U_OFFSETS.len());
    for d in U_OFFSETS {
        table.push(reduce_factor_form(u - d)?.c);
    }
    Ok(neville(&U_OFFSETS, &table, 0.0))
}

/// Value at `x` of the interpolating polynomial through `(xs[i], ys[i])`.
pub fn neville(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = ((x - xs[i + m]) * p[i] + (xs[i] - x) * p[i + 1]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}
