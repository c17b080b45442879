//! Report documents, CSV tables and the SVG portrait of the moduli plane.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classification::{self, ClassificationReport};
use crate::constants::{l_b, K_A, K_B};
use crate::error::Result;
use crate::moduli_plane::{self, ModuliPoint, Region, EPS_REGION};
use crate::quartic_form::{Point2, QuarticForm};
use crate::slice_analysis::{self, SliceProfile};
use crate::standard_form::StandardForm;

pub const REPORT_VERSION: &str = concat!("quartic-moduli/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub coefficients: QuarticForm,
    pub hint: Option<Point2>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub input: InputEcho,
    pub standard_form: Option<StandardForm>,
    pub region: Option<Region>,
    pub classification: ClassificationReport,
    pub slice_profile: Option<SliceProfile>,
    pub timing: Timing,
}

/// Classifies `h` and collects everything into a report.
pub fn build_report(h: &QuarticForm, hint: Option<Point2>, tolerance: f64) -> ReportDocument {
    let start = Instant::now();
    let full = classification::classify_with_tol(h, hint, tolerance);
    let slice_profile = full.standard_form.and_then(|sf| slice_analysis::domain(sf.l, sf.k).ok());
    ReportDocument {
        version: REPORT_VERSION.to_string(),
        input: InputEcho { coefficients: *h, hint, tolerance },
        standard_form: full.standard_form,
        region: full.region,
        classification: full.report,
        slice_profile,
        timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
    }
}

impl ReportDocument {
    /// Re-runs the classification from the echoed input and compares the outcome.
    pub fn rederive(&self) -> ReportDocument {
        build_report(&self.input.coefficients, self.input.hint, self.input.tolerance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation cannot fail")
    }
}

/// `t,f,g` samples of the slice and of the metric coefficient across `dom`.
pub fn slice_csv(profile: &SliceProfile, samples: usize) -> String {
    let mut out = String::from("t,f,g\n");
    for (t, f, g) in profile.samples(samples) {
        let _ = writeln!(out, "{t},{f},{g}");
    }
    out
}

/// `s,L,K,c` along an integral curve of 𝒱; `c` is the first integral where one is defined.
pub fn trajectory_csv(path: &[(f64, ModuliPoint)]) -> String {
    let mut out = String::from("s,L,K,c\n");
    for (s, p) in path {
        let c = moduli_plane::first_integral(*p).map(|st| st.c.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{s},{},{},{c}", p.l, p.k);
    }
    out
}

/// Samples of the integral curve through `p` in both directions, ordered by arc length.
pub fn integral_curve(p: ModuliPoint, arc: f64, bound: f64) -> Result<Vec<(f64, ModuliPoint)>> {
    let forward = moduli_plane::trajectory(p, arc, bound, 1e-3)?;
    let backward = moduli_plane::trajectory(p, -arc, bound, 1e-3)?;
    let mut path: Vec<_> = backward.into_iter().skip(1).rev().collect();
    path.extend(forward);
    Ok(path)
}

/// Layers of the portrait, drawn in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Regions,
    IntegralCurves,
    Boundaries,
    FixedPoints,
}

impl Layer {
    pub const ALL: [Layer; 4] = [Layer::Regions, Layer::IntegralCurves, Layer::Boundaries, Layer::FixedPoints];

    pub fn parse(s: &str) -> Option<Layer> {
        match s {
            "regions" => Some(Layer::Regions),
            "curves" | "integral_curves" => Some(Layer::IntegralCurves),
            "boundaries" => Some(Layer::Boundaries),
            "fixed_points" | "fixed" => Some(Layer::FixedPoints),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitConfig {
    pub l_range: (f64, f64),
    pub k_range: (f64, f64),
    pub width: u32,
    pub height: u32,
    pub layers: Vec<Layer>,
}

impl Default for PortraitConfig {
    fn default() -> Self {
        Self { l_range: (-1.5, 1.5), k_range: (-0.6, 1.3), width: 720, height: 640, layers: Layer::ALL.to_vec() }
    }
}

/// Nine significant digits, printed in the shortest form that reads back the same.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    format!("{rounded}")
}

struct Canvas<'a> {
    cfg: &'a PortraitConfig,
    out: String,
}

impl Canvas<'_> {
    fn x(&self, l: f64) -> f64 {
        let (a, b) = self.cfg.l_range;
        (l - a) / (b - a) * self.cfg.width as f64
    }

    fn y(&self, k: f64) -> f64 {
        let (a, b) = self.cfg.k_range;
        (b - k) / (b - a) * self.cfg.height as f64
    }

    fn path(&mut self, pts: &[(f64, f64)], style: &str, close: bool) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, &(l, k)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{},{} ", if i == 0 { "M" } else { "L" }, sig9(self.x(l)), sig9(self.y(k)));
        }
        if close {
            d.push('Z');
        }
        let _ = writeln!(self.out, r#"<path d="{}" {style}/>"#, d.trim_end());
    }

    fn in_view(&self, l: f64, k: f64) -> bool {
        let (la, lb) = self.cfg.l_range;
        let (ka, kb) = self.cfg.k_range;
        l >= la && l <= lb && k >= ka && k <= kb
    }
}

fn sample(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| a + (b - a) * i as f64 / n as f64)
}

fn mirrored(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    pts.iter().map(|&(l, k)| (-l, k)).collect()
}

/// Deterministic SVG of the moduli plane.
pub fn emit_portrait(cfg: &PortraitConfig) -> Result<String> {
    let (l0, l1) = cfg.l_range;
    let (k0, k1) = cfg.k_range;
    if !(l0.is_finite() && l1.is_finite() && k0.is_finite() && k1.is_finite() && l0 < l1 && k0 < k1) {
        return Err(crate::Error::Precondition("portrait extents must be finite and increasing".into()));
    }
    let mut c = Canvas { cfg, out: String::new() };
    let _ = writeln!(
        c.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = cfg.width,
        h = cfg.height
    );
    let _ = writeln!(c.out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, cfg.width, cfg.height);

    let lower_w: Vec<(f64, f64)> = sample(k0.min(K_B), K_B, 200).map(|k| (moduli_plane::boundary_w(k).unwrap(), k)).collect();
    let lower_u: Vec<(f64, f64)> = sample(K_B, K_A, 200).map(|k| (moduli_plane::boundary_u(k).unwrap(), k)).collect();
    let upper_u: Vec<(f64, f64)> = sample(K_A, k1.max(K_A), 200).map(|k| (moduli_plane::boundary_u(k).unwrap(), k)).collect();

    for layer in &cfg.layers {
        match layer {
            Layer::Regions => {
                let _ = writeln!(c.out, r##"<rect class="region-incomplete" x="0" y="0" width="{}" height="{}" fill="#fbe3d6"/>"##, cfg.width, cfg.height);
                let mut closed: Vec<(f64, f64)> = lower_w.clone();
                closed.extend(lower_u.iter().skip(1));
                let mut back = mirrored(&closed);
                back.reverse();
                closed.extend(back);
                c.path(&closed, r##"class="region-closed" fill="#d6e8fb" stroke="none""##, true);
            }
            Layer::IntegralCurves => {
                let bound = 4.0 * l0.abs().max(l1.abs()).max(k0.abs()).max(k1.abs());
                let seeds = sample(k0, k1, 12)
                    .map(|k| ModuliPoint::new(0.0, k))
                    .chain(sample(k0, k1, 8).map(|k| ModuliPoint::new(1.0, k)));
                for seed in seeds {
                    if (seed.k - K_A).abs() < 1e-9 {
                        continue;
                    }
                    let path = integral_curve(seed, 8.0, bound)?;
                    let pts: Vec<(f64, f64)> =
                        path.iter().map(|(_, p)| (p.l, p.k)).filter(|&(l, k)| c.in_view(l, k)).collect();
                    for p in [pts.clone(), mirrored(&pts)] {
                        c.path(&p, r##"class="integral-curve" fill="none" stroke="#7a7a7a" stroke-width="0.6""##, false);
                    }
                }
            }
            Layer::Boundaries => {
                let v: Vec<(f64, f64)> =
                    sample(k0.min(K_B), K_B, 200).map(|k| (moduli_plane::boundary_v(k).unwrap(), k)).collect();
                let m: Vec<(f64, f64)> = vec![(l_b(), K_B), (l1.max(l_b()), K_B)];
                let styled = [
                    (&lower_u, "u", "#1f4e9e", ""),
                    (&upper_u, "u-upper", "#1f4e9e", r#" stroke-dasharray="6 3""#),
                    (&lower_w, "w", "#b02020", ""),
                    (&v, "v", "#2e7d32", r#" stroke-dasharray="2 3""#),
                    (&m, "m", "#6a1b9a", ""),
                ];
                for (pts, name, color, dash) in styled {
                    let visible: Vec<(f64, f64)> = pts.iter().copied().filter(|&(l, k)| c.in_view(l, k)).collect();
                    for p in [visible.clone(), mirrored(&visible)] {
                        c.path(&p, &format!(r#"class="boundary-{name}" fill="none" stroke="{color}" stroke-width="1.6"{dash}"#), false);
                    }
                }
            }
            Layer::FixedPoints => {
                for fp in moduli_plane::fixed_points() {
                    if c.in_view(fp.l, fp.k) {
                        let _ = writeln!(
                            c.out,
                            r##"<circle class="fixed-point" cx="{}" cy="{}" r="4" fill="#000000"/>"##,
                            sig9(c.x(fp.l)),
                            sig9(c.y(fp.k))
                        );
                    }
                }
            }
        }
    }
    // axes go on top of the region fills
    if l0 <= 0.0 && l1 >= 0.0 {
        let x = sig9(c.x(0.0));
        let _ = writeln!(c.out, r##"<line class="axis" x1="{x}" y1="0" x2="{x}" y2="{}" stroke="#000000"/>"##, cfg.height);
    }
    if k0 <= 0.0 && k1 >= 0.0 {
        let y = sig9(c.y(0.0));
        let _ = writeln!(c.out, r##"<line class="axis" x1="0" y1="{y}" x2="{}" y2="{y}" stroke="#000000"/>"##, cfg.width);
    }
    c.out.push_str("</svg>\n");
    Ok(c.out)
}

/// Default region tolerance, overridden by `QUARTIC_MODULI_TOL`.
pub fn region_tolerance_from_env() -> std::result::Result<f64, String> {
    match std::env::var("QUARTIC_MODULI_TOL") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(format!("QUARTIC_MODULI_TOL must be a positive number, got {s:?}")),
        },
        Err(_) => Ok(EPS_REGION),
    }
}
