//! Classify a few quartic forms given by their coefficients.
//!
//! Run with `cargo run --example classify_form`.

use quartic_moduli::classification::classify;
use quartic_moduli::QuarticForm;

fn main() {
    let forms = [
        ("x⁴ − x²y² + y⁴/4", QuarticForm::new(1.0, 0.0, -1.0, 0.0, 0.25)),
        ("xy(x² − y²)", QuarticForm::new(0.0, 1.0, 0.0, -1.0, 0.0)),
        ("2x⁴ + x³y − 3x²y² + ...", QuarticForm::new(2.0, 1.0, -3.0, 0.5, 0.3)),
        ("(x² + y²)²", QuarticForm::new(1.0, 0.0, 2.0, 0.0, 1.0)),
    ];

    for (label, h) in forms {
        let r = classify(&h, None);
        let parameter = r.parameter.map_or("-".to_string(), |p| format!("{p:.6}"));
        println!(
            "{label:<32} {:<14} parameter={parameter:<10} components={} closed={}",
            r.class_tag.name(),
            r.components,
            r.closed,
        );
        for d in &r.diagnostics {
            println!("    {:?}: {}", d.kind, d.message);
        }
    }
}
