//! Build a full JSON report and check that it re-derives from its own input echo.

use quartic_moduli::moduli_plane::EPS_REGION;
use quartic_moduli::report::build_report;
use quartic_moduli::QuarticForm;

fn main() {
    let h = QuarticForm::new(1.0, 0.2, -1.5, 0.4, -0.1);
    let doc = build_report(&h, None, EPS_REGION);
    println!("{}", doc.to_json());

    let again = doc.rederive();
    eprintln!("re-derived class: {}", again.classification.class_tag.name());
}
