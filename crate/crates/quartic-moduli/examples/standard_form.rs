//! Bring a form to `x⁴ − x²y² + L xy³ + K y⁴` at a chosen hyperbolic point, then check the frame.

use quartic_moduli::standard_form::standardize;
use quartic_moduli::{Point2, QuarticForm};

fn main() -> quartic_moduli::Result<()> {
    let h = QuarticForm::new(3.0, -1.0, -2.0, 0.7, 0.4);
    for p in [Point2::new(1.0, 0.0), Point2::new(1.0, 0.1), Point2::new(0.9, -0.2)] {
        if !h.is_hyperbolic_point(p) {
            println!("({:.2}, {:.2}) is not a hyperbolic point", p.x, p.y);
            continue;
        }
        let sf = standardize(&h, p)?;
        let back = h.pullback(&sf.frame);
        println!(
            "base ({:.2}, {:.2}): L = {:+.9}, K = {:+.9}, residual {:.1e}",
            p.x,
            p.y,
            sf.l,
            sf.k,
            back.max_abs_diff(&sf.form()),
        );
    }
    Ok(())
}
