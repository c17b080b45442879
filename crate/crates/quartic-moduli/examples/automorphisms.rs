//! Automorphism groups of the class representatives, checked by pulling back.

use quartic_moduli::classification::automorphisms;
use quartic_moduli::selfcheck::representatives;
use quartic_moduli::QuarticForm;

fn main() -> quartic_moduli::Result<()> {
    for (tag, p) in representatives() {
        let parameter = tag.is_parametric().then_some(p.k);
        let group = automorphisms(tag, parameter)?;
        println!("{:<14} {:<10} residual {:.1e}", tag.name(), group.descriptor, group.residual);

        let h = QuarticForm::standard(p.l, p.k);
        for g in &group.discrete_generators {
            println!("    [[{:+.4}, {:+.4}], [{:+.4}, {:+.4}]]  moves h by {:.1e}", g.a11, g.a12, g.a21, g.a22, h.pullback(g).max_abs_diff(&h));
        }
        if let Some(family) = group.continuous_generator {
            let g = family.at(0.5);
            println!("    exp(X/2) moves h by {:.1e}", h.pullback(&g).max_abs_diff(&h));
        }
    }
    Ok(())
}
