//! Two forms related by a linear change of variables are recognised as equivalent.

use quartic_moduli::classification::equivalent;
use quartic_moduli::{LinearMap2, QuarticForm};

fn main() -> quartic_moduli::Result<()> {
    let h = QuarticForm::standard(0.3, -0.1);
    let a = LinearMap2::new(1.3, -0.4, 0.7, 2.1);
    let moved = h.pullback(&a);
    let other = QuarticForm::standard(0.3, 0.1);

    println!("h      = {:?}", h.coefficients());
    println!("A*h    = {:?}", moved.coefficients());
    println!("h ~ A*h: {}", equivalent(&h, &moved)?);
    println!("h ~ h_(0.3, 0.1): {}", equivalent(&h, &other)?);
    Ok(())
}
