//! Reduce `h_{1,K}` to the factor form `xy(x² + c xy + y²)` for a few `K`.

use quartic_moduli::classification::{extrapolate_c_at_u, reduce_factor_form};
use quartic_moduli::constants::{constant_u, K_W1};

fn main() -> quartic_moduli::Result<()> {
    println!("{:>12} {:>12} {:>12} {:>10}", "K", "z", "c", "residual");
    for k in [0.2, 0.0, -0.1, -0.3, K_W1] {
        let r = reduce_factor_form(k)?;
        println!("{k:>12.6} {:>12.6} {:>12.6} {:>10.1e}", r.z, r.c, r.residual);
    }
    println!("U = {:.12}, c extrapolated to U: {:.10}", constant_u(), extrapolate_c_at_u()?);
    Ok(())
}
