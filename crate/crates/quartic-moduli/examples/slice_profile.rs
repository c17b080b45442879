//! Domain, metric and extremal points of the slice through a standard form.

use quartic_moduli::report::slice_csv;
use quartic_moduli::slice_analysis::{completeness_probe, domain, extremal_points};

fn main() -> quartic_moduli::Result<()> {
    let (l, k) = (0.4, -0.2);
    let profile = domain(l, k)?;
    println!("L = {l}, K = {k}");
    println!("dom = ({}, {}), boundary {:?}", profile.dom_lo, profile.dom_hi, profile.boundary);
    println!("slice roots {:?}", profile.f_roots);
    println!("metric roots {:?}", profile.g_roots);
    println!("extremal points {:?}", extremal_points(l, k));
    println!("closed: {}", profile.is_closed()?);
    println!("arc length toward each end: {:?}", completeness_probe(l, k)?);
    println!();
    print!("{}", slice_csv(&profile, 9));
    Ok(())
}
