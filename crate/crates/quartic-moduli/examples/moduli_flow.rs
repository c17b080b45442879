//! Follow an integral curve of the moduli field and watch the first integral stay put.

use quartic_moduli::moduli_plane::{canonical_representative, first_integral, region, ModuliPoint};
use quartic_moduli::report::integral_curve;

fn main() -> quartic_moduli::Result<()> {
    let start = ModuliPoint::new(0.3, 0.05);
    println!("start {start:?} lies in {:?}", region(start).tag);

    let c0 = first_integral(start)?;
    println!("first integral {c0:?}");

    let path = integral_curve(start, 2.0, 4.0)?;
    let worst = path
        .iter()
        .filter_map(|(_, p)| first_integral(*p).ok())
        .map(|s| (s.c - c0.c).abs())
        .fold(0.0_f64, f64::max);
    println!("{} samples, largest drift in the integral {worst:.2e}", path.len());
    for (s, p) in path.iter().step_by((path.len() / 8).max(1)) {
        println!("  s = {s:+.4}  L = {:+.6}  K = {:+.6}", p.l, p.k);
    }

    let canon = canonical_representative(start)?;
    println!("canonical point {:?} via {:?}", canon.class_point, canon.certificate);
    Ok(())
}
