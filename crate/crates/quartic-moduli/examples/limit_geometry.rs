//! Limits of the frame curve toward either end of the slice domain.

use quartic_moduli::classification::{limit_geometries_verified, limit_table};
use quartic_moduli::selfcheck::representatives;

fn main() {
    for (tag, p) in representatives() {
        let parameter = tag.is_parametric().then_some(p.k);
        print!("{:<14}", tag.name());
        match limit_geometries_verified(tag, parameter) {
            Ok(found) => {
                for g in found {
                    let limit = g.result.map_or("none", |t| t.name());
                    print!("  {:?} -> {limit}", g.direction);
                    if let Some(q) = g.numeric_limit {
                        print!(" at ({:.5}, {:.5})", q.l, q.k);
                    }
                }
                println!();
            }
            Err(e) => println!("  not verified ({e}); table says {:?}", limit_table(tag)),
        }
    }
}
