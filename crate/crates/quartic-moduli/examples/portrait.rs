//! Write the SVG portrait of the moduli plane to `portrait.svg` (or the path given).

use quartic_moduli::report::{emit_portrait, PortraitConfig};

fn main() -> quartic_moduli::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "portrait.svg".into());
    let svg = emit_portrait(&PortraitConfig::default())?;
    std::fs::write(&path, &svg).expect("portrait file is writable");
    println!("wrote {} bytes to {path}", svg.len());
    Ok(())
}
