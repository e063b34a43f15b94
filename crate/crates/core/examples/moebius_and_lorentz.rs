//! Möbius maps acting on points, on jets, and on de Sitter space.
//!
//! ```bash
//! cargo run --example moebius_and_lorentz
//! ```

use std::error::Error;

use nalgebra::Vector3;
use willmore_lab::gauss_map::gauss_map_at;
use willmore_lab::geom::{fundamental_forms, tracefree_density};
use willmore_lab::{MoebiusMap, SurfaceSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let m: MoebiusMap =
        "translate (0.2,0,1) | invert (0,0,3) | rotate (0,0,1) 0.5 | dilate 2".parse()?;
    println!("map: {m}");
    println!(
        "image of (1,0,0): {:?}",
        m.apply_point(&Vector3::new(1.0, 0.0, 0.0))?.as_slice()
    );

    let l = m.lorentz();
    println!("|MᵀεM − ε| = {:.1e}", l.lorentz_defect());

    let spec = SurfaceSpec::Enneper;
    let image = SurfaceSpec::transformed(m.clone(), spec.clone())?;
    let p = [0.7, 0.4];
    let (_, y) = gauss_map_at(&spec, p)?;
    let (_, y_image) = gauss_map_at(&image, p)?;
    println!(
        "|Y(m∘Φ) − M·Y(Φ)| = {:.1e}",
        (y_image.y - l.act_on_y(&y.y)).norm()
    );

    let before = tracefree_density(&fundamental_forms(&spec.jet(p)?)?);
    let after = tracefree_density(&fundamental_forms(&image.jet(p)?)?);
    println!("tracefree density before {before:.12}, after {after:.12}");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
