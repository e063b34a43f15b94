//! The conformal Gauss map: pointwise identities and harmonicity on a grid.
//!
//! ```bash
//! cargo run --example conformal_gauss_map
//! ```

use std::error::Error;

use willmore_lab::gauss_map::{
    conformality_report, gauss_map_at, harmonicity_residual, recover_h, YGrid,
};
use willmore_lab::geom::tracefree_density;
use willmore_lab::lorentz::square;
use willmore_lab::residuals::ParamGrid;
use willmore_lab::SurfaceSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let willmore: SurfaceSpec = "invert center=(0.5,0.2,1) of (catenoid)".parse()?;
    let control: SurfaceSpec = "perturb amp=0.05 of (enneper)".parse()?;

    let (f, y) = gauss_map_at(&willmore, [0.2, 0.3])?;
    println!("⟨Y,Y⟩ = {:.15}", square(&y.y));
    println!("H = {:.12}, Y5 − Y4 = {:.12}", f.h, recover_h(&y.y));
    println!(
        "conformality report: {:?}",
        conformality_report(&y, tracefree_density(&f))
    );

    println!("{:>8} {:>14} {:>14}", "h", "Willmore", "perturbed");
    for n in [8, 16, 32] {
        let g = ParamGrid::new([0.2, 0.3], 0.3, n)?;
        let a = harmonicity_residual(&YGrid::from_spec(&willmore, g)?)?.max;
        let b = harmonicity_residual(&YGrid::from_spec(&control, g)?)?.max;
        println!("{:>8.5} {:>14.3e} {:>14.3e}", g.h(), a, b);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
