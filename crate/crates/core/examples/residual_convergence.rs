//! Gauss–Codazzi and Willmore residuals under grid refinement.
//!
//! ```bash
//! cargo run --example residual_convergence
//! ```

use std::error::Error;

use willmore_lab::residuals::{
    convergence_study, gauss_codazzi_residual, willmore_residual_classical,
    willmore_residual_divergence, ParamGrid,
};
use willmore_lab::SurfaceSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = ParamGrid::new([0.2, 0.3], 0.3, 8)?;
    for text in [
        "invert center=(0.5,0.2,1) of (catenoid)",
        "perturb amp=0.05 of (enneper)",
    ] {
        let spec: SurfaceSpec = text.parse()?;
        println!("{text}");
        let gc = convergence_study(&grid, |g| gauss_codazzi_residual(&spec, g))?;
        let cl = convergence_study(&grid, |g| willmore_residual_classical(&spec, g))?;
        let dv = convergence_study(&grid, |g| willmore_residual_divergence(&spec, g))?;
        for (name, s) in [("gauss-codazzi", gc), ("classical", cl), ("divergence", dv)] {
            println!("  {name:<14} maxima {:?} orders {:.2?}", s.maxima, s.orders);
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
