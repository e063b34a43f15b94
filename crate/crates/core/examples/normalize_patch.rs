//! Cancel the average mean curvature of a patch with one inversion.
//!
//! ```bash
//! cargo run --example normalize_patch
//! ```

use std::error::Error;

use willmore_lab::normalizer::{averages, normalize, target_sphere, CenterConfig};
use willmore_lab::{DiskQuadrature, SurfaceSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let q = DiskQuadrature::new([0.3, 0.0], 0.5, 16, 32)?;
    for text in [
        "enneper",
        "sphere r=1",
        "invert center=(0.5,0.2,1) of (enneper)",
    ] {
        let spec: SurfaceSpec = text.parse()?;
        let avg = averages(&spec, &q)?;
        println!(
            "{text}: H̄ = {:.4}, ⟨Ȳ,Ȳ⟩ + variance = {:.15}, sphere {:?}",
            avg.hbar,
            avg.lorentz_square + avg.variance,
            target_sphere(&avg)
        );
        let r = normalize(&spec, &q, &CenterConfig::default(), 0.1)?;
        println!(
            "  theta = {}\n  |H̄_Ψ| = {:.2e} (predicted {:.2e})",
            r.theta, r.achieved_hbar, r.predicted_hbar
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
