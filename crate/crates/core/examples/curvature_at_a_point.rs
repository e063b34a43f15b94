//! Fundamental forms and curvature identities on a few zoo surfaces.
//!
//! ```bash
//! cargo run --example curvature_at_a_point
//! ```

use std::error::Error;

use willmore_lab::geom::{curvature_identity_residual, fundamental_forms, tracefree_density};
use willmore_lab::SurfaceSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let surfaces = [
        "plane",
        "sphere r=1",
        "enneper",
        "catenoid",
        "invert center=(0,0,3) of (enneper)",
    ];
    println!(
        "{:<36} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "surface", "lambda", "H", "K", "|Åe^-λ|", "identity"
    );
    for text in surfaces {
        let spec: SurfaceSpec = text.parse()?;
        let f = fundamental_forms(&spec.jet([1.0, 0.0])?)?;
        println!(
            "{:<36} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.1e}",
            text,
            f.lambda,
            f.h,
            f.k,
            tracefree_density(&f),
            curvature_identity_residual(&f)
        );
        assert!(curvature_identity_residual(&f).abs() < 1e-10);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
