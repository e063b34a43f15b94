//! Minimal surfaces from Weierstrass data typed as rational expressions.
//!
//! ```bash
//! cargo run --example weierstrass_surfaces
//! ```

use std::error::Error;

use num_complex::Complex64;
use willmore_lab::expr::{differentiate, parse_rational};
use willmore_lab::geom::fundamental_forms;
use willmore_lab::{SurfaceError, SurfaceSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = parse_rational("z^2/(1+z)")?;
    let dg = differentiate(&g);
    println!(
        "g  = {g}\ng' = {dg}\ng(1) = {}",
        g.eval(Complex64::new(1.0, 0.0))
    );

    // g = z, dh = 2 dz is Enneper's surface
    let w = SurfaceSpec::weierstrass("z", "2", Complex64::new(0.0, 0.0))?;
    let p = [0.4, -0.3];
    let gap = (w.jet(p)?.phi - SurfaceSpec::Enneper.jet(p)?.phi).norm();
    println!("|Weierstrass(z, 2) − Enneper| at {p:?}: {gap:.2e}");

    let higher: SurfaceSpec = "weierstrass g=\"z^2\" dh=\"1\" base=0".parse()?;
    for p in [[0.3, 0.2], [-0.5, 0.4]] {
        let f = fundamental_forms(&higher.jet(p)?)?;
        println!(
            "{higher} at {p:?}: H = {:.1e}, K = {:.4}, conformality defect {:.1e}",
            f.h, f.k, f.conformality_defect
        );
    }

    let with_pole = SurfaceSpec::weierstrass("1/(z-1)", "1", Complex64::new(0.0, 0.0))?;
    match with_pole.jet([2.0, 0.0]) {
        Err(e @ SurfaceError::PoleOnPath { .. }) => println!("rejected: {e}"),
        other => return Err(format!("expected a pole error, got {other:?}").into()),
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
