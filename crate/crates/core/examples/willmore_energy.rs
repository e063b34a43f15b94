//! Willmore and tracefree energies, from a single disk to a closed sphere.
//!
//! ```bash
//! cargo run --example willmore_energy
//! ```

use std::error::Error;
use std::f64::consts::PI;

use willmore_lab::energetics::{chart_willmore_energy, energy_report, gauss_bonnet_check};
use willmore_lab::{DiskQuadrature, SurfaceSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sphere = SurfaceSpec::sphere(1.0)?;
    for r in [1.0, 10.0, 100.0, 1000.0] {
        let w = chart_willmore_energy(&sphere, r)?;
        println!(
            "W over D_{r:<6} = {w:.9}   closed form {:.9}",
            4.0 * PI * r * r / (1.0 + r * r)
        );
    }

    for text in ["sphere r=2", "invert center=(0.5,1,3) of (sphere r=1)"] {
        let g = gauss_bonnet_check(&text.parse()?)?;
        println!(
            "{text}: E_tf = {:.2e}, 2W − 8π = {:.2e}, defect {:.2e}",
            g.e_tf_total, g.two_w_minus_4pi_chi, g.defect
        );
    }

    let q = DiskQuadrature::new([0.0, 0.0], 1.0, 16, 32)?;
    let r = energy_report(&SurfaceSpec::Enneper, &q)?;
    println!(
        "Enneper on D_1: E_tf = {:.10} (4π = {:.10}), ratio {:.4}",
        r.e_tf,
        4.0 * PI,
        r.ratio
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
