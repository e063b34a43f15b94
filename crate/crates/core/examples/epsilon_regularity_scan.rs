//! Ratio scans `ρ·sup|Åe^{−λ}| / ‖Åe^{−λ}‖_{L²}` with hypothesis gates.
//!
//! ```bash
//! cargo run --example epsilon_regularity_scan
//! ```

use std::error::Error;

use willmore_lab::energetics::{epsreg_scan, write_scan_csv, ScanThresholds};
use willmore_lab::SurfaceSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let th = ScanThresholds::default();
    let rows = epsreg_scan(
        &SurfaceSpec::Enneper,
        &[[3.0, 0.0]],
        &[0.25, 0.5, 1.0],
        16,
        32,
        &th,
    )?;
    write_scan_csv(&rows, std::io::stdout().lock())?;

    // the same disks seen through p ↦ Enneper(c + ρp) on the unit disk
    for row in &rows {
        let rho = row.report.radius;
        let rescaled = SurfaceSpec::rescaled([3.0, 0.0], rho, SurfaceSpec::Enneper)?;
        let unit = &epsreg_scan(&rescaled, &[[0.0, 0.0]], &[1.0], 16, 32, &th)?[0].report;
        println!(
            "ρ = {rho}: l2 {:.3e} vs {:.3e}, linf·ρ {:.3e} vs {:.3e}",
            row.report.l2_tf,
            unit.l2_tf,
            row.report.linf_tf_half * rho,
            unit.linf_tf_half
        );
    }

    println!("Enneper at the origin, growing disks:");
    for rho in [4.0, 8.0, 16.0] {
        let r = &epsreg_scan(&SurfaceSpec::Enneper, &[[0.0, 0.0]], &[rho], 48, 64, &th)?[0].report;
        println!(
            "ρ = {rho:>4}: l2_tf = {:.6}, ratio = {:.4}",
            r.l2_tf, r.ratio
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
