//! Surfaces known only through samples: CSV in, jets and energies out.
//!
//! ```bash
//! cargo run --example sampled_surface
//! ```

use std::error::Error;
use std::sync::Arc;

use willmore_lab::energetics::energy_report;
use willmore_lab::geom::fundamental_forms;
use willmore_lab::sampled::SampledSurface;
use willmore_lab::{DiskQuadrature, SurfaceSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let exact = SurfaceSpec::Catenoid;
    let samples = SampledSurface::from_fn([-1.0, -1.0], [0.02, 0.02], 101, 101, |p| {
        exact.jet(p).map(|j| j.phi).unwrap_or_default()
    })?;
    let mut csv = Vec::new();
    samples.write_csv(&mut csv)?;
    let grid = SurfaceSpec::GridSampled(Arc::new(SampledSurface::from_csv_reader(csv.as_slice())?));

    let p = [0.31, -0.17];
    let a = fundamental_forms(&exact.jet(p)?)?;
    let b = fundamental_forms(&grid.jet(p)?)?;
    println!("K exact {:.10}, from samples {:.10}", a.k, b.k);

    let q = DiskQuadrature::new([0.0, 0.0], 0.8, 12, 24)?;
    let e1 = energy_report(&exact, &q)?.e_tf;
    let e2 = energy_report(&grid, &q)?.e_tf;
    println!("E_tf over D_0.8: exact {e1:.10}, from samples {e2:.10}");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
