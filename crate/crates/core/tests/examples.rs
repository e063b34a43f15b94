#[allow(dead_code)]
#[path = "../examples/curvature_at_a_point.rs"]
mod curvature_at_a_point;

#[test]
fn example_curvature_at_a_point() {
    curvature_at_a_point::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/weierstrass_surfaces.rs"]
mod weierstrass_surfaces;

#[test]
fn example_weierstrass_surfaces() {
    weierstrass_surfaces::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/moebius_and_lorentz.rs"]
mod moebius_and_lorentz;

#[test]
fn example_moebius_and_lorentz() {
    moebius_and_lorentz::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/conformal_gauss_map.rs"]
mod conformal_gauss_map;

#[test]
fn example_conformal_gauss_map() {
    conformal_gauss_map::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/willmore_energy.rs"]
mod willmore_energy;

#[test]
fn example_willmore_energy() {
    willmore_energy::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/epsilon_regularity_scan.rs"]
mod epsilon_regularity_scan;

#[test]
fn example_epsilon_regularity_scan() {
    epsilon_regularity_scan::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/normalize_patch.rs"]
mod normalize_patch;

#[test]
fn example_normalize_patch() {
    normalize_patch::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/residual_convergence.rs"]
mod residual_convergence;

#[test]
fn example_residual_convergence() {
    residual_convergence::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/sampled_surface.rs"]
mod sampled_surface;

#[test]
fn example_sampled_surface() {
    sampled_surface::run_example().unwrap();
}
