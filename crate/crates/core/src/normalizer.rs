//! Cancelling the average mean curvature of a patch with one inversion.
//!
//! After translating `Φ(center)` to the origin and dilating so that the
//! average conformal factor is `λ̄ = 0`, the average of `H` after the
//! inversion `x ↦ (x − a)/|x − a|²` is the quadratic
//!
//! ```text
//! H̄_Ψ(a) = 2⟨a, Ȳ₁₂₃⟩ − Ȳ₅ − Ȳ₄ − |a|²(Ȳ₅ − Ȳ₄)
//! ```
//!
//! in `a`, because `Y` transforms linearly. Its zero set is the sphere with
//! center `Ȳ₁₂₃/(Ȳ₅ − Ȳ₄)` and radius `sqrt⟨Ȳ,Ȳ⟩/|Ȳ₅ − Ȳ₄|`, real exactly when
//! `⟨Ȳ,Ȳ⟩ ≥ 0`. The center is picked on that sphere as far as possible from
//! the image of the patch.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::energetics::UMBILIC_TOL;
use crate::gauss_map::gauss_map_value;
use crate::geom::{fundamental_forms, tracefree_density};
use crate::lorentz::{square, y123, Vector5};
use crate::moebius::{MoebiusError, MoebiusMap, Primitive};
use crate::quadrature::DiskQuadrature;
use crate::zoo::{SurfaceError, SurfaceSpec};

/// `|Ȳ₅ − Ȳ₄|` at or below this means the average already vanishes.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Candidate count of the global sphere search.
pub const SPHERE_SAMPLES: usize = 256;

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("no real target sphere: ⟨Ȳ,Ȳ⟩ = {lorentz_square:e} < 0")]
    NoRealSphere { lorentz_square: f64 },
    #[error("no admissible inversion center: best distance {best:e} to the patch is below δ = {delta:e} or |a| = {norm:e} exceeds R_max = {r_max:e}")]
    NoAdmissibleCenter {
        best: f64,
        delta: f64,
        norm: f64,
        r_max: f64,
    },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Euclidean (`dxdy`) averages over a disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AverageData {
    pub hbar: f64,
    pub ybar: [f64; 5],
    pub lorentz_square: f64,
    pub variance: f64,
    pub lambda_bar: f64,
}

impl AverageData {
    pub fn ybar(&self) -> Vector5 {
        Vector5::from_column_slice(&self.ybar)
    }
}

pub fn averages(spec: &SurfaceSpec, q: &DiskQuadrature) -> Result<AverageData, SurfaceError> {
    let mut ys = Vec::with_capacity(q.nodes.len());
    let mut hs = Vec::with_capacity(q.nodes.len());
    let mut ls = Vec::with_capacity(q.nodes.len());
    for &p in &q.nodes {
        let j = spec.jet(p)?;
        let f = fundamental_forms(&j)?;
        ys.push(gauss_map_value(&j, &f));
        hs.push(f.h);
        ls.push(f.lambda);
    }
    let area = q.area();
    let mean = |v: &[f64]| q.sum_values(v) / area;
    let mut ybar = [0.0; 5];
    for (k, slot) in ybar.iter_mut().enumerate() {
        *slot = mean(&ys.iter().map(|y| y[k]).collect::<Vec<_>>());
    }
    let yb = Vector5::from_column_slice(&ybar);
    let var: Vec<f64> = ys.iter().map(|y| square(&(y - yb))).collect();
    Ok(AverageData {
        hbar: mean(&hs),
        ybar,
        lorentz_square: square(&yb),
        variance: mean(&var),
        lambda_bar: mean(&ls),
    })
}

/// Average of `H` after `Invert(a)`, predicted from the averages of `Y`.
pub fn predicted_hbar_after_inversion(a: &Vector3<f64>, avg: &AverageData) -> f64 {
    let y = avg.ybar();
    2.0 * a.dot(&y123(&y)) - y[4] - y[3] - a.norm_squared() * (y[4] - y[3])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSphere {
    /// The average mean curvature already vanishes.
    IdentitySuffices,
    NoRealSphere {
        lorentz_square: f64,
    },
    Sphere {
        center: Vector3<f64>,
        radius: f64,
    },
}

pub fn target_sphere(avg: &AverageData) -> TargetSphere {
    let y = avg.ybar();
    let d = y[4] - y[3];
    if d.abs() <= IDENTITY_TOL {
        return TargetSphere::IdentitySuffices;
    }
    if avg.lorentz_square < 0.0 {
        return TargetSphere::NoRealSphere {
            lorentz_square: avg.lorentz_square,
        };
    }
    TargetSphere::Sphere {
        center: y123(&y) / d,
        radius: avg.lorentz_square.sqrt() / d.abs(),
    }
}

/// Admissibility thresholds for the inversion center, as multiples of the
/// image diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterConfig {
    pub delta_factor: f64,
    pub r_max_factor: f64,
}

impl Default for CenterConfig {
    fn default() -> Self {
        Self {
            delta_factor: 1e-2,
            r_max_factor: 1e3,
        }
    }
}

/// Fibonacci lattice on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * k as f64;
            Vector3::new(rho * t.cos(), rho * t.sin(), z)
        })
        .collect()
}

fn min_distance(a: &Vector3<f64>, points: &[Vector3<f64>]) -> f64 {
    points
        .iter()
        .map(|p| (p - a).norm())
        .fold(f64::INFINITY, f64::min)
}

pub fn diameter(points: &[Vector3<f64>]) -> f64 {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterChoice {
    pub a: Vector3<f64>,
    pub min_distance: f64,
    pub delta: f64,
    pub r_max: f64,
}

/// The point of `S(c, r)` farthest from `points` in the max-min sense:
/// a global Fibonacci search followed by one local search in the cap around
/// the winner. Ties go to the lowest candidate index.
pub fn select_center(
    c: &Vector3<f64>,
    r: f64,
    points: &[Vector3<f64>],
    cfg: &CenterConfig,
) -> Result<CenterChoice, NormalizeError> {
    let diam = diameter(points);
    let delta = cfg.delta_factor * diam;
    let r_max = cfg.r_max_factor * diam;
    let mut best_u = Vector3::z();
    let mut best = f64::NEG_INFINITY;
    for u in fibonacci_sphere(SPHERE_SAMPLES) {
        let d = min_distance(&(c + u * r), points);
        if d > best {
            best = d;
            best_u = u;
        }
    }
    // local cap of angular radius about one lattice spacing
    let cap = (4.0 * PI / SPHERE_SAMPLES as f64).sqrt();
    let e1 = if best_u.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let t1 = best_u.cross(&e1).normalize();
    let t2 = best_u.cross(&t1);
    let center_u = best_u;
    for ring in 1..=4 {
        let ang = cap * ring as f64 / 4.0;
        for k in 0..16 {
            let phi = 2.0 * PI * k as f64 / 16.0;
            let u =
                (center_u * ang.cos() + (t1 * phi.cos() + t2 * phi.sin()) * ang.sin()).normalize();
            let d = min_distance(&(c + u * r), points);
            if d > best {
                best = d;
                best_u = u;
            }
        }
    }
    let a = c + best_u * r;
    if best < delta || a.norm() > r_max {
        return Err(NormalizeError::NoAdmissibleCenter {
            best,
            delta,
            norm: a.norm(),
            r_max,
        });
    }
    Ok(CenterChoice {
        a,
        min_distance: best,
        delta,
        r_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationResult {
    /// `identity` or `inverted`.
    pub outcome: String,
    /// Möbius text format; parses back with `MoebiusMap::from_str`.
    pub theta: String,
    pub sphere_center: Option<[f64; 3]>,
    pub sphere_radius: Option<f64>,
    /// Inversion center in the pre-normalised frame.
    pub chosen_a: Option<[f64; 3]>,
    pub min_distance: Option<f64>,
    pub predicted_hbar: f64,
    /// `|H̄_Ψ|` recomputed through the full jet pipeline.
    pub achieved_hbar: f64,
    /// RMS of `|A|_g` over the pre-normalised patch.
    pub curvature_scale: f64,
    pub hbar_before: f64,
    pub lambda_bar_before: f64,
    pub lambda_bar_after: f64,
    pub lorentz_square: f64,
    pub variance: f64,
    pub l2_tf: f64,
    /// `(1 − ⟨Ȳ,Ȳ⟩)/l2_tf²`, absent on umbilic patches.
    pub cor_y_quotient: Option<f64>,
    /// `⟨Ȳ,Ȳ⟩ ≥ ½`, evaluated only when `l2_tf ≤ ε₀`.
    pub cor_y_gate: Option<bool>,
    #[serde(skip)]
    pub map: MoebiusMap,
}

/// `Dilate(e^{−λ̄}) ∘ Translate(−Φ(center))`, dropping trivial stages.
pub fn prenormalization(
    spec: &SurfaceSpec,
    q: &DiskQuadrature,
) -> Result<MoebiusMap, NormalizeError> {
    let origin = spec.jet(q.center)?.phi;
    let mut stages = Vec::new();
    if origin != Vector3::zeros() {
        stages.push(Primitive::Translate(-origin));
    }
    let shifted = SurfaceSpec::transformed(MoebiusMap::new(stages.clone())?, spec.clone())?;
    let lambda_bar = averages(&shifted, q)?.lambda_bar;
    if lambda_bar != 0.0 {
        stages.push(Primitive::Dilate((-lambda_bar).exp()));
    }
    Ok(MoebiusMap::new(stages)?)
}

pub fn normalize(
    spec: &SurfaceSpec,
    q: &DiskQuadrature,
    cfg: &CenterConfig,
    eps0: f64,
) -> Result<NormalizationResult, NormalizeError> {
    let before = averages(spec, q)?;
    let pre = prenormalization(spec, q)?;
    let tilde = SurfaceSpec::transformed(pre.clone(), spec.clone())?;
    let avg = averages(&tilde, q)?;

    let mut points = Vec::with_capacity(q.nodes.len());
    let mut a_sq = Vec::with_capacity(q.nodes.len());
    let mut tf = Vec::with_capacity(q.nodes.len());
    for &p in &q.nodes {
        let j = tilde.jet(p)?;
        let f = fundamental_forms(&j).map_err(SurfaceError::from)?;
        points.push(j.phi);
        a_sq.push(f.a_norm_sq());
        tf.push(tracefree_density(&f).powi(2));
    }
    let curvature_scale = (q.sum_values(&a_sq) / q.area()).max(0.0).sqrt();
    let l2_tf = q.sum_values(&tf).max(0.0).sqrt();

    let (outcome, map, sphere, choice) = match target_sphere(&avg) {
        TargetSphere::IdentitySuffices => ("identity", MoebiusMap::identity(), None, None),
        TargetSphere::NoRealSphere { lorentz_square } => {
            return Err(NormalizeError::NoRealSphere { lorentz_square })
        }
        TargetSphere::Sphere { center, radius } => {
            let choice = select_center(&center, radius, &points, cfg)?;
            let map = pre.clone().then(Primitive::Invert(choice.a))?;
            ("inverted", map, Some((center, radius)), Some(choice))
        }
    };
    let predicted_hbar = match &choice {
        Some(c) => predicted_hbar_after_inversion(&c.a, &avg),
        None => avg.hbar,
    };
    let psi = SurfaceSpec::transformed(map.clone(), spec.clone())?;
    let after = averages(&psi, q)?;
    let cor_y_quotient = (l2_tf > UMBILIC_TOL).then(|| (1.0 - avg.lorentz_square) / (l2_tf * l2_tf));
    Ok(NormalizationResult {
        outcome: outcome.to_string(),
        theta: map.to_string(),
        sphere_center: sphere.map(|(c, _)| [c[0], c[1], c[2]]),
        sphere_radius: sphere.map(|(_, r)| r),
        chosen_a: choice.map(|c| [c.a[0], c.a[1], c.a[2]]),
        min_distance: choice.map(|c| c.min_distance),
        predicted_hbar,
        achieved_hbar: after.hbar.abs(),
        curvature_scale,
        hbar_before: before.hbar,
        lambda_bar_before: before.lambda_bar,
        lambda_bar_after: after.lambda_bar,
        lorentz_square: avg.lorentz_square,
        variance: avg.variance,
        l2_tf,
        cor_y_quotient,
        cor_y_gate: (l2_tf <= eps0).then_some(avg.lorentz_square >= 0.5),
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::disk_quadrature;

    fn q(c: [f64; 2], r: f64) -> DiskQuadrature {
        disk_quadrature(c, r, 12, 24).unwrap()
    }

    #[test]
    fn plane_needs_nothing() {
        let avg = averages(&SurfaceSpec::Plane, &q([0.0, 0.0], 1.0)).unwrap();
        assert_eq!(avg.hbar, 0.0);
        assert!((avg.lorentz_square - 1.0).abs() < 1e-15 && avg.variance.abs() < 1e-15);
        assert_eq!(target_sphere(&avg), TargetSphere::IdentitySuffices);
        let r = normalize(
            &SurfaceSpec::Plane,
            &q([0.0, 0.0], 1.0),
            &CenterConfig::default(),
            0.1,
        )
        .unwrap();
        assert!(r.map.is_identity());
        assert_eq!(r.achieved_hbar, 0.0);
    }

    #[test]
    fn prediction_at_origin_and_on_sphere() {
        let mut avg = AverageData {
            hbar: 0.3,
            ybar: [0.6, -0.2, 0.4, 0.5, 0.8],
            lorentz_square: 0.0,
            variance: 0.0,
            lambda_bar: 0.0,
        };
        avg.lorentz_square = square(&avg.ybar());
        assert_eq!(
            predicted_hbar_after_inversion(&Vector3::zeros(), &avg),
            -1.3
        );
        match target_sphere(&avg) {
            TargetSphere::Sphere { center, radius } => {
                for u in fibonacci_sphere(50) {
                    let a = center + u * radius;
                    assert!(predicted_hbar_after_inversion(&a, &avg).abs() < 1e-12);
                }
            }
            other => panic!("{other:?}"),
        }
        let neg = AverageData {
            lorentz_square: -0.5,
            ..avg
        };
        assert!(matches!(
            target_sphere(&neg),
            TargetSphere::NoRealSphere { .. }
        ));
    }

    #[test]
    fn unit_sphere_chart_is_its_own_target() {
        let s = SurfaceSpec::sphere(1.0).unwrap();
        let avg = averages(&s, &q([0.0, 0.0], 1.0)).unwrap();
        assert!((avg.lorentz_square - 1.0).abs() < 1e-12);
        match target_sphere(&avg) {
            TargetSphere::Sphere { center, radius } => {
                assert!(center.norm() < 1e-12 && (radius - 1.0).abs() < 1e-12);
                let pts: Vec<_> = q([0.0, 0.0], 1.0)
                    .nodes
                    .iter()
                    .map(|&p| s.jet(p).unwrap().phi)
                    .collect();
                let c = select_center(&center, radius, &pts, &CenterConfig::default()).unwrap();
                assert!(c.min_distance >= 0.1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prediction_matches_pipeline_on_plane() {
        let quad = q([0.2, -0.1], 0.8);
        let avg = averages(&SurfaceSpec::Plane, &quad).unwrap();
        for a in [Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.5, -2.0, -0.3)] {
            let psi = SurfaceSpec::inverted(a, SurfaceSpec::Plane).unwrap();
            let direct = averages(&psi, &quad).unwrap().hbar;
            assert!(
                (direct - predicted_hbar_after_inversion(&a, &avg)).abs() < 1e-8,
                "{a}"
            );
        }
    }

    #[test]
    fn normalizing_a_sphere_cancels_hbar_and_is_idempotent() {
        let s = SurfaceSpec::sphere(2.0).unwrap();
        let quad = q([0.3, 0.0], 0.7);
        let r = normalize(&s, &quad, &CenterConfig::default(), 0.1).unwrap();
        assert_eq!(r.outcome, "inverted");
        assert!(r.achieved_hbar <= 1e-6 * r.curvature_scale, "{r:?}");
        assert!(r.lambda_bar_before.is_finite());
        let theta: MoebiusMap = r.theta.parse().unwrap();
        let psi = SurfaceSpec::transformed(theta, s).unwrap();
        let again = averages(&psi, &quad).unwrap();
        assert!(again.hbar.abs() <= 1e-6 * r.curvature_scale);
    }
}
