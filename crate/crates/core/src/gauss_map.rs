//! The conformal Gauss map `Y = H ℓ(Φ) + (n, ⟨n,Φ⟩, ⟨n,Φ⟩)` into de Sitter space.
//!
//! `Y` is unit spacelike, its derivative is
//! `∇Y = ∇H ℓ(Φ) − e^{−2λ} Å·(lifted ∇Φ)`, and it is conformal with summed
//! factor `⟨Y_x,Y_x⟩ + ⟨Y_y,Y_y⟩ = |e^{−λ}Å|²`. It is harmonic exactly when
//! `Φ` is Willmore, which the grid residuals below measure.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Matrix5, Vector3};
use serde::Serialize;

use crate::geom::{
    curvature_gradient, fundamental_forms, tracefree_density, FundamentalForms, Jet2,
};
use crate::lorentz::{inner, null_lift, square, tangent_lift, Vector5};
use crate::residuals::{ParamGrid, ResidualError, ResidualField};
use crate::zoo::{SurfaceError, SurfaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CgmJet {
    #[serde(serialize_with = "ser_v5")]
    pub y: Vector5,
    #[serde(serialize_with = "ser_v5")]
    pub yx: Vector5,
    #[serde(serialize_with = "ser_v5")]
    pub yy: Vector5,
    /// `⟨Y_x,Y_x⟩ + ⟨Y_y,Y_y⟩`.
    pub lorentz_energy_density: f64,
}

fn ser_v5<S: serde::Serializer>(v: &Vector5, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    [v[0], v[1], v[2], v[3], v[4]].serialize(s)
}

impl CgmJet {
    fn new(y: Vector5, yx: Vector5, yy: Vector5) -> Self {
        Self {
            y,
            yx,
            yy,
            lorentz_energy_density: square(&yx) + square(&yy),
        }
    }
}

/// `Y` alone.
pub fn gauss_map_value(jet: &Jet2, f: &FundamentalForms) -> Vector5 {
    null_lift(&jet.phi) * f.h + tangent_lift(&f.normal, &jet.phi)
}

/// `Y` and its first derivatives from the jet, the forms and `∇H`.
pub fn conformal_gauss(jet: &Jet2, f: &FundamentalForms, grad_h: [f64; 2]) -> CgmJet {
    let ell = null_lift(&jet.phi);
    let lx = tangent_lift(&jet.d1[0], &jet.phi);
    let ly = tangent_lift(&jet.d1[1], &jet.phi);
    let s = 1.0 / f.metric;
    let yx = ell * grad_h[0] - (lx * f.tf11 + ly * f.tf12) * s;
    let yy = ell * grad_h[1] - (lx * f.tf12 + ly * f.tf22()) * s;
    CgmJet::new(gauss_map_value(jet, f), yx, yy)
}

/// Forms and Gauss map jet at `p`, with `∇H` taken exactly from the third-order jet.
pub fn gauss_map_at(
    spec: &SurfaceSpec,
    p: [f64; 2],
) -> Result<(FundamentalForms, CgmJet), SurfaceError> {
    let j3 = spec.jet3(p)?;
    let f = fundamental_forms(&j3.jet)?;
    let g = curvature_gradient(&j3, &f);
    Ok((f, conformal_gauss(&j3.jet, &f, g.h)))
}

/// `Y` at `p` without derivatives.
pub fn y_at(spec: &SurfaceSpec, p: [f64; 2]) -> Result<Vector5, SurfaceError> {
    let j = spec.jet(p)?;
    let f = fundamental_forms(&j)?;
    Ok(gauss_map_value(&j, &f))
}

/// `∇Y` by fourth-order centered differences of `Y` values; a cross-check
/// of [`conformal_gauss`] independent of its derivative formula.
pub fn conformal_gauss_direct(
    spec: &SurfaceSpec,
    p: [f64; 2],
    h: f64,
) -> Result<CgmJet, SurfaceError> {
    let at = |dx: f64, dy: f64| y_at(spec, [p[0] + dx, p[1] + dy]);
    let d = |e: [f64; 2]| -> Result<Vector5, SurfaceError> {
        let p1 = at(e[0] * h, e[1] * h)?;
        let m1 = at(-e[0] * h, -e[1] * h)?;
        let p2 = at(2.0 * e[0] * h, 2.0 * e[1] * h)?;
        let m2 = at(-2.0 * e[0] * h, -2.0 * e[1] * h)?;
        Ok((m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h))
    };
    Ok(CgmJet::new(at(0.0, 0.0)?, d([1.0, 0.0])?, d([0.0, 1.0])?))
}

/// `H = Y₅ − Y₄`.
pub fn recover_h(y: &Vector5) -> f64 {
    y[4] - y[3]
}

/// `(|⟨Y_x,Y_y⟩|, |⟨Y_x,Y_x⟩ − ⟨Y_y,Y_y⟩|, |⟨Y_x,Y_x⟩ + ⟨Y_y,Y_y⟩ − density²|)`.
pub fn conformality_report(c: &CgmJet, density: f64) -> [f64; 3] {
    let xx = square(&c.yx);
    let yy = square(&c.yy);
    [
        inner(&c.yx, &c.yy).abs(),
        (xx - yy).abs(),
        (xx + yy - density * density).abs(),
    ]
}

/// The report at `p` of `spec`, together with `|⟨Y,Y⟩ − 1|`.
pub fn identity_defects(spec: &SurfaceSpec, p: [f64; 2]) -> Result<([f64; 3], f64), SurfaceError> {
    let (f, c) = gauss_map_at(spec, p)?;
    Ok((
        conformality_report(&c, tracefree_density(&f)),
        (square(&c.y) - 1.0).abs(),
    ))
}

/// `Y` sampled on a [`ParamGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct YGrid {
    pub grid: ParamGrid,
    pub values: Vec<Vector5>,
}

impl YGrid {
    pub fn from_spec(spec: &SurfaceSpec, grid: ParamGrid) -> Result<Self, SurfaceError> {
        let values = grid
            .nodes()
            .into_iter()
            .map(|p| y_at(spec, p))
            .collect::<Result<_, _>>()?;
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: FnMut([f64; 2]) -> Vector5>(grid: ParamGrid, f: F) -> Self {
        Self {
            grid,
            values: grid.nodes().into_iter().map(f).collect(),
        }
    }

    /// `(sqrt(1+s²)·w/|w|, s)` for smooth `w: R² → R⁴` and `s: R² → R`: unit
    /// spacelike and, in general, far from harmonic.
    pub fn negative_control(grid: ParamGrid) -> Self {
        Self::from_fn(grid, |p| {
            let (x, y) = (p[0], p[1]);
            let w = [
                1.0 + 0.5 * x,
                0.3 * y * y,
                (x * y).sin(),
                0.7 + 0.2 * (2.0 * y).cos(),
            ];
            let s = 0.4 * x * x - 0.3 * y;
            let norm = w.iter().map(|c| c * c).sum::<f64>().sqrt();
            let k = (1.0 + s * s).sqrt() / norm;
            Vector5::new(k * w[0], k * w[1], k * w[2], k * w[3], s)
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,Y1,Y2,Y3,Y4,Y5")?;
        for (p, y) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p[0], p[1], y[0], y[1], y[2], y[3], y[4]
            )?;
        }
        Ok(())
    }

    /// Reads a dump written by [`YGrid::write_csv`]; rows must be in grid order.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, YGridError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut pts = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.deserialize::<(f64, f64, f64, f64, f64, f64, f64)>() {
            let (x, y, a, b, c, d, e) = rec?;
            pts.push([x, y]);
            values.push(Vector5::new(a, b, c, d, e));
        }
        let side = (pts.len() as f64).sqrt().round() as usize;
        if side * side != pts.len() || side < 5 || side.is_multiple_of(2) {
            return Err(YGridError::Shape(pts.len()));
        }
        let n = (side - 1) / 2;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        let center = [0.5 * (first[0] + last[0]), 0.5 * (first[1] + last[1])];
        let radius = 0.5 * (last[0] - first[0]);
        let grid = ParamGrid::new(center, radius, n).map_err(|_| YGridError::Shape(pts.len()))?;
        for (k, p) in pts.iter().enumerate() {
            let q = grid.node(k % side, k / side);
            let tol = 1e-9 * (1.0 + radius);
            if (p[0] - q[0]).abs() > tol || (p[1] - q[1]).abs() > tol {
                return Err(YGridError::NotGrid { row: k + 1 });
            }
        }
        Ok(Self { grid, values })
    }

    pub fn read_csv_path(path: &Path) -> Result<Self, YGridError> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    fn at(&self, i: usize, j: usize) -> &Vector5 {
        &self.values[self.grid.index(i, j)]
    }
}

#[derive(Debug, thiserror::Error)]
pub enum YGridError {
    #[error("Y grid needs (2n+1)² rows with n ≥ 2, got {0}")]
    Shape(usize),
    #[error("row {row} is not on the uniform grid")]
    NotGrid { row: usize },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// `ΔY + ⟨∇Y,∇Y⟩ Y` at interior nodes (five-point Laplacian, centered gradient).
pub fn harmonicity_residual(y: &YGrid) -> Result<ResidualField, ResidualError> {
    let g = &y.grid;
    if g.n < 2 {
        return Err(ResidualError::GridTooSmall { half_width: g.n });
    }
    let h = g.h();
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, j) in g.interior() {
        let c = y.at(i, j);
        let (e, w, n, s) = (
            y.at(i + 1, j),
            y.at(i - 1, j),
            y.at(i, j + 1),
            y.at(i, j - 1),
        );
        let lap = (e + w + n + s - c * 4.0) / (h * h);
        let yx = (e - w) / (2.0 * h);
        let yy = (n - s) / (2.0 * h);
        let r = lap + c * (square(&yx) + square(&yy));
        nodes.push(g.node(i, j));
        values.push(r.norm());
    }
    Ok(ResidualField::new(g, nodes, values, Vec::new()))
}

/// Frobenius norm of `div(∇Y Yᵀ − Y ∇Yᵀ)`, discretised with compact face fluxes
/// `(Y_{k+1}Y_kᵀ − Y_kY_{k+1}ᵀ)/h`.
pub fn conservation_residual(y: &YGrid) -> Result<ResidualField, ResidualError> {
    let g = &y.grid;
    if g.n < 2 {
        return Err(ResidualError::GridTooSmall { half_width: g.n });
    }
    let h = g.h();
    let flux =
        |a: &Vector5, b: &Vector5| -> Matrix5<f64> { (b * a.transpose() - a * b.transpose()) / h };
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, j) in g.interior() {
        let c = y.at(i, j);
        let div = (flux(c, y.at(i + 1, j)) - flux(y.at(i - 1, j), c) + flux(c, y.at(i, j + 1))
            - flux(y.at(i, j - 1), c))
            / h;
        nodes.push(g.node(i, j));
        values.push(div.norm());
    }
    Ok(ResidualField::new(g, nodes, values, Vec::new()))
}

/// Center and radius of the sphere represented by a spacelike `Y` with `Y₅ ≠ Y₄`.
pub fn sphere_of(y: &Vector5) -> Option<(Vector3<f64>, f64)> {
    let d = y[4] - y[3];
    if d.abs() <= 1e-14 {
        return None;
    }
    Some((
        Vector3::new(y[0], y[1], y[2]) / d,
        square(y).max(0.0).sqrt() / d.abs(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_gauss_map_is_constant() {
        let (_, c) = gauss_map_at(&SurfaceSpec::Plane, [0.4, -2.0]).unwrap();
        assert_eq!(c.y, Vector5::new(0.0, 0.0, 1.0, 0.0, 0.0));
        assert_eq!(c.yx, Vector5::zeros());
        assert_eq!(c.yy, Vector5::zeros());
        assert_eq!(conformality_report(&c, 0.0), [0.0; 3]);
    }

    #[test]
    fn round_sphere_gauss_map_is_a_point() {
        let s = SurfaceSpec::sphere(2.0).unwrap();
        let (f0, c0) = gauss_map_at(&s, [0.0, 0.0]).unwrap();
        let (_, c1) = gauss_map_at(&s, [1.3, -0.4]).unwrap();
        assert!((c0.y - c1.y).norm() < 1e-13);
        assert!(c1.yx.norm() < 1e-13 && c1.yy.norm() < 1e-13);
        assert!((recover_h(&c0.y).abs() - 0.5).abs() < 1e-14);
        assert!((recover_h(&c0.y) - f0.h).abs() < 1e-14);
        let (c, r) = sphere_of(&c0.y).unwrap();
        assert!(c.norm() < 1e-14 && (r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn enneper_derivative_matches_direct_differences() {
        let (_, a) = gauss_map_at(&SurfaceSpec::Enneper, [1.0, 0.0]).unwrap();
        let b = conformal_gauss_direct(&SurfaceSpec::Enneper, [1.0, 0.0], 1e-3).unwrap();
        assert!((square(&a.yx) - square(&b.yx)).abs() < 1e-7);
        assert!((a.yx - b.yx).norm() < 1e-7 && (a.yy - b.yy).norm() < 1e-7);
    }

    #[test]
    fn identities_on_non_willmore_graph() {
        // conformality of Y is pointwise geometry, but only in a conformal chart
        let s = SurfaceSpec::inverted(Vector3::new(0.0, 0.5, 2.0), SurfaceSpec::Catenoid).unwrap();
        let (rep, unit) = identity_defects(&s, [0.3, 0.8]).unwrap();
        assert!(rep.iter().all(|&d| d < 1e-8), "{rep:?}");
        assert!(unit < 1e-10);
    }

    #[test]
    fn csv_round_trip() {
        let g = ParamGrid::new([3.0, 0.0], 0.5, 2).unwrap();
        let y = YGrid::from_spec(&SurfaceSpec::Enneper, g).unwrap();
        let mut buf = Vec::new();
        y.write_csv(&mut buf).unwrap();
        let back = YGrid::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.grid.n, 2);
        assert!((back.grid.radius - 0.5).abs() < 1e-12);
        assert_eq!(back.values, y.values);
    }

    #[test]
    fn constant_y_has_zero_residuals() {
        let g = ParamGrid::new([0.0, 0.0], 1.0, 3).unwrap();
        let y = YGrid::from_spec(&SurfaceSpec::Plane, g).unwrap();
        assert_eq!(harmonicity_residual(&y).unwrap().max, 0.0);
        assert_eq!(conservation_residual(&y).unwrap().max, 0.0);
    }

    #[test]
    fn negative_control_is_unit_and_not_harmonic() {
        let g = ParamGrid::new([0.0, 0.0], 0.5, 8).unwrap();
        let y = YGrid::negative_control(g);
        assert!(y.values.iter().all(|v| (square(v) - 1.0).abs() < 1e-12));
        let r1 = harmonicity_residual(&y).unwrap().max;
        let r2 = harmonicity_residual(&YGrid::negative_control(g.refined()))
            .unwrap()
            .max;
        assert!(r1 > 0.1 && r2 > 0.1, "{r1} {r2}");
    }
}
