//! Finite-difference residuals of the structure equations of a conformal chart.
//!
//! Every residual is sampled on the square grid of half-width `n` nodes
//! around a disk (`h = ρ/n`) and summarised over the interior nodes that lie
//! in the closed disk. Stencils are centered and second order.

use std::io::Write;

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::geom::{curvature_gradient, fundamental_forms};
use crate::quadrature::pairwise_sum;
use crate::zoo::{SurfaceError, SurfaceSpec};

#[derive(Debug, Error)]
pub enum ResidualError {
    #[error("grid too small: half-width {half_width} gives fewer than 5×5 nodes")]
    GridTooSmall { half_width: usize },
    #[error("invalid disk radius {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Square grid `center + h·(i − n, j − n)`, `0 ≤ i, j ≤ 2n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamGrid {
    pub center: [f64; 2],
    pub radius: f64,
    pub n: usize,
}

impl ParamGrid {
    pub fn new(center: [f64; 2], radius: f64, n: usize) -> Result<Self, ResidualError> {
        if n < 2 {
            return Err(ResidualError::GridTooSmall { half_width: n });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(ResidualError::BadRadius(radius));
        }
        Ok(Self { center, radius, n })
    }

    pub fn h(&self) -> f64 {
        self.radius / self.n as f64
    }

    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.side() + i
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.h();
        [
            self.center[0] + h * (i as f64 - self.n as f64),
            self.center[1] + h * (j as f64 - self.n as f64),
        ]
    }

    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.side() {
            for i in 0..self.side() {
                out.push(self.node(i, j));
            }
        }
        out
    }

    /// Interior nodes (full 3×3 stencil available) inside the closed disk.
    pub fn interior(&self) -> Vec<(usize, usize)> {
        let n = self.n as i64;
        let mut out = Vec::new();
        for j in 1..self.side() - 1 {
            for i in 1..self.side() - 1 {
                let (di, dj) = (i as i64 - n, j as i64 - n);
                if di * di + dj * dj <= n * n {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The same disk at half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualField {
    pub center: [f64; 2],
    pub radius: f64,
    pub h: f64,
    pub nodes: Vec<[f64; 2]>,
    /// Residual magnitude per interior node.
    pub values: Vec<f64>,
    /// Signed components per node, when the residual is a small vector.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<Vec<f64>>,
    pub max: f64,
    pub l2_mean: f64,
}

impl ResidualField {
    pub fn new(
        grid: &ParamGrid,
        nodes: Vec<[f64; 2]>,
        values: Vec<f64>,
        components: Vec<Vec<f64>>,
    ) -> Self {
        let max = values.iter().cloned().fold(0.0, f64::max);
        let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
        let l2_mean = if values.is_empty() {
            0.0
        } else {
            (pairwise_sum(&squares) / values.len() as f64).sqrt()
        };
        Self {
            center: grid.center,
            radius: grid.radius,
            h: grid.h(),
            nodes,
            values,
            components,
            max,
            l2_mean,
        }
    }

    /// CSV with columns `x,y,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,value")?;
        for (p, v) in self.nodes.iter().zip(&self.values) {
            writeln!(out, "{},{},{:e}", p[0], p[1], v)?;
        }
        Ok(())
    }
}

/// Maxima below this at every level count as an exact zero: only roundoff is left.
pub const EXACT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub hs: Vec<f64>,
    pub maxima: Vec<f64>,
    /// `log2(max_k / max_{k+1})` for consecutive levels.
    pub orders: Vec<f64>,
    pub exact: bool,
}

impl ConvergenceStudy {
    pub fn from_fields(fields: &[ResidualField]) -> Self {
        let hs: Vec<f64> = fields.iter().map(|f| f.h).collect();
        let maxima: Vec<f64> = fields.iter().map(|f| f.max).collect();
        let orders = maxima
            .windows(2)
            .zip(hs.windows(2))
            .map(|(m, h)| (m[0] / m[1]).ln() / (h[0] / h[1]).ln())
            .collect();
        let exact = maxima.iter().all(|&m| m <= EXACT_FLOOR);
        Self {
            hs,
            maxima,
            orders,
            exact,
        }
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn passes(&self, min_order: f64) -> bool {
        self.exact || self.orders.iter().all(|&o| o >= min_order)
    }
}

/// Runs `residual` on `grid`, `grid.refined()` and its refinement.
pub fn convergence_study<F>(
    grid: &ParamGrid,
    mut residual: F,
) -> Result<ConvergenceStudy, ResidualError>
where
    F: FnMut(&ParamGrid) -> Result<ResidualField, ResidualError>,
{
    let g1 = grid.refined();
    let g2 = g1.refined();
    let fields = [residual(grid)?, residual(&g1)?, residual(&g2)?];
    Ok(ConvergenceStudy::from_fields(&fields))
}

fn sample<T, F>(grid: &ParamGrid, mut f: F) -> Result<Vec<T>, ResidualError>
where
    F: FnMut([f64; 2]) -> Result<T, ResidualError>,
{
    grid.nodes().into_iter().map(&mut f).collect()
}

/// Centered first differences of a scalar grid field.
fn dx(v: &[f64], g: &ParamGrid, i: usize, j: usize) -> f64 {
    (v[g.index(i + 1, j)] - v[g.index(i - 1, j)]) / (2.0 * g.h())
}

fn dy(v: &[f64], g: &ParamGrid, i: usize, j: usize) -> f64 {
    (v[g.index(i, j + 1)] - v[g.index(i, j - 1)]) / (2.0 * g.h())
}

fn laplacian(v: &[f64], g: &ParamGrid, i: usize, j: usize) -> f64 {
    let h2 = g.h() * g.h();
    (v[g.index(i + 1, j)] + v[g.index(i - 1, j)] + v[g.index(i, j + 1)] + v[g.index(i, j - 1)]
        - 4.0 * v[g.index(i, j)])
        / h2
}

/// `R₁ = ((l−n)/2)_x + m_y − e^{2λ}H_x`, `R₂ = −((l−n)/2)_y + m_x − e^{2λ}H_y`
/// with `l, m, n = a11, a12, a22`. An identity for every conformal immersion.
pub fn gauss_codazzi_residual(
    spec: &SurfaceSpec,
    grid: &ParamGrid,
) -> Result<ResidualField, ResidualError> {
    let forms = sample(grid, |p| {
        Ok(fundamental_forms(&spec.jet(p)?).map_err(SurfaceError::from)?)
    })?;
    let half: Vec<f64> = forms.iter().map(|f| 0.5 * (f.a11 - f.a22)).collect();
    let m: Vec<f64> = forms.iter().map(|f| f.a12).collect();
    let h: Vec<f64> = forms.iter().map(|f| f.h).collect();
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut comps = Vec::new();
    for (i, j) in grid.interior() {
        let e2l = forms[grid.index(i, j)].metric;
        let r1 = dx(&half, grid, i, j) + dy(&m, grid, i, j) - e2l * dx(&h, grid, i, j);
        let r2 = -dy(&half, grid, i, j) + dx(&m, grid, i, j) - e2l * dy(&h, grid, i, j);
        nodes.push(grid.node(i, j));
        values.push(r1.hypot(r2));
        comps.push(vec![r1, r2]);
    }
    Ok(ResidualField::new(grid, nodes, values, comps))
}

/// `e^{−2λ} ΔH + |Å|_g² H` with the five-point Laplacian.
pub fn willmore_residual_classical(
    spec: &SurfaceSpec,
    grid: &ParamGrid,
) -> Result<ResidualField, ResidualError> {
    let forms = sample(grid, |p| {
        Ok(fundamental_forms(&spec.jet(p)?).map_err(SurfaceError::from)?)
    })?;
    let h: Vec<f64> = forms.iter().map(|f| f.h).collect();
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut comps = Vec::new();
    for (i, j) in grid.interior() {
        let f = &forms[grid.index(i, j)];
        let r = laplacian(&h, grid, i, j) / f.metric + f.tf_norm_sq() * f.h;
        nodes.push(grid.node(i, j));
        values.push(r.abs());
        comps.push(vec![r]);
    }
    Ok(ResidualField::new(grid, nodes, values, comps))
}

/// `div(∇H⃗ − 3π_n(∇H⃗) + ∇⊥n × H⃗)` with `H⃗ = Hn`, `π_n(v) = ⟨v, n⟩n`
/// and `∇⊥ = (−∂_y, ∂_x)`. The inner fields come from exact third-order jets,
/// the outer divergence from centered differences.
pub fn willmore_residual_divergence(
    spec: &SurfaceSpec,
    grid: &ParamGrid,
) -> Result<ResidualField, ResidualError> {
    let fields = sample(grid, |p| {
        let jet = spec.jet3(p)?;
        let f = fundamental_forms(&jet.jet).map_err(SurfaceError::from)?;
        let g = curvature_gradient(&jet, &f);
        let n = f.normal;
        let hv = n * f.h;
        let dhv = [
            n * g.h[0] + g.normal[0] * f.h,
            n * g.h[1] + g.normal[1] * f.h,
        ];
        let proj = |v: Vector3<f64>| v - n * (3.0 * v.dot(&n));
        let vx = proj(dhv[0]) + (-g.normal[1]).cross(&hv);
        let vy = proj(dhv[1]) + g.normal[0].cross(&hv);
        Ok((vx, vy))
    })?;
    let h = grid.h();
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut comps = Vec::new();
    for (i, j) in grid.interior() {
        let div = (fields[grid.index(i + 1, j)].0 - fields[grid.index(i - 1, j)].0
            + fields[grid.index(i, j + 1)].1
            - fields[grid.index(i, j - 1)].1)
            / (2.0 * h);
        nodes.push(grid.node(i, j));
        values.push(div.norm());
        comps.push(vec![div[0], div[1], div[2]]);
    }
    Ok(ResidualField::new(grid, nodes, values, comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::MoebiusMap;

    fn grid(c: [f64; 2], r: f64, n: usize) -> ParamGrid {
        ParamGrid::new(c, r, n).unwrap()
    }

    #[test]
    fn plane_residuals_vanish_exactly() {
        let g = grid([0.0, 0.0], 1.0, 4);
        for r in [
            gauss_codazzi_residual(&SurfaceSpec::Plane, &g).unwrap(),
            willmore_residual_classical(&SurfaceSpec::Plane, &g).unwrap(),
            willmore_residual_divergence(&SurfaceSpec::Plane, &g).unwrap(),
        ] {
            assert_eq!(r.max, 0.0);
            assert!(!r.values.is_empty());
        }
    }

    #[test]
    fn grid_too_small() {
        assert!(matches!(
            ParamGrid::new([0.0, 0.0], 1.0, 1),
            Err(ResidualError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn interior_stays_in_disk() {
        let g = grid([1.0, -1.0], 0.5, 6);
        for (i, j) in g.interior() {
            let p = g.node(i, j);
            assert!(((p[0] - 1.0).powi(2) + (p[1] + 1.0).powi(2)).sqrt() <= 0.5 + 1e-12);
            assert!(i >= 1 && j >= 1 && i < g.side() - 1 && j < g.side() - 1);
        }
    }

    #[test]
    fn gauss_codazzi_on_sphere_is_second_order() {
        let s = SurfaceSpec::sphere(1.0).unwrap();
        let study = convergence_study(&grid([0.3, 0.1], 0.5, 8), |g| gauss_codazzi_residual(&s, g))
            .unwrap();
        assert!(study.passes(1.9), "{study:?}");
    }

    #[test]
    fn divergence_form_vanishes_on_inverted_catenoid() {
        let s = SurfaceSpec::inverted(Vector3::new(0.5, 0.2, 0.4), SurfaceSpec::Catenoid).unwrap();
        let study = convergence_study(&grid([0.2, 0.3], 0.3, 8), |g| {
            willmore_residual_divergence(&s, g)
        })
        .unwrap();
        assert!(!study.exact);
        assert!(study.passes(0.9), "{study:?}");
    }

    #[test]
    fn perturbed_enneper_is_not_willmore() {
        let base = SurfaceSpec::Enneper;
        let pert = SurfaceSpec::perturbed(0.05, SurfaceSpec::Enneper).unwrap();
        let g = grid([0.2, 0.1], 0.5, 16);
        let a = willmore_residual_classical(&base, &g).unwrap().max;
        let b = willmore_residual_classical(&pert, &g).unwrap().max;
        assert!(b >= 10.0 * a.max(1e-300), "{a} {b}");
        assert!(b > 1e-2);
    }

    #[test]
    fn rigid_motion_leaves_residuals_unchanged() {
        let m = MoebiusMap::rotate_axis_angle(Vector3::new(1.0, 2.0, -0.5), 0.7)
            .after(&MoebiusMap::translate(Vector3::new(0.3, -1.0, 2.0)));
        let s = SurfaceSpec::perturbed(0.05, SurfaceSpec::Enneper).unwrap();
        let t = SurfaceSpec::transformed(m, s.clone()).unwrap();
        let g = grid([0.1, 0.2], 0.4, 8);
        let pairs = [
            (
                gauss_codazzi_residual(&s, &g).unwrap(),
                gauss_codazzi_residual(&t, &g).unwrap(),
            ),
            (
                willmore_residual_classical(&s, &g).unwrap(),
                willmore_residual_classical(&t, &g).unwrap(),
            ),
            (
                willmore_residual_divergence(&s, &g).unwrap(),
                willmore_residual_divergence(&t, &g).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()), "{x} {y}");
            }
        }
    }
}
