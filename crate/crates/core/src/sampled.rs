//! Immersions known only through samples on a uniform parameter grid.
//!
//! Jets at an arbitrary parameter point come from differentiating the local
//! 5×5 tensor Lagrange interpolant centered on the nearest admissible node.
//! At a node this is the five-point centered difference stencil, i.e. the
//! Richardson combination of the `h` and `2h` three-point stencils.

use std::io::Read;
use std::path::Path;

use nalgebra::Vector3;
use thiserror::Error;

use crate::geom::{Jet2, Jet3};

#[derive(Debug, Error)]
pub enum SampledError {
    #[error("grid needs at least 5×5 samples (got {nx}×{ny})")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("samples do not form a complete uniform grid: {0}")]
    NotUniform(String),
    #[error("point ({x}, {y}) lies outside the sampled parameter domain")]
    OutOfDomain { x: f64, y: f64 },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSurface {
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    /// Row-major in `y`: index `j * nx + i`.
    pub values: Vec<Vector3<f64>>,
    /// Where the samples were loaded from, if anywhere.
    pub source: Option<String>,
}

const STENCIL: usize = 5;

impl SampledSurface {
    pub fn from_fn<F>(
        origin: [f64; 2],
        spacing: [f64; 2],
        nx: usize,
        ny: usize,
        mut f: F,
    ) -> Result<Self, SampledError>
    where
        F: FnMut([f64; 2]) -> Vector3<f64>,
    {
        if nx < STENCIL || ny < STENCIL {
            return Err(SampledError::GridTooSmall { nx, ny });
        }
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f([
                    origin[0] + spacing[0] * i as f64,
                    origin[1] + spacing[1] * j as f64,
                ]));
            }
        }
        Ok(Self {
            origin,
            spacing,
            nx,
            ny,
            values,
            source: None,
        })
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + self.spacing[0] * i as f64,
            self.origin[1] + self.spacing[1] * j as f64,
        ]
    }

    pub fn value(&self, i: usize, j: usize) -> Vector3<f64> {
        self.values[j * self.nx + i]
    }

    /// Reads `x,y,phi1,phi2,phi3` rows (header required, any row order).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, SampledError> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows: Vec<[f64; 5]> = Vec::new();
        for rec in rdr.deserialize::<(f64, f64, f64, f64, f64)>() {
            let (x, y, a, b, c) = rec?;
            rows.push([x, y, a, b, c]);
        }
        let axis = |k: usize| -> Result<(f64, f64, usize), SampledError> {
            let mut v: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
            if v.len() < 2 {
                return Err(SampledError::GridTooSmall {
                    nx: v.len(),
                    ny: v.len(),
                });
            }
            let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
            for w in v.windows(2) {
                if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
                    return Err(SampledError::NotUniform(format!(
                        "axis {k} spacing varies ({} vs {h})",
                        w[1] - w[0]
                    )));
                }
            }
            Ok((v[0], h, v.len()))
        };
        let (x0, hx, nx) = axis(0)?;
        let (y0, hy, ny) = axis(1)?;
        if nx < STENCIL || ny < STENCIL {
            return Err(SampledError::GridTooSmall { nx, ny });
        }
        if rows.len() != nx * ny {
            return Err(SampledError::NotUniform(format!(
                "{} samples for a {nx}×{ny} grid",
                rows.len()
            )));
        }
        let mut values = vec![Vector3::new(f64::NAN, f64::NAN, f64::NAN); nx * ny];
        for r in &rows {
            let i = ((r[0] - x0) / hx).round() as usize;
            let j = ((r[1] - y0) / hy).round() as usize;
            values[j * nx + i] = Vector3::new(r[2], r[3], r[4]);
        }
        if values.iter().any(|v| v[0].is_nan()) {
            return Err(SampledError::NotUniform(
                "duplicate or missing nodes".into(),
            ));
        }
        Ok(Self {
            origin: [x0, y0],
            spacing: [hx, hy],
            nx,
            ny,
            values,
            source: None,
        })
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, SampledError> {
        let file = std::fs::File::open(path)?;
        let mut s = Self::from_csv_reader(file)?;
        s.source = Some(path.display().to_string());
        Ok(s)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), SampledError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "phi1", "phi2", "phi3"])?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let p = self.node(i, j);
                let v = self.value(i, j);
                w.write_record([p[0], p[1], v[0], v[1], v[2]].iter().map(|c| c.to_string()))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    fn locate(&self, x: f64, axis: usize) -> Option<(usize, f64)> {
        let (o, h, n) = (
            self.origin[axis],
            self.spacing[axis],
            [self.nx, self.ny][axis],
        );
        let s = (x - o) / h;
        let last = (n - 1) as f64;
        if !(s >= -1e-9 && s <= last + 1e-9) {
            return None;
        }
        let nearest = s.round().clamp(0.0, last) as usize;
        let start = nearest.saturating_sub(2).min(n - STENCIL);
        Some((start, s - (start + 2) as f64))
    }

    pub fn jet3(&self, p: [f64; 2]) -> Result<Jet3, SampledError> {
        let out = || SampledError::OutOfDomain { x: p[0], y: p[1] };
        let (i0, tx) = self.locate(p[0], 0).ok_or_else(out)?;
        let (j0, ty) = self.locate(p[1], 1).ok_or_else(out)?;
        let bx = lagrange_derivatives(tx);
        let by = lagrange_derivatives(ty);
        let [hx, hy] = self.spacing;
        // (order in x, order in y) for each jet slot
        let slots: [(usize, usize); 10] = [
            (0, 0),
            (1, 0),
            (0, 1),
            (2, 0),
            (1, 1),
            (0, 2),
            (3, 0),
            (2, 1),
            (1, 2),
            (0, 3),
        ];
        let mut d = [Vector3::zeros(); 10];
        for (slot, &(a, b)) in slots.iter().enumerate() {
            let mut acc = Vector3::zeros();
            for (n, wy) in by[b].iter().enumerate() {
                let mut row = Vector3::zeros();
                for (m, wx) in bx[a].iter().enumerate() {
                    row += self.value(i0 + m, j0 + n) * *wx;
                }
                acc += row * *wy;
            }
            d[slot] = acc / (hx.powi(a as i32) * hy.powi(b as i32));
        }
        Ok(Jet3 {
            jet: Jet2 {
                p,
                phi: d[0],
                d1: [d[1], d[2]],
                d2: [d[3], d[4], d[5]],
            },
            d3: [d[6], d[7], d[8], d[9]],
        })
    }
}

/// `out[k][m]` is the k-th derivative of the Lagrange basis polynomial for
/// node `m − 2` (nodes −2..=2), evaluated at `t`.
fn lagrange_derivatives(t: f64) -> [[f64; STENCIL]; 4] {
    let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut out = [[0.0; STENCIL]; 4];
    for m in 0..STENCIL {
        // coefficients of Π_{q≠m} (t − τ_q) / (τ_m − τ_q), lowest degree first
        let mut coeffs = vec![1.0];
        let mut denom = 1.0;
        for q in 0..STENCIL {
            if q == m {
                continue;
            }
            let mut next = vec![0.0; coeffs.len() + 1];
            for (deg, c) in coeffs.iter().enumerate() {
                next[deg + 1] += c;
                next[deg] -= c * nodes[q];
            }
            coeffs = next;
            denom *= nodes[m] - nodes[q];
        }
        for c in &mut coeffs {
            *c /= denom;
        }
        for (k, slot) in out.iter_mut().enumerate() {
            let mut v = 0.0;
            for (deg, c) in coeffs.iter().enumerate().skip(k) {
                let falling: f64 = (0..k).map(|r| (deg - r) as f64).product();
                v += c * falling * t.powi((deg - k) as i32);
            }
            slot[m] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_data_is_differentiated_exactly() {
        let f = |p: [f64; 2]| {
            let (x, y) = (p[0], p[1]);
            Vector3::new(x * x * y, x.powi(3) - y, x * y * y * y)
        };
        let s = SampledSurface::from_fn([-1.0, -1.0], [0.25, 0.2], 9, 11, f).unwrap();
        let j = s.jet3([0.13, 0.41]).unwrap();
        let (x, y) = (0.13, 0.41);
        assert!((j.jet.phi - f([x, y])).norm() < 1e-12);
        assert!((j.jet.d1[0] - Vector3::new(2.0 * x * y, 3.0 * x * x, y.powi(3))).norm() < 1e-12);
        assert!((j.jet.d2[1] - Vector3::new(2.0 * x, 0.0, 3.0 * y * y)).norm() < 1e-11);
        assert!((j.d3[0] - Vector3::new(0.0, 6.0, 0.0)).norm() < 1e-10);
        assert!((j.d3[3] - Vector3::new(0.0, 0.0, 6.0 * x)).norm() < 1e-10);
    }

    #[test]
    fn csv_round_trip_and_domain() {
        let s = SampledSurface::from_fn([0.0, 0.0], [0.5, 0.5], 6, 5, |p| {
            Vector3::new(p[0], p[1], p[0] * p[1])
        })
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = SampledSurface::from_csv_reader(buf.as_slice()).unwrap();
        assert_eq!(back.nx, 6);
        assert_eq!(back.ny, 5);
        assert_eq!(back.values, s.values);
        assert!(matches!(
            back.jet3([3.0, 0.0]),
            Err(SampledError::OutOfDomain { .. })
        ));
        assert!(
            SampledSurface::from_fn([0.0, 0.0], [1.0, 1.0], 4, 9, |_| Vector3::zeros()).is_err()
        );
    }
}
