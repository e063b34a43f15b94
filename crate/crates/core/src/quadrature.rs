//! Polar tensor quadrature on disks and deterministic summation.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("bad resolution: need n_r >= 4 and n_theta >= 8 with radius > 0 (got n_r={n_r}, n_theta={n_theta}, radius={radius})")]
    BadResolution {
        n_r: usize,
        n_theta: usize,
        radius: f64,
    },
}

/// Pairwise (cascade) summation; the result depends only on the slice order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton on the three-term recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor rule on a disk: Gauss–Legendre in `r` (with the Jacobian `r`) on
/// one or more radial panels, trapezoid in `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature {
    pub center: [f64; 2],
    pub radius: f64,
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub n_r: usize,
    pub n_theta: usize,
    /// Radial panel edges, `[0, …, radius]`.
    pub panels: Vec<f64>,
}

pub fn disk_quadrature(
    center: [f64; 2],
    radius: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<DiskQuadrature, QuadratureError> {
    DiskQuadrature::with_panels(center, &[0.0, radius], n_r, n_theta)
}

impl DiskQuadrature {
    pub fn new(
        center: [f64; 2],
        radius: f64,
        n_r: usize,
        n_theta: usize,
    ) -> Result<Self, QuadratureError> {
        disk_quadrature(center, radius, n_r, n_theta)
    }

    /// Geometrically graded radial panels: the innermost panel ends at
    /// `radius · ratio^(−(n_panels−1))`. Used for charts of closed surfaces
    /// whose integrands decay like `r⁻⁴`.
    pub fn graded(
        center: [f64; 2],
        radius: f64,
        n_panels: usize,
        ratio: f64,
        n_r: usize,
        n_theta: usize,
    ) -> Result<Self, QuadratureError> {
        let mut edges = vec![0.0];
        for k in (0..n_panels).rev() {
            edges.push(radius * ratio.powi(-(k as i32)));
        }
        Self::with_panels(center, &edges, n_r, n_theta)
    }

    /// Annulus `r_in ≤ r ≤ r_out` (same tensor rule, single panel).
    pub fn annulus(
        center: [f64; 2],
        r_in: f64,
        r_out: f64,
        n_r: usize,
        n_theta: usize,
    ) -> Result<Self, QuadratureError> {
        Self::with_panels(center, &[r_in, r_out], n_r, n_theta)
    }

    pub fn with_panels(
        center: [f64; 2],
        edges: &[f64],
        n_r: usize,
        n_theta: usize,
    ) -> Result<Self, QuadratureError> {
        let radius = *edges.last().unwrap_or(&0.0);
        if n_r < 4 || n_theta < 8 || radius <= 0.0 || !radius.is_finite() {
            return Err(QuadratureError::BadResolution {
                n_r,
                n_theta,
                radius,
            });
        }
        let (gx, gw) = gauss_legendre(n_r);
        let dtheta = 2.0 * PI / n_theta as f64;
        let mut nodes = Vec::with_capacity((edges.len() - 1) * n_r * n_theta);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for win in edges.windows(2) {
            let (a, b) = (win[0], win[1]);
            let half = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                let r = a + half * (1.0 + x);
                let wr = w * half * r * dtheta;
                for j in 0..n_theta {
                    let t = dtheta * j as f64;
                    nodes.push([center[0] + r * t.cos(), center[1] + r * t.sin()]);
                    weights.push(wr);
                }
            }
        }
        Ok(Self {
            center,
            radius,
            nodes,
            weights,
            n_r,
            n_theta,
            panels: edges.to_vec(),
        })
    }

    pub fn area(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn integrate<F: FnMut([f64; 2]) -> f64>(&self, mut f: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .collect();
        pairwise_sum(&terms)
    }

    /// Weighted sum of precomputed node values.
    pub fn sum_values(&self, values: &[f64]) -> f64 {
        let terms: Vec<f64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .collect();
        pairwise_sum(&terms)
    }

    /// The same rule on the concentric disk of radius `radius · factor`.
    pub fn scaled(&self, factor: f64, n_r: usize, n_theta: usize) -> Result<Self, QuadratureError> {
        let edges: Vec<f64> = self.panels.iter().map(|e| e * factor).collect();
        Self::with_panels(self.center, &edges, n_r, n_theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [4, 7, 12, 20] {
            let (x, w) = gauss_legendre(n);
            let ws: f64 = w.iter().sum();
            assert!((ws - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let q: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = 2.0 / deg as f64;
            assert!((q - exact).abs() < 1e-13, "n={n} q={q} exact={exact}");
        }
    }

    #[test]
    fn unit_disk_moments() {
        let q = disk_quadrature([0.0, 0.0], 1.0, 8, 16).unwrap();
        assert!((q.integrate(|_| 1.0) - PI).abs() <= 1e-12);
        assert!(q.integrate(|p| p[0]).abs() <= 1e-14);
        assert!((q.integrate(|p| p[0] * p[0] + p[1] * p[1]) - PI / 2.0).abs() <= 1e-12);
        assert!(q.nodes.iter().all(|p| p[0].hypot(p[1]) <= 1.0));
        assert!(q.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn weight_sum_is_disk_area() {
        let q = disk_quadrature([3.0, -1.0], 0.37, 6, 12).unwrap();
        let exact = PI * 0.37 * 0.37;
        assert!((q.area() - exact).abs() <= 1e-12 * exact);
        let g = DiskQuadrature::graded([0.0, 0.0], 1e3, 30, 1.6, 8, 16).unwrap();
        assert!((g.area() - PI * 1e6).abs() <= 1e-12 * PI * 1e6);
    }

    #[test]
    fn rejects_coarse_rules() {
        assert!(disk_quadrature([0.0, 0.0], 1.0, 3, 16).is_err());
        assert!(disk_quadrature([0.0, 0.0], 1.0, 4, 7).is_err());
        assert!(disk_quadrature([0.0, 0.0], 0.0, 4, 8).is_err());
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 4950.0);
    }
}
