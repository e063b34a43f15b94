//! Pointwise differential geometry of a conformal chart.
//!
//! Everything here works in a conformal parametrization `Φ: D ⊂ R² → R³`
//! with conformal factor `e^{2λ} = |∇Φ|²/2`. No Christoffel symbols are
//! needed because the metric is a scalar multiple of the flat one.

use nalgebra::Vector3;
use thiserror::Error;

/// Value and partial derivatives up to order two of an immersion at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub p: [f64; 2],
    pub phi: Vector3<f64>,
    /// `[Φ_x, Φ_y]`
    pub d1: [Vector3<f64>; 2],
    /// `[Φ_xx, Φ_xy, Φ_yy]`
    pub d2: [Vector3<f64>; 3],
}

/// A [`Jet2`] extended with the four third partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub jet: Jet2,
    /// `[Φ_xxx, Φ_xxy, Φ_xyy, Φ_yyy]`
    pub d3: [Vector3<f64>; 4],
}

impl Jet2 {
    pub fn is_finite(&self) -> bool {
        let finite = |v: &Vector3<f64>| v.iter().all(|c| c.is_finite());
        self.p.iter().all(|c| c.is_finite())
            && finite(&self.phi)
            && self.d1.iter().all(finite)
            && self.d2.iter().all(finite)
    }

    pub fn phi_x(&self) -> Vector3<f64> {
        self.d1[0]
    }

    pub fn phi_y(&self) -> Vector3<f64> {
        self.d1[1]
    }
}

impl Jet3 {
    pub fn is_finite(&self) -> bool {
        self.jet.is_finite() && self.d3.iter().all(|v| v.iter().all(|c| c.is_finite()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate jet: |Φ_x × Φ_y| = {cross_norm:e} is below the immersion threshold")]
    DegenerateJet { cross_norm: f64 },
    #[error("conformality defect {defect:e} exceeds tolerance {tol:e}")]
    ConformalityViolation { defect: f64, tol: f64 },
}

/// First and second fundamental form data at one point of a conformal chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    /// `λ = ½ log(|∇Φ|²/2)`.
    pub lambda: f64,
    pub normal: Vector3<f64>,
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub h: f64,
    /// Tracefree part; `tf22 = -tf11`.
    pub tf11: f64,
    pub tf12: f64,
    pub k: f64,
    /// `max(||Φ_x|² − |Φ_y|²|, |⟨Φ_x, Φ_y⟩|) / e^{2λ}`.
    pub conformality_defect: f64,
    /// `e^{2λ}` as computed from the jet, kept to avoid an exp/log round trip.
    pub metric: f64,
}

impl FundamentalForms {
    pub fn tf22(&self) -> f64 {
        -self.tf11
    }

    /// `|A|_g² = e^{−4λ}(a11² + 2a12² + a22²)`.
    pub fn a_norm_sq(&self) -> f64 {
        (self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22)
            / (self.metric * self.metric)
    }

    /// `|Å|_g² = e^{−4λ}·2(tf11² + tf12²)`.
    pub fn tf_norm_sq(&self) -> f64 {
        2.0 * (self.tf11 * self.tf11 + self.tf12 * self.tf12) / (self.metric * self.metric)
    }

    /// Fails with [`GeomError::ConformalityViolation`] when the chart is not conformal to `tol`.
    pub fn check_conformal(&self, tol: f64) -> Result<(), GeomError> {
        if self.conformality_defect > tol {
            Err(GeomError::ConformalityViolation {
                defect: self.conformality_defect,
                tol,
            })
        } else {
            Ok(())
        }
    }
}

/// Relative threshold on `|Φ_x × Φ_y|` below which a jet is rejected.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

pub fn fundamental_forms(jet: &Jet2) -> Result<FundamentalForms, GeomError> {
    let [px, py] = jet.d1;
    let [pxx, pxy, pyy] = jet.d2;
    let cross = px.cross(&py);
    let cross_norm = cross.norm();
    let floor = DEGENERACY_THRESHOLD * (px.norm() * py.norm()).max(1.0);
    if cross_norm.is_nan() || cross_norm < floor {
        return Err(GeomError::DegenerateJet { cross_norm });
    }
    let normal = cross / cross_norm;
    let ex = px.norm_squared();
    let ey = py.norm_squared();
    let metric = 0.5 * (ex + ey);
    let a11 = pxx.dot(&normal);
    let a12 = pxy.dot(&normal);
    let a22 = pyy.dot(&normal);
    let h = (a11 + a22) / (2.0 * metric);
    let k = (a11 * a22 - a12 * a12) / (metric * metric);
    let conformality_defect = (ex - ey).abs().max(px.dot(&py).abs()) / metric;
    Ok(FundamentalForms {
        lambda: 0.5 * metric.ln(),
        normal,
        a11,
        a12,
        a22,
        h,
        tf11: 0.5 * (a11 - a22),
        tf12: a12,
        k,
        conformality_defect,
        metric,
    })
}

/// [`fundamental_forms`] followed by a conformality check.
pub fn fundamental_forms_checked(jet: &Jet2, tol: f64) -> Result<FundamentalForms, GeomError> {
    let f = fundamental_forms(jet)?;
    f.check_conformal(tol)?;
    Ok(f)
}

/// Frobenius norm of `e^{−λ}Å`, the chart density of the conformal invariant
/// `|Å|_g² dvol_g = |Åe^{−λ}|² dxdy`.
pub fn tracefree_density(f: &FundamentalForms) -> f64 {
    (2.0 * (f.tf11 * f.tf11 + f.tf12 * f.tf12) / f.metric).sqrt()
}

/// `|A|_g² − 2|Å|_g² − 2K`, identically zero.
pub fn curvature_identity_residual(f: &FundamentalForms) -> f64 {
    f.a_norm_sq() - 2.0 * f.tf_norm_sq() - 2.0 * f.k
}

/// First derivatives of `λ`, `H` and `n`, obtained exactly from a third-order jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureGradient {
    pub lambda: [f64; 2],
    pub h: [f64; 2],
    pub normal: [Vector3<f64>; 2],
}

pub fn curvature_gradient(jet: &Jet3, f: &FundamentalForms) -> CurvatureGradient {
    let j = &jet.jet;
    let [px, py] = j.d1;
    let [pxx, pxy, pyy] = j.d2;
    let [pxxx, pxxy, pxyy, pyyy] = jet.d3;
    let n = f.normal;
    let cross = px.cross(&py);
    let cross_norm = cross.norm();

    // (Φ_xk, Φ_yk, Φ_xxk, Φ_yyk) for k = x, y
    let parts = [(pxx, pxy, pxxx, pxyy), (pxy, pyy, pxxy, pyyy)];
    let mut lambda = [0.0; 2];
    let mut h = [0.0; 2];
    let mut normal = [Vector3::zeros(); 2];
    for (k, &(pxk, pyk, pxxk, pyyk)) in parts.iter().enumerate() {
        let dmetric = px.dot(&pxk) + py.dot(&pyk);
        let dcross = pxk.cross(&py) + px.cross(&pyk);
        let dn = (dcross - n * n.dot(&dcross)) / cross_norm;
        let da11 = pxxk.dot(&n) + pxx.dot(&dn);
        let da22 = pyyk.dot(&n) + pyy.dot(&dn);
        lambda[k] = dmetric / (2.0 * f.metric);
        h[k] = (da11 + da22) / (2.0 * f.metric) - f.h * dmetric / f.metric;
        normal[k] = dn;
    }
    CurvatureGradient { lambda, h, normal }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn plane_jet(x: f64, y: f64) -> Jet2 {
        Jet2 {
            p: [x, y],
            phi: Vector3::new(x, y, 0.0),
            d1: [Vector3::x(), Vector3::y()],
            d2: [Vector3::zeros(); 3],
        }
    }

    #[test]
    fn plane_is_flat() {
        let f = fundamental_forms(&plane_jet(0.3, -1.2)).unwrap();
        assert_eq!(f.lambda, 0.0);
        assert_eq!(f.h, 0.0);
        assert_eq!(f.k, 0.0);
        assert_eq!(tracefree_density(&f), 0.0);
        assert_eq!(curvature_identity_residual(&f), 0.0);
        assert_eq!(f.normal, Vector3::z());
    }

    #[test]
    fn collinear_tangents_are_rejected() {
        let mut j = plane_jet(0.0, 0.0);
        j.d1[1] = Vector3::new(2.0, 0.0, 0.0);
        assert!(matches!(
            fundamental_forms(&j),
            Err(GeomError::DegenerateJet { .. })
        ));
    }

    #[test]
    fn conformality_violation_is_reported() {
        let mut j = plane_jet(0.0, 0.0);
        j.d1[1] = Vector3::new(0.0, 2.0, 0.0);
        let f = fundamental_forms(&j).unwrap();
        assert_abs_diff_eq!(f.conformality_defect, 3.0 / 2.5, epsilon = 1e-15);
        assert!(matches!(
            fundamental_forms_checked(&j, 1e-10),
            Err(GeomError::ConformalityViolation { .. })
        ));
    }

    #[test]
    fn trace_closure_holds() {
        let j = Jet2 {
            p: [0.0, 0.0],
            phi: Vector3::zeros(),
            d1: [Vector3::new(2.0, 0.0, 0.0), Vector3::new(0.0, 2.0, 0.0)],
            d2: [
                Vector3::new(0.0, 0.0, 1.5),
                Vector3::new(0.1, 0.0, -0.7),
                Vector3::new(0.0, 0.2, 0.25),
            ],
        };
        let f = fundamental_forms(&j).unwrap();
        assert_abs_diff_eq!(f.a11 + f.a22 - 2.0 * f.h * f.metric, 0.0, epsilon = 1e-15);
        assert_eq!(f.tf11 + f.tf22(), 0.0);
        assert_abs_diff_eq!(curvature_identity_residual(&f), 0.0, epsilon = 1e-15);
    }
}
