//! The Minkowski space R^{4,1} with signature (+,+,+,+,−).
//!
//! Coordinates are ordered `(Y₁, Y₂, Y₃, Y₄, Y₅)`; the fifth is timelike.

use nalgebra::{Matrix5, SVector, Vector3};

pub type Vector5 = SVector<f64, 5>;

/// `ε = diag(1, 1, 1, 1, −1)`.
pub fn signature() -> Matrix5<f64> {
    Matrix5::from_diagonal(&Vector5::new(1.0, 1.0, 1.0, 1.0, -1.0))
}

pub fn inner(a: &Vector5, b: &Vector5) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] - a[4] * b[4]
}

pub fn square(a: &Vector5) -> f64 {
    inner(a, a)
}

/// Null lift `x ↦ (x, (|x|²−1)/2, (|x|²+1)/2)`.
pub fn null_lift(x: &Vector3<f64>) -> Vector5 {
    let r2 = x.norm_squared();
    Vector5::new(x[0], x[1], x[2], 0.5 * (r2 - 1.0), 0.5 * (r2 + 1.0))
}

/// Tangent lift `v ↦ (v, ⟨v, Φ⟩, ⟨v, Φ⟩)` at base point `phi`.
pub fn tangent_lift(v: &Vector3<f64>, phi: &Vector3<f64>) -> Vector5 {
    let d = v.dot(phi);
    Vector5::new(v[0], v[1], v[2], d, d)
}

pub fn y123(y: &Vector5) -> Vector3<f64> {
    Vector3::new(y[0], y[1], y[2])
}
