//! Truncated bivariate Taylor arithmetic up to order three.
//!
//! Closed-form zoo surfaces are written once as expressions in `x` and `y`
//! over [`Taylor3`]; the jets then follow from Leibniz and Faà di Bruno
//! rather than from hand-differentiated formulas.

use std::ops::{Add, Mul, Neg, Sub};

/// Coefficient slots: `[f, f_x, f_y, f_xx, f_xy, f_yy, f_xxx, f_xxy, f_xyy, f_yyy]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Taylor3(pub [f64; 10]);

fn d1(i: usize) -> usize {
    1 + i
}
fn d2(i: usize, j: usize) -> usize {
    3 + i + j
}
fn d3(i: usize, j: usize, k: usize) -> usize {
    6 + i + j + k
}

const PAIRS: [(usize, usize); 3] = [(0, 0), (0, 1), (1, 1)];
const TRIPLES: [(usize, usize, usize); 4] = [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)];

impl Taylor3 {
    pub fn constant(c: f64) -> Self {
        let mut v = [0.0; 10];
        v[0] = c;
        Self(v)
    }

    pub fn var_x(x: f64) -> Self {
        let mut v = [0.0; 10];
        v[0] = x;
        v[1] = 1.0;
        Self(v)
    }

    pub fn var_y(y: f64) -> Self {
        let mut v = [0.0; 10];
        v[0] = y;
        v[2] = 1.0;
        Self(v)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn scale(self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    /// `f ∘ self` given `[f, f', f'', f''']` at `self.value()`.
    pub fn compose(self, f: [f64; 4]) -> Self {
        let g = &self.0;
        let mut out = [0.0; 10];
        out[0] = f[0];
        for i in 0..2 {
            out[d1(i)] = f[1] * g[d1(i)];
        }
        for (i, j) in PAIRS {
            out[d2(i, j)] = f[2] * g[d1(i)] * g[d1(j)] + f[1] * g[d2(i, j)];
        }
        for (i, j, k) in TRIPLES {
            out[d3(i, j, k)] = f[3] * g[d1(i)] * g[d1(j)] * g[d1(k)]
                + f[2] * (g[d2(i, j)] * g[d1(k)] + g[d2(i, k)] * g[d1(j)] + g[d2(j, k)] * g[d1(i)])
                + f[1] * g[d3(i, j, k)];
        }
        Self(out)
    }

    pub fn recip(self) -> Self {
        let v = self.value();
        let r = 1.0 / v;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn cosh(self) -> Self {
        let v = self.value();
        let (s, c) = (v.sinh(), v.cosh());
        self.compose([c, s, c, s])
    }
}

impl Add for Taylor3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut v = self.0;
        for (a, b) in v.iter_mut().zip(rhs.0) {
            *a += b;
        }
        Self(v)
    }
}

impl Sub for Taylor3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Taylor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Add<f64> for Taylor3 {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.0[0] += rhs;
        self
    }
}

impl Mul<f64> for Taylor3 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul for Taylor3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [0.0; 10];
        out[0] = a[0] * b[0];
        for i in 0..2 {
            out[d1(i)] = a[d1(i)] * b[0] + a[0] * b[d1(i)];
        }
        for (i, j) in PAIRS {
            out[d2(i, j)] =
                a[d2(i, j)] * b[0] + a[d1(i)] * b[d1(j)] + a[d1(j)] * b[d1(i)] + a[0] * b[d2(i, j)];
        }
        for (i, j, k) in TRIPLES {
            out[d3(i, j, k)] = a[d3(i, j, k)] * b[0]
                + a[d2(i, j)] * b[d1(k)]
                + a[d2(i, k)] * b[d1(j)]
                + a[d2(j, k)] * b[d1(i)]
                + a[d1(i)] * b[d2(j, k)]
                + a[d1(j)] * b[d2(i, k)]
                + a[d1(k)] * b[d2(i, j)]
                + a[0] * b[d3(i, j, k)];
        }
        Self(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let (x, y) = (Taylor3::var_x(1.5), Taylor3::var_y(-0.5));
        // f = x³y + y² ⇒ f_x = 3x²y, f_xx = 6xy, f_xxy = 6x, f_yy = 2
        let f = x * x * x * y + y * y;
        let c = f.0;
        assert_eq!(c[0], 1.5f64.powi(3) * -0.5 + 0.25);
        assert_eq!(c[1], 3.0 * 2.25 * -0.5);
        assert_eq!(c[3], 6.0 * 1.5 * -0.5);
        assert_eq!(c[5], 2.0);
        assert_eq!(c[6], 6.0 * -0.5);
        assert_eq!(c[7], 9.0);
        assert_eq!(c[8], 0.0);
        assert_eq!(c[9], 0.0);
    }

    #[test]
    fn recip_matches_finite_differences() {
        let f = |x: f64, y: f64| 1.0 / (1.0 + x * x + y * y);
        let t = (Taylor3::var_x(0.3) * Taylor3::var_x(0.3)
            + Taylor3::var_y(0.7) * Taylor3::var_y(0.7)
            + 1.0)
            .recip();
        let h = 1e-3;
        let fxxy = (f(0.3 + h, 0.7 + h) - 2.0 * f(0.3, 0.7 + h) + f(0.3 - h, 0.7 + h)
            - f(0.3 + h, 0.7 - h)
            + 2.0 * f(0.3, 0.7 - h)
            - f(0.3 - h, 0.7 - h))
            / (2.0 * h * h * h);
        assert!((t.0[7] - fxxy).abs() < 1e-5);
    }
}
