//! The conformal group of R³ acting on points, on jets of immersions, and
//! (through the null cone) on R^{4,1}.
//!
//! A [`MoebiusMap`] is an ordered list of primitive stages applied left to
//! right, which is also the order of its text form
//! `translate (1,0,0) | dilate 2 | invert (0,0,3)`.
//! The composition `m1 ∘ m2` applies `m2` first.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix5, Rotation3, Unit, Vector3};
use thiserror::Error;

use crate::geom::{Jet2, Jet3};
use crate::lorentz::{self, Vector5};

/// Inversion stages reject points closer than this (times `max(1, |a|)`) to the center.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("dilation factor must be positive and finite, got {0}")]
    InvalidDilation(f64),
    #[error("rotation matrix is not orthogonal with determinant +1 (defect {0:e})")]
    InvalidRotation(f64),
    #[error("point is singular for inversion stage {stage}: distance {distance:e} to the center")]
    SingularPoint { stage: usize, distance: f64 },
    #[error("Möbius map syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Translate(Vector3<f64>),
    Dilate(f64),
    Rotate(Matrix3<f64>),
    /// `x ↦ (x − a)/|x − a|²`.
    Invert(Vector3<f64>),
}

impl Primitive {
    fn validate(&self) -> Result<(), MoebiusError> {
        match *self {
            Primitive::Dilate(s) if !(s > 0.0 && s.is_finite()) => {
                Err(MoebiusError::InvalidDilation(s))
            }
            Primitive::Rotate(q) => {
                let defect = (q.transpose() * q - Matrix3::identity()).amax();
                if defect > 1e-12 || (q.determinant() - 1.0).abs() > 1e-12 {
                    Err(MoebiusError::InvalidRotation(defect))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn lorentz(&self) -> LorentzMatrix {
        match *self {
            Primitive::Translate(v) => LorentzMatrix(translation_matrix(&v)),
            Primitive::Dilate(s) => {
                let c = 0.5 * (s + 1.0 / s);
                let sh = 0.5 * (s - 1.0 / s);
                let mut m = Matrix5::identity();
                m[(3, 3)] = c;
                m[(3, 4)] = sh;
                m[(4, 3)] = sh;
                m[(4, 4)] = c;
                LorentzMatrix(m)
            }
            Primitive::Rotate(q) => {
                let mut m = Matrix5::identity();
                m.fixed_view_mut::<3, 3>(0, 0).copy_from(&q);
                LorentzMatrix(m)
            }
            Primitive::Invert(a) => {
                let flip = Matrix5::from_diagonal(&Vector5::new(-1.0, -1.0, -1.0, 1.0, -1.0));
                LorentzMatrix(flip * translation_matrix(&(-a)))
            }
        }
    }
}

/// Lorentz matrix of `x ↦ x + v`, acting on the null lift.
fn translation_matrix(v: &Vector3<f64>) -> Matrix5<f64> {
    let h = 0.5 * v.norm_squared();
    let mut m = Matrix5::identity();
    for i in 0..3 {
        m[(i, 3)] = -v[i];
        m[(i, 4)] = v[i];
        m[(3, i)] = v[i];
        m[(4, i)] = v[i];
    }
    m[(3, 3)] = 1.0 - h;
    m[(3, 4)] = h;
    m[(4, 3)] = -h;
    m[(4, 4)] = 1.0 + h;
    m
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MoebiusMap {
    stages: Vec<Primitive>,
}

impl MoebiusMap {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(stages: Vec<Primitive>) -> Result<Self, MoebiusError> {
        for s in &stages {
            s.validate()?;
        }
        Ok(Self { stages })
    }

    pub fn translate(v: Vector3<f64>) -> Self {
        Self {
            stages: vec![Primitive::Translate(v)],
        }
    }

    pub fn dilate(s: f64) -> Result<Self, MoebiusError> {
        Self::new(vec![Primitive::Dilate(s)])
    }

    pub fn rotate(q: Matrix3<f64>) -> Result<Self, MoebiusError> {
        Self::new(vec![Primitive::Rotate(q)])
    }

    pub fn rotate_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        Self {
            stages: vec![Primitive::Rotate(*r.matrix())],
        }
    }

    pub fn invert(center: Vector3<f64>) -> Self {
        Self {
            stages: vec![Primitive::Invert(center)],
        }
    }

    pub fn stages(&self) -> &[Primitive] {
        &self.stages
    }

    pub fn is_identity(&self) -> bool {
        self.stages.is_empty()
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn after(&self, inner: &MoebiusMap) -> MoebiusMap {
        let mut stages = inner.stages.clone();
        stages.extend_from_slice(&self.stages);
        MoebiusMap { stages }
    }

    /// Appends a stage applied after the existing ones.
    pub fn then(mut self, stage: Primitive) -> Result<Self, MoebiusError> {
        stage.validate()?;
        self.stages.push(stage);
        Ok(self)
    }

    pub fn apply_point(&self, x: &Vector3<f64>) -> Result<Vector3<f64>, MoebiusError> {
        let mut y = *x;
        for (i, stage) in self.stages.iter().enumerate() {
            y = match *stage {
                Primitive::Translate(v) => y + v,
                Primitive::Dilate(s) => y * s,
                Primitive::Rotate(q) => q * y,
                Primitive::Invert(a) => {
                    let u = y - a;
                    check_singular(i, &u, &a)?;
                    u / u.norm_squared()
                }
            };
        }
        Ok(y)
    }

    /// Exact chain rule of the map applied to a second-order jet.
    pub fn pushforward_jet(&self, jet: &Jet2) -> Result<Jet2, MoebiusError> {
        let mut j = *jet;
        for (i, stage) in self.stages.iter().enumerate() {
            let (next, _) = push_stage(i, stage, &j, None)?;
            j = next;
        }
        Ok(j)
    }

    /// Exact chain rule of the map applied to a third-order jet.
    pub fn pushforward_jet3(&self, jet: &Jet3) -> Result<Jet3, MoebiusError> {
        let mut j = jet.jet;
        let mut d3 = jet.d3;
        for (i, stage) in self.stages.iter().enumerate() {
            let (next, next3) = push_stage(i, stage, &j, Some(&d3))?;
            j = next;
            d3 = next3.expect("third derivatives requested");
        }
        Ok(Jet3 { jet: j, d3 })
    }

    /// Induced element of SO(4,1): the conformal Gauss map transforms as `Y ↦ M Y`.
    pub fn lorentz(&self) -> LorentzMatrix {
        self.stages
            .iter()
            .fold(LorentzMatrix::identity(), |acc, s| s.lorentz() * acc)
    }
}

pub fn lorentz_of(m: &MoebiusMap) -> LorentzMatrix {
    m.lorentz()
}

fn check_singular(stage: usize, u: &Vector3<f64>, a: &Vector3<f64>) -> Result<(), MoebiusError> {
    let distance = u.norm();
    if distance.is_nan() || distance < SINGULAR_THRESHOLD * a.norm().max(1.0) {
        return Err(MoebiusError::SingularPoint { stage, distance });
    }
    Ok(())
}

fn d2_index(i: usize, j: usize) -> usize {
    i + j
}

/// Third-derivative slot for the multi-index `(i, j, k)`; slots count y-derivatives.
fn d3_index(i: usize, j: usize, k: usize) -> usize {
    i + j + k
}

/// Derivatives of the inversion `ψ(x) = u/|u|²`, `u = x − a`, at a fixed point.
struct InversionDerivs {
    u: Vector3<f64>,
    r2: f64,
}

impl InversionDerivs {
    fn d1(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let r2 = self.r2;
        v / r2 - self.u * (2.0 * self.u.dot(v) / (r2 * r2))
    }

    fn d2(&self, v: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
        let (u, r2) = (&self.u, self.r2);
        let r4 = r2 * r2;
        let uv = u.dot(v);
        let uw = u.dot(w);
        (v * uw + w * uv + u * v.dot(w)) * (-2.0 / r4) + u * (8.0 * uv * uw / (r4 * r2))
    }

    fn d3(&self, v: &Vector3<f64>, w: &Vector3<f64>, z: &Vector3<f64>) -> Vector3<f64> {
        let (u, r2) = (&self.u, self.r2);
        let r4 = r2 * r2;
        let r6 = r4 * r2;
        let (uv, uw, uz) = (u.dot(v), u.dot(w), u.dot(z));
        let (vw, vz, wz) = (v.dot(w), v.dot(z), w.dot(z));
        (v * wz + w * vz + z * vw) * (-2.0 / r4)
            + (v * (uw * uz) + w * (uv * uz) + z * (uv * uw) + u * (vw * uz + vz * uw + wz * uv))
                * (8.0 / r6)
            - u * (48.0 * uv * uw * uz / (r6 * r2))
    }
}

type Stage3 = Option<[Vector3<f64>; 4]>;

fn push_stage(
    index: usize,
    stage: &Primitive,
    j: &Jet2,
    d3: Option<&[Vector3<f64>; 4]>,
) -> Result<(Jet2, Stage3), MoebiusError> {
    let linear = |m: Matrix3<f64>, b: Vector3<f64>| {
        let jet = Jet2 {
            p: j.p,
            phi: m * j.phi + b,
            d1: j.d1.map(|v| m * v),
            d2: j.d2.map(|v| m * v),
        };
        (jet, d3.map(|d| d.map(|v| m * v)))
    };
    Ok(match *stage {
        Primitive::Translate(v) => linear(Matrix3::identity(), v),
        Primitive::Dilate(s) => linear(Matrix3::identity() * s, Vector3::zeros()),
        Primitive::Rotate(q) => linear(q, Vector3::zeros()),
        Primitive::Invert(a) => {
            let u = j.phi - a;
            check_singular(index, &u, &a)?;
            let inv = InversionDerivs {
                u,
                r2: u.norm_squared(),
            };
            let f1 = j.d1;
            let f2 = j.d2;
            let d1 = [inv.d1(&f1[0]), inv.d1(&f1[1])];
            let mut d2 = [Vector3::zeros(); 3];
            for (i, jj) in [(0, 0), (0, 1), (1, 1)] {
                d2[d2_index(i, jj)] = inv.d2(&f1[i], &f1[jj]) + inv.d1(&f2[d2_index(i, jj)]);
            }
            let out3 = d3.map(|f3| {
                let mut out = [Vector3::zeros(); 4];
                for (i, jj, k) in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)] {
                    out[d3_index(i, jj, k)] = inv.d3(&f1[i], &f1[jj], &f1[k])
                        + inv.d2(&f2[d2_index(i, jj)], &f1[k])
                        + inv.d2(&f2[d2_index(i, k)], &f1[jj])
                        + inv.d2(&f2[d2_index(jj, k)], &f1[i])
                        + inv.d1(&f3[d3_index(i, jj, k)]);
                }
                out
            });
            let jet = Jet2 {
                p: j.p,
                phi: u / inv.r2,
                d1,
                d2,
            };
            (jet, out3)
        }
    })
}

/// A 5×5 matrix meant to lie in SO(4,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix(pub Matrix5<f64>);

impl LorentzMatrix {
    pub fn identity() -> Self {
        Self(Matrix5::identity())
    }

    pub fn matrix(&self) -> &Matrix5<f64> {
        &self.0
    }

    /// `max |MᵀεM − ε|`.
    pub fn lorentz_defect(&self) -> f64 {
        let eps = lorentz::signature();
        (self.0.transpose() * eps * self.0 - eps).amax()
    }

    pub fn is_lorentz(&self, tol: f64) -> bool {
        self.lorentz_defect() <= tol
    }

    pub fn act_on_y(&self, y: &Vector5) -> Vector5 {
        self.0 * y
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;
    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix(self.0 * rhs.0)
    }
}

pub fn act_on_y(m: &LorentzMatrix, y: &Vector5) -> Vector5 {
    m.act_on_y(y)
}

// ---------------------------------------------------------------------------
// text format

fn fmt_vec(v: &Vector3<f64>) -> String {
    format!("({},{},{})", v[0] + 0.0, v[1] + 0.0, v[2] + 0.0)
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::Translate(v) => write!(f, "translate {}", fmt_vec(v)),
            Primitive::Dilate(s) => write!(f, "dilate {s}"),
            Primitive::Invert(a) => write!(f, "invert {}", fmt_vec(a)),
            Primitive::Rotate(q) => {
                let rot = Rotation3::from_matrix_unchecked(*q);
                match rot.axis_angle() {
                    Some((axis, angle)) => write!(f, "rotate {} {}", fmt_vec(&axis), angle),
                    None => write!(f, "rotate (0,0,1) 0"),
                }
            }
        }
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stages.is_empty() {
            return write!(f, "identity");
        }
        for (i, s) in self.stages.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for MoebiusMap {
    type Err = MoebiusError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut stages = Vec::new();
        if text.trim().is_empty() || text.trim() == "identity" {
            return Ok(Self::identity());
        }
        let mut offset = 0;
        for part in text.split('|') {
            let mut cur = Cursor {
                text: part,
                pos: 0,
                base: offset,
            };
            offset += part.len() + 1;
            cur.skip_ws();
            let word_start = cur.pos;
            let word = cur.word();
            let stage = match word {
                "translate" => Primitive::Translate(cur.vec3()?),
                "dilate" => Primitive::Dilate(cur.number()?),
                "invert" => Primitive::Invert(cur.vec3()?),
                "rotate" => {
                    let axis = cur.vec3()?;
                    let angle = cur.number()?;
                    if axis.norm() == 0.0 {
                        return Err(cur.error("rotation axis must be nonzero"));
                    }
                    let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
                    Primitive::Rotate(*r.matrix())
                }
                "identity" => {
                    cur.expect_end()?;
                    continue;
                }
                _ => {
                    return Err(MoebiusError::Syntax {
                        position: cur.base + word_start,
                        message: format!(
                            "unknown stage `{word}` (expected translate, dilate, rotate or invert)"
                        ),
                    })
                }
            };
            cur.expect_end()?;
            stage.validate()?;
            stages.push(stage);
        }
        Ok(Self { stages })
    }
}

/// Minimal scanner shared by the Möbius and surface text formats.
pub(crate) struct Cursor<'a> {
    pub text: &'a str,
    pub pos: usize,
    pub base: usize,
}

impl<'a> Cursor<'a> {
    pub fn error(&self, message: &str) -> MoebiusError {
        MoebiusError::Syntax {
            position: self.base + self.pos,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    pub fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), MoebiusError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    pub fn number(&mut self) -> Result<f64, MoebiusError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')))
            .unwrap_or(rest.len());
        let value = rest[..len]
            .parse::<f64>()
            .map_err(|_| self.error("expected a number"))?;
        self.pos += len;
        Ok(value)
    }

    pub fn vec3(&mut self) -> Result<Vector3<f64>, MoebiusError> {
        self.expect('(')?;
        let x = self.number()?;
        self.expect(',')?;
        let y = self.number()?;
        self.expect(',')?;
        let z = self.number()?;
        self.expect(')')?;
        Ok(Vector3::new(x, y, z))
    }

    pub fn vec2(&mut self) -> Result<[f64; 2], MoebiusError> {
        self.expect('(')?;
        let x = self.number()?;
        self.expect(',')?;
        let y = self.number()?;
        self.expect(')')?;
        Ok([x, y])
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    pub fn expect_end(&mut self) -> Result<(), MoebiusError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}
