//! Analytic test surfaces with exact jets.
//!
//! Every variant is a conformal chart except [`GraphHeight`] patches and
//! [`SurfaceSpec::Perturbed`] surfaces, which serve as non-Willmore controls.
//!
//! The single-line text form (see `docs/surface-spec.md`) is parsed by
//! [`SurfaceSpec::from_str`] and printed by `Display`:
//!
//! ```text
//! sphere r=1
//! weierstrass g="z" dh="2" base=0
//! invert center=(0,0,3) of (enneper)
//! moebius "translate (1,0,0) | dilate 2" of (catenoid)
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{ExprError, RationalExpr};
use crate::geom::{Jet2, Jet3};
use crate::moebius::{Cursor, MoebiusError, MoebiusMap};
use crate::quadrature::gauss_legendre;
use crate::sampled::{SampledError, SampledSurface};
use crate::taylor::Taylor3;

/// Maximum nesting of wrapper variants (transformed, rescaled, perturbed).
pub const MAX_DEPTH: usize = 8;

/// Minimum distance, in `|z|`, between a Weierstrass integration path and a pole.
pub const POLE_MARGIN: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("surface spec syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("integration path from {base} to {z} passes within {distance:e} of a pole")]
    PoleOnPath {
        base: Complex64,
        z: Complex64,
        distance: f64,
    },
    #[error("point ({x}, {y}) is outside the parameter domain")]
    OutOfDomain { x: f64, y: f64 },
    #[error("surface nesting depth exceeds {MAX_DEPTH}")]
    DepthExceeded,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geom(#[from] crate::geom::GeomError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Sampled(#[from] SampledError),
}

impl SurfaceError {
    /// True for errors in the surface text itself rather than in evaluating it.
    pub fn is_syntax(&self) -> bool {
        matches!(
            self,
            SurfaceError::Syntax { .. }
                | SurfaceError::Expr(ExprError::Syntax { .. })
                | SurfaceError::Moebius(MoebiusError::Syntax { .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphHeight {
    /// `x² + 2y²`
    Paraboloid,
    /// `x² − y²`
    Saddle,
}

impl GraphHeight {
    fn name(self) -> &'static str {
        match self {
            GraphHeight::Paraboloid => "paraboloid",
            GraphHeight::Saddle => "saddle",
        }
    }
}

/// Holomorphic data `(g, dh)`; the surface is `Re ∫_base^z (½(1−g²), (i/2)(1+g²), g) dh`,
/// with `dh` given as the coefficient of `dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassData {
    pub g_text: String,
    pub dh_text: String,
    pub base: Complex64,
    g: [RationalExpr; 3],
    h: [RationalExpr; 3],
    /// Denominators of `g` and `dh` with their derivatives, for pole checks.
    poles: Vec<(RationalExpr, RationalExpr)>,
}

impl WeierstrassData {
    pub fn new(g_text: &str, dh_text: &str, base: Complex64) -> Result<Self, SurfaceError> {
        let g0: RationalExpr = g_text.parse()?;
        let h0: RationalExpr = dh_text.parse()?;
        let g1 = g0.differentiate();
        let g2 = g1.differentiate();
        let h1 = h0.differentiate();
        let h2 = h1.differentiate();
        let poles = g0
            .denominators()
            .into_iter()
            .chain(h0.denominators())
            .map(|d| (d.clone(), d.differentiate()))
            .collect();
        Ok(Self {
            g_text: g_text.to_string(),
            dh_text: dh_text.to_string(),
            base,
            g: [g0, g1, g2],
            h: [h0, h1, h2],
            poles,
        })
    }

    /// Integrand `F(z)` and its first two derivatives.
    fn integrand(&self, z: Complex64) -> [[Complex64; 3]; 3] {
        let [g, g1, g2] = [self.g[0].eval(z), self.g[1].eval(z), self.g[2].eval(z)];
        let [h, h1, h2] = [self.h[0].eval(z), self.h[1].eval(z), self.h[2].eval(z)];
        let i = Complex64::new(0.0, 1.0);
        let half = 0.5;
        let one = Complex64::new(1.0, 0.0);
        let f = [
            (one - g * g) * h * half,
            (one + g * g) * h * i * half,
            g * h,
        ];
        let f1 = [
            -g * g1 * h + (one - g * g) * h1 * half,
            i * g * g1 * h + i * (one + g * g) * h1 * half,
            g1 * h + g * h1,
        ];
        let gg = g1 * g1 + g * g2;
        let f2 = [
            -gg * h - g * g1 * h1 * 2.0 + (one - g * g) * h2 * half,
            i * gg * h + i * g * g1 * h1 * 2.0 + i * (one + g * g) * h2 * half,
            g2 * h + g1 * h1 * 2.0 + g * h2,
        ];
        [f, f1, f2]
    }

    fn check_path(&self, z: Complex64) -> Result<(), SurfaceError> {
        const SAMPLES: usize = 512;
        for (d, dd) in &self.poles {
            for k in 0..=SAMPLES {
                let w = self.base + (z - self.base) * (k as f64 / SAMPLES as f64);
                let v = d.eval(w);
                let dv = dd.eval(w);
                let distance = if v.norm() == 0.0 || !v.is_finite() {
                    0.0
                } else if dv.norm() == 0.0 {
                    f64::INFINITY
                } else {
                    v.norm() / dv.norm()
                };
                if distance < POLE_MARGIN {
                    return Err(SurfaceError::PoleOnPath {
                        base: self.base,
                        z,
                        distance,
                    });
                }
            }
        }
        Ok(())
    }

    fn position(&self, z: Complex64) -> Vector3<f64> {
        let dz = z - self.base;
        let f = |t: f64| -> [Complex64; 3] {
            let v = self.integrand(self.base + dz * t)[0];
            [v[0] * dz, v[1] * dz, v[2] * dz]
        };
        let (x, w) = gauss_legendre(10);
        let rule = |a: f64, b: f64| -> [Complex64; 3] {
            let mut acc = [Complex64::new(0.0, 0.0); 3];
            let half = 0.5 * (b - a);
            for (xi, wi) in x.iter().zip(&w) {
                let v = f(a + half * (1.0 + xi));
                for c in 0..3 {
                    acc[c] += v[c] * (wi * half);
                }
            }
            acc
        };
        fn adapt(
            rule: &dyn Fn(f64, f64) -> [Complex64; 3],
            a: f64,
            b: f64,
            whole: [Complex64; 3],
            depth: usize,
        ) -> [Complex64; 3] {
            let m = 0.5 * (a + b);
            let left = rule(a, m);
            let right = rule(m, b);
            let mut sum = [Complex64::new(0.0, 0.0); 3];
            let mut err = 0.0f64;
            let mut scale = 0.0f64;
            for c in 0..3 {
                sum[c] = left[c] + right[c];
                err = err.max((sum[c] - whole[c]).norm());
                scale = scale.max(sum[c].norm());
            }
            if depth == 0 || err <= 1e-14 * (1.0 + scale) {
                return sum;
            }
            let l = adapt(rule, a, m, left, depth - 1);
            let r = adapt(rule, m, b, right, depth - 1);
            [l[0] + r[0], l[1] + r[1], l[2] + r[2]]
        }
        let whole = rule(0.0, 1.0);
        let v = adapt(&rule, 0.0, 1.0, whole, 24);
        Vector3::new(v[0].re, v[1].re, v[2].re)
    }

    pub fn jet3(&self, p: [f64; 2]) -> Result<Jet3, SurfaceError> {
        let z = Complex64::new(p[0], p[1]);
        self.check_path(z)?;
        let [f, f1, f2] = self.integrand(z);
        let re = |v: [Complex64; 3]| Vector3::new(v[0].re, v[1].re, v[2].re);
        let im = |v: [Complex64; 3]| Vector3::new(v[0].im, v[1].im, v[2].im);
        // ∂_x = d/dz, ∂_y = i d/dz on holomorphic functions
        Ok(Jet3 {
            jet: Jet2 {
                p,
                phi: self.position(z),
                d1: [re(f), -im(f)],
                d2: [re(f1), -im(f1), -re(f1)],
            },
            d3: [re(f2), -im(f2), -re(f2), im(f2)],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSpec {
    Plane,
    /// Stereographic chart `r·(2x, 2y, x²+y²−1)/(1+x²+y²)`.
    RoundSphere {
        radius: f64,
    },
    /// `(x − x³/3 + xy², −y + y³/3 − x²y, x² − y²)`.
    Enneper,
    /// `(cosh x cos y, cosh x sin y, x)`.
    Catenoid,
    GraphPatch(GraphHeight),
    Weierstrass(Box<WeierstrassData>),
    Transformed {
        moebius: MoebiusMap,
        inner: Box<SurfaceSpec>,
    },
    /// `p ↦ inner(center + scale·p)`.
    Rescaled {
        center: [f64; 2],
        scale: f64,
        inner: Box<SurfaceSpec>,
    },
    /// `inner + amplitude·(0, 0, x²)`; not conformal for `amplitude ≠ 0`.
    Perturbed {
        amplitude: f64,
        inner: Box<SurfaceSpec>,
    },
    GridSampled(Arc<SampledSurface>),
}

fn taylor_jet(p: [f64; 2], c: [Taylor3; 3]) -> Jet3 {
    let v = |k: usize| Vector3::new(c[0].0[k], c[1].0[k], c[2].0[k]);
    Jet3 {
        jet: Jet2 {
            p,
            phi: v(0),
            d1: [v(1), v(2)],
            d2: [v(3), v(4), v(5)],
        },
        d3: [v(6), v(7), v(8), v(9)],
    }
}

impl SurfaceSpec {
    pub fn sphere(radius: f64) -> Result<Self, SurfaceError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(SurfaceError::InvalidParameter(format!(
                "sphere radius {radius}"
            )));
        }
        Ok(SurfaceSpec::RoundSphere { radius })
    }

    pub fn weierstrass(g: &str, dh: &str, base: Complex64) -> Result<Self, SurfaceError> {
        Ok(SurfaceSpec::Weierstrass(Box::new(WeierstrassData::new(
            g, dh, base,
        )?)))
    }

    pub fn transformed(moebius: MoebiusMap, inner: SurfaceSpec) -> Result<Self, SurfaceError> {
        Self::wrap(SurfaceSpec::Transformed {
            moebius,
            inner: Box::new(inner),
        })
    }

    pub fn inverted(center: Vector3<f64>, inner: SurfaceSpec) -> Result<Self, SurfaceError> {
        Self::transformed(MoebiusMap::invert(center), inner)
    }

    pub fn rescaled(
        center: [f64; 2],
        scale: f64,
        inner: SurfaceSpec,
    ) -> Result<Self, SurfaceError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(SurfaceError::InvalidParameter(format!(
                "rescale factor {scale}"
            )));
        }
        Self::wrap(SurfaceSpec::Rescaled {
            center,
            scale,
            inner: Box::new(inner),
        })
    }

    pub fn perturbed(amplitude: f64, inner: SurfaceSpec) -> Result<Self, SurfaceError> {
        Self::wrap(SurfaceSpec::Perturbed {
            amplitude,
            inner: Box::new(inner),
        })
    }

    pub fn grid_csv(path: &Path) -> Result<Self, SurfaceError> {
        Ok(SurfaceSpec::GridSampled(Arc::new(
            SampledSurface::from_csv_path(path)?,
        )))
    }

    fn wrap(s: SurfaceSpec) -> Result<Self, SurfaceError> {
        if s.depth() > MAX_DEPTH {
            Err(SurfaceError::DepthExceeded)
        } else {
            Ok(s)
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SurfaceSpec::Transformed { inner, .. }
            | SurfaceSpec::Rescaled { inner, .. }
            | SurfaceSpec::Perturbed { inner, .. } => 1 + inner.depth(),
            _ => 0,
        }
    }

    /// Known to solve the Willmore equation on its whole domain.
    pub fn is_willmore(&self) -> bool {
        match self {
            SurfaceSpec::Plane
            | SurfaceSpec::RoundSphere { .. }
            | SurfaceSpec::Enneper
            | SurfaceSpec::Catenoid
            | SurfaceSpec::Weierstrass(_) => true,
            SurfaceSpec::GraphPatch(_) | SurfaceSpec::GridSampled(_) => false,
            SurfaceSpec::Transformed { inner, .. } | SurfaceSpec::Rescaled { inner, .. } => {
                inner.is_willmore()
            }
            SurfaceSpec::Perturbed { amplitude, inner } => *amplitude == 0.0 && inner.is_willmore(),
        }
    }

    /// Conformal charts (up to roundoff) by construction.
    pub fn is_conformal(&self) -> bool {
        match self {
            SurfaceSpec::GraphPatch(_) | SurfaceSpec::GridSampled(_) => false,
            SurfaceSpec::Perturbed { amplitude, inner } => {
                *amplitude == 0.0 && inner.is_conformal()
            }
            SurfaceSpec::Transformed { inner, .. } | SurfaceSpec::Rescaled { inner, .. } => {
                inner.is_conformal()
            }
            _ => true,
        }
    }

    pub fn jet(&self, p: [f64; 2]) -> Result<Jet2, SurfaceError> {
        match self {
            SurfaceSpec::Transformed { moebius, inner } => {
                Ok(moebius.pushforward_jet(&inner.jet(p)?)?)
            }
            _ => Ok(self.jet3(p)?.jet),
        }
    }

    pub fn jet3(&self, p: [f64; 2]) -> Result<Jet3, SurfaceError> {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(SurfaceError::OutOfDomain { x: p[0], y: p[1] });
        }
        let x = Taylor3::var_x(p[0]);
        let y = Taylor3::var_y(p[1]);
        Ok(match self {
            SurfaceSpec::Plane => taylor_jet(p, [x, y, Taylor3::constant(0.0)]),
            SurfaceSpec::RoundSphere { radius } => {
                let u = (x * x + y * y + 1.0).recip();
                taylor_jet(
                    p,
                    [
                        x * u * (2.0 * radius),
                        y * u * (2.0 * radius),
                        (u * -2.0 + 1.0) * *radius,
                    ],
                )
            }
            SurfaceSpec::Enneper => {
                let x2 = x * x;
                let y2 = y * y;
                taylor_jet(
                    p,
                    [
                        x - x2 * x * (1.0 / 3.0) + x * y2,
                        -y + y2 * y * (1.0 / 3.0) - x2 * y,
                        x2 - y2,
                    ],
                )
            }
            SurfaceSpec::Catenoid => {
                let ch = x.cosh();
                taylor_jet(p, [ch * y.cos(), ch * y.sin(), x])
            }
            SurfaceSpec::GraphPatch(h) => {
                let z = match h {
                    GraphHeight::Paraboloid => x * x + y * y * 2.0,
                    GraphHeight::Saddle => x * x - y * y,
                };
                taylor_jet(p, [x, y, z])
            }
            SurfaceSpec::Weierstrass(w) => w.jet3(p)?,
            SurfaceSpec::Transformed { moebius, inner } => {
                moebius.pushforward_jet3(&inner.jet3(p)?)?
            }
            SurfaceSpec::Rescaled {
                center,
                scale,
                inner,
            } => {
                let q = [center[0] + scale * p[0], center[1] + scale * p[1]];
                let j = inner.jet3(q)?;
                let (s, s2, s3) = (*scale, scale * scale, scale * scale * scale);
                Jet3 {
                    jet: Jet2 {
                        p,
                        phi: j.jet.phi,
                        d1: j.jet.d1.map(|v| v * s),
                        d2: j.jet.d2.map(|v| v * s2),
                    },
                    d3: j.d3.map(|v| v * s3),
                }
            }
            SurfaceSpec::Perturbed { amplitude, inner } => {
                let mut j = inner.jet3(p)?;
                let a = *amplitude;
                j.jet.phi[2] += a * p[0] * p[0];
                j.jet.d1[0][2] += 2.0 * a * p[0];
                j.jet.d2[0][2] += 2.0 * a;
                j
            }
            SurfaceSpec::GridSampled(s) => s.jet3(p).map_err(|e| match e {
                SampledError::OutOfDomain { x, y } => SurfaceError::OutOfDomain { x, y },
                other => other.into(),
            })?,
        })
    }
}

// ---------------------------------------------------------------------------
// text format

fn syntax(cur: &Cursor<'_>, message: &str) -> SurfaceError {
    SurfaceError::Syntax {
        position: cur.base + cur.pos,
        message: message.to_string(),
    }
}

fn lift(e: MoebiusError) -> SurfaceError {
    match e {
        MoebiusError::Syntax { position, message } => SurfaceError::Syntax { position, message },
        other => SurfaceError::Moebius(other),
    }
}

fn quoted<'a>(cur: &mut Cursor<'a>) -> Result<(&'a str, usize), SurfaceError> {
    if !cur.eat('"') {
        return Err(syntax(cur, "expected a quoted string"));
    }
    let start = cur.pos;
    let rest = &cur.text[start..];
    let len = rest
        .find('"')
        .ok_or_else(|| syntax(cur, "unterminated string"))?;
    cur.pos = start + len + 1;
    Ok((&rest[..len], cur.base + start))
}

fn key(cur: &mut Cursor<'_>, name: &str) -> Result<(), SurfaceError> {
    cur.skip_ws();
    let save = cur.pos;
    let w = cur.word();
    if w != name || !cur.eat('=') {
        cur.pos = save;
        return Err(syntax(cur, &format!("expected `{name}=`")));
    }
    Ok(())
}

fn optional_key(cur: &mut Cursor<'_>, name: &str) -> bool {
    cur.skip_ws();
    let save = cur.pos;
    if cur.word() == name && cur.eat('=') {
        return true;
    }
    cur.pos = save;
    false
}

fn shift_expr(e: ExprError, offset: usize) -> SurfaceError {
    match e {
        ExprError::Syntax { position, message } => SurfaceError::Syntax {
            position: position + offset,
            message,
        },
        other => SurfaceError::Expr(other),
    }
}

fn of_inner(cur: &mut Cursor<'_>, depth: usize) -> Result<SurfaceSpec, SurfaceError> {
    cur.skip_ws();
    if cur.word() != "of" {
        return Err(syntax(cur, "expected `of (<surface>)`"));
    }
    cur.expect('(').map_err(lift)?;
    let inner = parse_surface(cur, depth + 1)?;
    cur.expect(')').map_err(lift)?;
    Ok(inner)
}

fn parse_surface(cur: &mut Cursor<'_>, depth: usize) -> Result<SurfaceSpec, SurfaceError> {
    if depth > MAX_DEPTH {
        return Err(SurfaceError::DepthExceeded);
    }
    if cur.eat('(') {
        let s = parse_surface(cur, depth)?;
        cur.expect(')').map_err(lift)?;
        return Ok(s);
    }
    cur.skip_ws();
    let start = cur.pos;
    let word = cur.word();
    match word {
        "plane" => Ok(SurfaceSpec::Plane),
        "enneper" => Ok(SurfaceSpec::Enneper),
        "catenoid" => Ok(SurfaceSpec::Catenoid),
        "sphere" => {
            let r = if optional_key(cur, "r") {
                cur.number().map_err(lift)?
            } else {
                1.0
            };
            SurfaceSpec::sphere(r)
        }
        "graph" => {
            if !optional_key(cur, "h") {
                return Ok(SurfaceSpec::GraphPatch(GraphHeight::Paraboloid));
            }
            match cur.word() {
                "paraboloid" => Ok(SurfaceSpec::GraphPatch(GraphHeight::Paraboloid)),
                "saddle" => Ok(SurfaceSpec::GraphPatch(GraphHeight::Saddle)),
                _ => Err(syntax(cur, "unknown graph height (paraboloid, saddle)")),
            }
        }
        "weierstrass" => {
            key(cur, "g")?;
            let (g, g_off) = quoted(cur)?;
            key(cur, "dh")?;
            let (dh, dh_off) = quoted(cur)?;
            let base = if optional_key(cur, "base") {
                cur.skip_ws();
                if cur.text[cur.pos..].starts_with('"') {
                    let (b, off) = quoted(cur)?;
                    const_expr(b, off)?
                } else {
                    Complex64::new(cur.number().map_err(lift)?, 0.0)
                }
            } else {
                Complex64::new(0.0, 0.0)
            };
            g.parse::<RationalExpr>()
                .map_err(|e| shift_expr(e, g_off))?;
            dh.parse::<RationalExpr>()
                .map_err(|e| shift_expr(e, dh_off))?;
            SurfaceSpec::weierstrass(g, dh, base)
        }
        "invert" => {
            key(cur, "center")?;
            let a = cur.vec3().map_err(lift)?;
            let inner = of_inner(cur, depth)?;
            SurfaceSpec::inverted(a, inner)
        }
        "moebius" => {
            let (text, off) = quoted(cur)?;
            let m = text.parse::<MoebiusMap>().map_err(|e| match e {
                MoebiusError::Syntax { position, message } => SurfaceError::Syntax {
                    position: position + off,
                    message,
                },
                other => SurfaceError::Moebius(other),
            })?;
            let inner = of_inner(cur, depth)?;
            SurfaceSpec::transformed(m, inner)
        }
        "rescale" => {
            key(cur, "center")?;
            let c = cur.vec2().map_err(lift)?;
            key(cur, "scale")?;
            let s = cur.number().map_err(lift)?;
            let inner = of_inner(cur, depth)?;
            SurfaceSpec::rescaled(c, s, inner)
        }
        "perturb" => {
            key(cur, "amp")?;
            let a = cur.number().map_err(lift)?;
            let inner = of_inner(cur, depth)?;
            SurfaceSpec::perturbed(a, inner)
        }
        "grid" => {
            key(cur, "path")?;
            let (path, _) = quoted(cur)?;
            SurfaceSpec::grid_csv(Path::new(path))
        }
        _ => {
            cur.pos = start;
            Err(syntax(cur, "unknown surface (expected plane, sphere, enneper, catenoid, graph, weierstrass, invert, moebius, rescale, perturb or grid)"))
        }
    }
}

fn const_expr(text: &str, offset: usize) -> Result<Complex64, SurfaceError> {
    let e: RationalExpr = text.parse().map_err(|e| shift_expr(e, offset))?;
    if e.differentiate() != RationalExpr::Const(Complex64::new(0.0, 0.0)) {
        return Err(SurfaceError::Syntax {
            position: offset,
            message: "base point must be a constant".into(),
        });
    }
    Ok(e.eval(Complex64::new(0.0, 0.0)))
}

impl FromStr for SurfaceSpec {
    type Err = SurfaceError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor {
            text,
            pos: 0,
            base: 0,
        };
        if cur.at_end() {
            return Err(syntax(&cur, "empty surface spec"));
        }
        let s = parse_surface(&mut cur, 0)?;
        if !cur.at_end() {
            return Err(syntax(&cur, "unexpected trailing input"));
        }
        Ok(s)
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("\"{}\"", RationalExpr::Const(z))
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSpec::Plane => write!(f, "plane"),
            SurfaceSpec::RoundSphere { radius } => write!(f, "sphere r={radius}"),
            SurfaceSpec::Enneper => write!(f, "enneper"),
            SurfaceSpec::Catenoid => write!(f, "catenoid"),
            SurfaceSpec::GraphPatch(h) => write!(f, "graph h={}", h.name()),
            SurfaceSpec::Weierstrass(w) => write!(
                f,
                "weierstrass g=\"{}\" dh=\"{}\" base={}",
                w.g_text,
                w.dh_text,
                fmt_complex(w.base)
            ),
            SurfaceSpec::Transformed { moebius, inner } => {
                if let [crate::moebius::Primitive::Invert(a)] = moebius.stages() {
                    write!(f, "invert center=({},{},{}) of ({inner})", a[0], a[1], a[2])
                } else {
                    write!(f, "moebius \"{moebius}\" of ({inner})")
                }
            }
            SurfaceSpec::Rescaled {
                center,
                scale,
                inner,
            } => write!(
                f,
                "rescale center=({},{}) scale={scale} of ({inner})",
                center[0], center[1]
            ),
            SurfaceSpec::Perturbed { amplitude, inner } => {
                write!(f, "perturb amp={amplitude} of ({inner})")
            }
            SurfaceSpec::GridSampled(s) => {
                write!(
                    f,
                    "grid path=\"{}\"",
                    s.source.as_deref().unwrap_or("<memory>")
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::fundamental_forms;

    #[test]
    fn sphere_chart_at_origin() {
        let j = SurfaceSpec::sphere(1.0).unwrap().jet([0.0, 0.0]).unwrap();
        assert_eq!(j.phi, Vector3::new(0.0, 0.0, -1.0));
        assert_eq!(j.d1[0], Vector3::new(2.0, 0.0, 0.0));
        assert_eq!(j.d1[1], Vector3::new(0.0, 2.0, 0.0));
        assert_eq!(j.d2[0], Vector3::new(0.0, 0.0, 4.0));
        assert_eq!(j.d2[1], Vector3::zeros());
        assert_eq!(j.d2[2], Vector3::new(0.0, 0.0, 4.0));
    }

    #[test]
    fn sphere_normal_convention_gives_positive_mean_curvature() {
        // n = Φ_x × Φ_y/|Φ_x × Φ_y| is the inward normal of this chart, hence H = +1.
        let s = SurfaceSpec::sphere(1.0).unwrap();
        for p in [[0.0, 0.0], [0.4, -1.3], [3.0, 2.0]] {
            let f = fundamental_forms(&s.jet(p).unwrap()).unwrap();
            assert!((f.h - 1.0).abs() < 1e-14, "{}", f.h);
            assert!((f.k - 1.0).abs() < 1e-13);
            assert!(crate::geom::tracefree_density(&f) < 1e-14);
        }
    }

    #[test]
    fn inverted_plane_at_origin() {
        let s = SurfaceSpec::inverted(Vector3::new(0.0, 0.0, 3.0), SurfaceSpec::Plane).unwrap();
        let j = s.jet([0.0, 0.0]).unwrap();
        assert!((j.phi - Vector3::new(0.0, 0.0, -1.0 / 3.0)).norm() < 1e-16);
    }

    #[test]
    fn transformed_jet_uses_pushforward() {
        let m: MoebiusMap = "translate (0.5,0,1) | invert (0,1,3) | dilate 2"
            .parse()
            .unwrap();
        let s = SurfaceSpec::transformed(m.clone(), SurfaceSpec::Enneper).unwrap();
        let p = [0.3, -0.2];
        let direct = m
            .pushforward_jet(&SurfaceSpec::Enneper.jet(p).unwrap())
            .unwrap();
        assert_eq!(s.jet(p).unwrap(), direct);
        assert_eq!(s.jet3(p).unwrap().jet, direct);
    }

    #[test]
    fn weierstrass_reproduces_enneper() {
        let w = SurfaceSpec::weierstrass("z", "2", Complex64::new(0.0, 0.0)).unwrap();
        for p in [[0.5, 0.5], [-0.9, 0.1], [0.0, -0.7]] {
            let a = w.jet3(p).unwrap();
            let b = SurfaceSpec::Enneper.jet3(p).unwrap();
            assert!((a.jet.phi - b.jet.phi).norm() < 1e-12);
            for k in 0..2 {
                assert!((a.jet.d1[k] - b.jet.d1[k]).norm() < 1e-13);
            }
            for k in 0..3 {
                assert!((a.jet.d2[k] - b.jet.d2[k]).norm() < 1e-13);
            }
            for k in 0..4 {
                assert!((a.d3[k] - b.d3[k]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn poles_on_path_are_rejected() {
        let w = SurfaceSpec::weierstrass("1/(z-1)", "1", Complex64::new(0.0, 0.0)).unwrap();
        assert!(matches!(
            w.jet([2.0, 0.0]),
            Err(SurfaceError::PoleOnPath { .. })
        ));
        assert!(w.jet([0.0, 2.0]).is_ok());
    }

    #[test]
    fn text_format_round_trips() {
        for text in [
            "plane",
            "sphere r=2",
            "enneper",
            "catenoid",
            "graph h=saddle",
            "weierstrass g=\"z\" dh=\"z^2\" base=0",
            "weierstrass g=\"1/z\" dh=\"z\" base=\"(1+1*i)\"",
            "invert center=(0,0,3) of (enneper)",
            "moebius \"translate (1,0,0) | dilate 2\" of (sphere r=1)",
            "rescale center=(3,0) scale=0.5 of (enneper)",
            "perturb amp=0.05 of (enneper)",
        ] {
            let s: SurfaceSpec = text.parse().unwrap();
            let again: SurfaceSpec = s.to_string().parse().unwrap();
            assert_eq!(s, again, "{text}");
        }
        let s: SurfaceSpec = "weierstrass g=\"z\" dh=\"2\" base=\"1+i\"".parse().unwrap();
        match s {
            SurfaceSpec::Weierstrass(w) => assert_eq!(w.base, Complex64::new(1.0, 1.0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        let pos = |t: &str| match t.parse::<SurfaceSpec>() {
            Err(e) if e.is_syntax() => match e {
                SurfaceError::Syntax { position, .. } => position,
                other => panic!("{other:?}"),
            },
            other => panic!("{t}: {other:?}"),
        };
        assert_eq!(pos("nonsense("), 0);
        assert_eq!(pos("enneper extra"), 8);
        assert_eq!(pos("invert center=(0,0) of (plane)"), 18);
        assert_eq!(pos("weierstrass g=\"z+\" dh=\"1\""), 17);
        assert_eq!(pos("moebius \"dilate 2 | bend\" of (plane)"), 20);
        assert!(matches!(
            "sphere r=-1".parse::<SurfaceSpec>(),
            Err(SurfaceError::InvalidParameter(_))
        ));
    }

    #[test]
    fn nesting_depth_is_bounded() {
        let mut text = String::from("plane");
        for _ in 0..=MAX_DEPTH {
            text = format!("perturb amp=0 of ({text})");
        }
        assert!(matches!(
            text.parse::<SurfaceSpec>(),
            Err(SurfaceError::DepthExceeded)
        ));
    }
}
