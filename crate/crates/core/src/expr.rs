//! Rational expressions in one complex variable `z`.
//!
//! Used to feed holomorphic Weierstrass data to the surface zoo. The grammar
//! is the usual one with `^` (integer exponents only) binding tighter than
//! `*` and `/`, which bind tighter than `+` and `-`; all binary operators are
//! left-associative. `i` is the imaginary unit and a numeral may carry an
//! `i` suffix (`2.5i`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("denominator `{denominator}` vanishes identically")]
    DivisionByZeroExpr { denominator: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RationalExpr {
    Const(Complex64),
    Z,
    Neg(Box<RationalExpr>),
    Add(Box<RationalExpr>, Box<RationalExpr>),
    Sub(Box<RationalExpr>, Box<RationalExpr>),
    Mul(Box<RationalExpr>, Box<RationalExpr>),
    Div(Box<RationalExpr>, Box<RationalExpr>),
    Pow(Box<RationalExpr>, i32),
}

use RationalExpr::*;

fn c(re: f64) -> RationalExpr {
    Const(Complex64::new(re, 0.0))
}

fn is_const(e: &RationalExpr, v: f64) -> bool {
    matches!(e, Const(k) if *k == Complex64::new(v, 0.0))
}

// Smart constructors doing just enough folding to keep derivatives small.
fn add(a: RationalExpr, b: RationalExpr) -> RationalExpr {
    match (a, b) {
        (Const(x), Const(y)) => Const(x + y),
        (a, b) if is_const(&a, 0.0) => b,
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: RationalExpr, b: RationalExpr) -> RationalExpr {
    match (a, b) {
        (Const(x), Const(y)) => Const(x - y),
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) if is_const(&a, 0.0) => neg(b),
        (a, b) => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: RationalExpr, b: RationalExpr) -> RationalExpr {
    match (a, b) {
        (Const(x), Const(y)) => Const(x * y),
        (a, _) if is_const(&a, 0.0) => c(0.0),
        (_, b) if is_const(&b, 0.0) => c(0.0),
        (a, b) if is_const(&a, 1.0) => b,
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: RationalExpr, b: RationalExpr) -> RationalExpr {
    match (a, b) {
        (a, _) if is_const(&a, 0.0) => c(0.0),
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: RationalExpr) -> RationalExpr {
    match a {
        Const(x) => Const(-x),
        Neg(inner) => *inner,
        a => Neg(Box::new(a)),
    }
}

fn pow(a: RationalExpr, n: i32) -> RationalExpr {
    match (a, n) {
        (_, 0) => c(1.0),
        (a, 1) => a,
        (Const(x), n) => Const(x.powi(n)),
        (a, n) => Pow(Box::new(a), n),
    }
}

impl RationalExpr {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Const(k) => *k,
            Z => z,
            Neg(a) => -a.eval(z),
            Add(a, b) => a.eval(z) + b.eval(z),
            Sub(a, b) => a.eval(z) - b.eval(z),
            Mul(a, b) => a.eval(z) * b.eval(z),
            Div(a, b) => a.eval(z) / b.eval(z),
            Pow(a, n) => a.eval(z).powi(*n),
        }
    }

    /// Exact symbolic derivative with respect to `z`.
    pub fn differentiate(&self) -> RationalExpr {
        match self {
            Const(_) => c(0.0),
            Z => c(1.0),
            Neg(a) => neg(a.differentiate()),
            Add(a, b) => add(a.differentiate(), b.differentiate()),
            Sub(a, b) => sub(a.differentiate(), b.differentiate()),
            Mul(a, b) => add(
                mul(a.differentiate(), (**b).clone()),
                mul((**a).clone(), b.differentiate()),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.differentiate(), (**b).clone()),
                    mul((**a).clone(), b.differentiate()),
                ),
                pow((**b).clone(), 2),
            ),
            Pow(a, n) => mul(
                mul(c(*n as f64), pow((**a).clone(), n - 1)),
                a.differentiate(),
            ),
        }
    }

    /// Subexpressions whose zeros are poles of `self`.
    pub fn denominators(&self) -> Vec<&RationalExpr> {
        let mut out = Vec::new();
        self.collect_denominators(&mut out);
        out
    }

    fn collect_denominators<'a>(&'a self, out: &mut Vec<&'a RationalExpr>) {
        match self {
            Const(_) | Z => {}
            Neg(a) => a.collect_denominators(out),
            Add(a, b) | Sub(a, b) | Mul(a, b) => {
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
            Div(a, b) => {
                a.collect_denominators(out);
                b.collect_denominators(out);
                out.push(b);
            }
            Pow(a, n) => {
                a.collect_denominators(out);
                if *n < 0 {
                    out.push(a);
                }
            }
        }
    }

    /// Rejects denominators that vanish at every one of 16 fixed probe points.
    pub fn check_denominators(&self) -> Result<(), ExprError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0016);
        let probes: Vec<Complex64> = (0..16)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        for d in self.denominators() {
            let dead = probes.iter().all(|&z| {
                let v = d.eval(z);
                v.norm() <= 1e-14 || !v.is_finite()
            });
            if dead {
                return Err(ExprError::DivisionByZeroExpr {
                    denominator: d.to_string(),
                });
            }
        }
        Ok(())
    }
}

pub fn parse_rational(text: &str) -> Result<RationalExpr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    e.check_denominators()?;
    Ok(e)
}

pub fn differentiate(e: &RationalExpr) -> RationalExpr {
    e.differentiate()
}

impl FromStr for RationalExpr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalExpr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == b'+' {
                Add(Box::new(lhs), Box::new(rhs))
            } else {
                Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<RationalExpr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == b'*' {
                Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RationalExpr, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalExpr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.exponent()?;
            return Ok(Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let mut negative = false;
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let n = self.exponent()?;
            if self.peek() != Some(b')') {
                return Err(self.error("expected `)`"));
            }
            self.pos += 1;
            return Ok(n);
        }
        if let Some(b'-' | b'+') = self.peek() {
            negative = self.src[self.pos] == b'-';
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            self.pos = start;
            return Err(self.error("exponent must be an integer literal"));
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let n: i32 = text.parse().map_err(|_| ExprError::Syntax {
            position: digits_start,
            message: "exponent out of range".into(),
        })?;
        Ok(if negative { -n } else { n })
    }

    fn atom(&mut self) -> Result<RationalExpr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(Z)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Const(Complex64::new(0.0, 1.0)))
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => self.number(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<RationalExpr, ExprError> {
        let start = self.pos;
        let src = self.src;
        let mut end = start;
        while end < src.len() && (src[end].is_ascii_digit() || src[end] == b'.') {
            end += 1;
        }
        if end < src.len() && (src[end] == b'e' || src[end] == b'E') {
            let mut k = end + 1;
            if k < src.len() && (src[k] == b'+' || src[k] == b'-') {
                k += 1;
            }
            if k < src.len() && src[k].is_ascii_digit() {
                while k < src.len() && src[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = std::str::from_utf8(&src[start..end]).unwrap();
        let value: f64 = text.parse().map_err(|_| self.error("malformed number"))?;
        self.pos = end;
        if self.pos < src.len() && src[self.pos] == b'i' {
            self.pos += 1;
            return Ok(Const(Complex64::new(0.0, value)));
        }
        Ok(c(value))
    }
}

fn fmt_real(x: f64) -> String {
    if x < 0.0 {
        format!("-{}", -x)
    } else {
        format!("{x}")
    }
}

fn fmt_const(k: &Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (re, im) = (k.re, k.im);
    if im == 0.0 {
        if re < 0.0 {
            write!(f, "({})", fmt_real(re))
        } else {
            write!(f, "{}", re.abs())
        }
    } else if re == 0.0 {
        write!(f, "({}*i)", fmt_real(im))
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        write!(f, "({}{sign}{}*i)", fmt_real(re), im.abs())
    }
}

/// Fully parenthesized; parsing the output gives an evaluation-equivalent tree.
impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(k) => fmt_const(k, f),
            Z => write!(f, "z"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a}+{b})"),
            Sub(a, b) => write!(f, "({a}-{b})"),
            Mul(a, b) => write!(f, "({a}*{b})"),
            Div(a, b) => write!(f, "({a}/{b})"),
            Pow(a, n) if *n < 0 => write!(f, "({a}^({n}))"),
            Pow(a, n) => write!(f, "({a}^{n})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_simple_arithmetic() {
        let e = parse_rational("z").unwrap();
        assert_eq!(e.eval(cx(2.0, 1.0)), cx(2.0, 1.0));
        let e = parse_rational("z^2/(1+z)").unwrap();
        assert_eq!(e.eval(cx(1.0, 0.0)), cx(0.5, 0.0));
    }

    #[test]
    fn precedence_and_associativity() {
        let at = |s: &str, z: Complex64| parse_rational(s).unwrap().eval(z);
        let z = cx(3.0, 0.0);
        assert_eq!(at("1+2*z^2", z), cx(19.0, 0.0));
        assert_eq!(at("-z^2", z), cx(-9.0, 0.0));
        assert_eq!(at("8/2/2", z), cx(2.0, 0.0));
        assert_eq!(at("8-2-2", z), cx(4.0, 0.0));
        assert_eq!(at("(1+z)^-1", z), cx(0.25, 0.0));
        assert_eq!(at("2i*z", z), cx(0.0, 6.0));
        assert_eq!(at("1.5e1 + i", z), cx(15.0, 1.0));
    }

    #[test]
    fn derivatives_of_basic_forms() {
        let d = |s: &str, z: f64| parse_rational(s).unwrap().differentiate().eval(cx(z, 0.0));
        assert_eq!(d("(1-z^2)/2", 3.0), cx(-3.0, 0.0));
        assert_eq!(d("7", 1.0), cx(0.0, 0.0));
        assert_eq!(d("z^3", 2.0), cx(12.0, 0.0));
        assert_eq!(d("1/z", 2.0), cx(-0.25, 0.0));
    }

    #[test]
    fn complex_step_oracle_agrees() {
        // For analytic f, f'(z) ≈ (f(z + h) − f(z − h))/(2h) along any direction;
        // use a tiny imaginary step as in complex-step differentiation.
        let e = parse_rational("(1-z^2)/2").unwrap();
        let z = cx(3.0, 0.0);
        let h = 1e-20;
        let oracle = (e.eval(z + cx(0.0, h))).im / h;
        let symbolic = e.differentiate().eval(z).re;
        assert!((oracle - symbolic).abs() <= 1e-10);
        assert!((symbolic + 3.0).abs() <= 1e-12);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_rational("1 + * z") {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        match parse_rational("(z+1") {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        match parse_rational("z^1.5") {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_rational(""), Err(ExprError::Syntax { .. })));
        assert!(matches!(
            parse_rational("w"),
            Err(ExprError::Syntax { position: 0, .. })
        ));
    }

    #[test]
    fn vanishing_denominators_are_rejected() {
        assert!(matches!(
            parse_rational("1/(z-z)"),
            Err(ExprError::DivisionByZeroExpr { .. })
        ));
        assert!(matches!(
            parse_rational("(z*0)^-2"),
            Err(ExprError::DivisionByZeroExpr { .. })
        ));
        assert!(parse_rational("1/(z-1)").is_ok());
    }
}
