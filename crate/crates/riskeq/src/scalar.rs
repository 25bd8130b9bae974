//! Dual-mode arithmetic: exact rationals or 64-bit floats.
//!
//! Every real-valued quantity in the library is a [`Scalar`]. Exact mode is
//! lossless under `+ - * /` and integer powers; float mode carries the usual
//! IEEE semantics plus an explicit comparison tolerance ([`DEFAULT_TOL`]).
//! The two modes never mix: an expression combining an exact scalar with a
//! float scalar is a bug on the caller's side and panics loudly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default comparison tolerance for float-mode scalars.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Arithmetic mode shared by all scalars of one game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

/// A number in one of two modes: exact rational or binary float.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Scalar {
        Scalar::from_int(0, mode)
    }

    pub fn one(mode: Mode) -> Scalar {
        Scalar::from_int(1, mode)
    }

    pub fn from_int(v: i64, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Float => Scalar::Float(v as f64),
        }
    }

    /// `p/q` in the requested mode. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64, mode: Mode) -> Scalar {
        assert!(q != 0, "zero denominator");
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q))),
            Mode::Float => Scalar::Float(p as f64 / q as f64),
        }
    }

    pub fn from_rational(r: &BigRational, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(r.clone()),
            Mode::Float => Scalar::Float(r.to_f64().expect("rational out of f64 range")),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().expect("rational out of f64 range"),
            Scalar::Float(x) => *x,
        }
    }

    /// Exact rational value of this scalar. Every finite float is a rational,
    /// so this never loses information.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Float(x) => {
                BigRational::from_float(*x).expect("non-finite float has no rational value")
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(x) => x.is_finite(),
        }
    }

    /// Zero test: exact equality in exact mode, `|x| <= tol` in float mode.
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => x.abs() <= tol,
        }
    }

    /// Positivity test: `> 0` exactly in exact mode, `> tol` in float mode.
    pub fn is_positive_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > tol,
        }
    }

    /// Nonnegativity up to tolerance: `>= 0` exactly, or `>= -tol` in floats.
    pub fn is_nonnegative_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => !r.is_negative(),
            Scalar::Float(x) => *x >= -tol,
        }
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        (self - other).is_zero_tol(tol)
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// Integer power with the `0^0 = 1` convention.
    pub fn powi(&self, k: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                if k == 0 {
                    Scalar::Exact(BigRational::one())
                } else {
                    Scalar::Exact(r.pow(k as i32))
                }
            }
            Scalar::Float(x) => {
                if k == 0 {
                    Scalar::Float(1.0)
                } else {
                    Scalar::Float(x.powi(k as i32))
                }
            }
        }
    }

    /// Square root. Exact mode succeeds only on perfect squares of rationals.
    pub fn sqrt(&self) -> Result<Scalar> {
        self.nth_root(2)
    }

    /// `n`-th root for `n >= 1`. Exact mode succeeds only when the value is a
    /// perfect `n`-th power of a rational; float mode always succeeds on
    /// nonnegative inputs.
    pub fn nth_root(&self, n: u32) -> Result<Scalar> {
        assert!(n >= 1, "root order must be at least 1");
        if n == 1 {
            return Ok(self.clone());
        }
        match self {
            Scalar::Exact(r) => {
                if r.is_negative() {
                    return Err(Error::InvalidParameter(format!(
                        "{}-th root of negative value {r}",
                        n
                    )));
                }
                let num_root = r.numer().nth_root(n);
                let den_root = r.denom().nth_root(n);
                if &num_root.clone().pow(n) == r.numer() && &den_root.clone().pow(n) == r.denom() {
                    Ok(Scalar::Exact(BigRational::new(num_root, den_root)))
                } else {
                    Err(Error::InexactRoot(format!(
                        "{r} is not a perfect {n}-th power; use float mode"
                    )))
                }
            }
            Scalar::Float(x) => {
                if *x < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "{n}-th root of negative value {x}"
                    )));
                }
                Ok(Scalar::Float(if n == 2 { x.sqrt() } else { x.powf(1.0 / n as f64) }))
            }
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    fn binop(
        &self,
        other: &Scalar,
        fe: impl Fn(&BigRational, &BigRational) -> BigRational,
        ff: impl Fn(f64, f64) -> f64,
    ) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(fe(a, b)),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(ff(*a, *b)),
            _ => panic!("scalar mode mismatch: exact and float combined in one expression"),
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $fe:expr, $ff:expr) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.binop(rhs, $fe, $ff)
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).binop(&rhs, $fe, $ff)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).binop(rhs, $fe, $ff)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.binop(&rhs, $fe, $ff)
            }
        }
    };
}

impl_binop!(Add, add, |a, b| a + b, |a, b| a + b);
impl_binop!(Sub, sub, |a, b| a - b, |a, b| a - b);
impl_binop!(Mul, mul, |a, b| a * b, |a, b| a * b);
impl_binop!(Div, div, |a, b| a / b, |a, b| a / b);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => panic!("scalar mode mismatch: exact and float compared"),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            _ => panic!("scalar mode mismatch: exact and float compared"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `"p/q"` or an integer string into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim())
        .map_err(|e| Error::Parse(format!("invalid rational {s:?}: {e}")))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;
        impl<'de> Visitor<'de> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a \"p/q\" string (exact) or a number (float)")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                parse_rational(v).map(Scalar::Exact).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }
        }
        deserializer.deserialize_any(ScalarVisitor)
    }
}

/// Rational `p/q` from machine integers, for constant tables.
pub fn big_ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Smallest integer `c >= sqrt(x)` for a positive rational `x`.
pub fn ceil_sqrt(x: &BigRational) -> BigInt {
    assert!(x.is_positive(), "ceil_sqrt needs a positive argument");
    // Integer sqrt of ceil(x) gives a candidate near the answer; fix up by
    // direct comparison c^2 >= x.
    let ceil_int = x.ceil().to_integer();
    let mut c = ceil_int.sqrt();
    while BigRational::from_integer(c.clone() * c.clone()) < *x {
        c += BigInt::one();
    }
    while c > BigInt::one() {
        let smaller = c.clone() - BigInt::one();
        if BigRational::from_integer(smaller.clone() * smaller.clone()) >= *x {
            c = smaller;
        } else {
            break;
        }
    }
    c
}
