//! Orthonormal bases on the canonical square `(0, 1)²`.
//!
//! Trig factors are `√2 sin(nπx)`, `√2 cos(nπx)` (and `1` for the zeroth
//! cosine). The exponential basis is `e^{iπ(n x̃ + m ỹ)}` with
//! `x̃ = 2x − 1`, the polynomial-domain coordinate.

use serde::{Deserialize, Serialize};

use crate::approxcore::BoundedValue;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Sin,
    Cos,
}

impl Axis {
    pub fn flip(self) -> Axis {
        match self {
            Axis::Sin => Axis::Cos,
            Axis::Cos => Axis::Sin,
        }
    }

    /// Value of the normalized 1D factor at a canonical coordinate.
    pub fn eval(self, n: usize, x: BoundedValue) -> BoundedValue {
        let arg = BoundedValue::pi() * BoundedValue::from_i64(n as i64) * x;
        match (self, n) {
            (Axis::Cos, 0) => BoundedValue::ONE,
            (Axis::Sin, 0) => BoundedValue::ZERO,
            (Axis::Sin, _) => sqrt2() * arg.sin(),
            (Axis::Cos, _) => sqrt2() * arg.cos(),
        }
    }

    /// Whether index `n` carries a nonzero function.
    pub fn admits(self, n: usize) -> bool {
        !(self == Axis::Sin && n == 0)
    }
}

pub fn sqrt2() -> BoundedValue {
    BoundedValue::point(2.0).sqrt().expect("positive")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Trig(Axis, Axis),
    Exp,
}

impl Basis {
    pub const SIN_SIN: Basis = Basis::Trig(Axis::Sin, Axis::Sin);
    pub const SIN_COS: Basis = Basis::Trig(Axis::Sin, Axis::Cos);
    pub const COS_SIN: Basis = Basis::Trig(Axis::Cos, Axis::Sin);
    pub const COS_COS: Basis = Basis::Trig(Axis::Cos, Axis::Cos);

    pub fn name(self) -> &'static str {
        match self {
            Basis::Trig(Axis::Sin, Axis::Sin) => "sin-sin",
            Basis::Trig(Axis::Sin, Axis::Cos) => "sin-cos",
            Basis::Trig(Axis::Cos, Axis::Sin) => "cos-sin",
            Basis::Trig(Axis::Cos, Axis::Cos) => "cos-cos",
            Basis::Exp => "exp",
        }
    }

    pub fn parse(s: &str) -> Result<Basis> {
        Ok(match s {
            "sin-sin" => Basis::SIN_SIN,
            "sin-cos" => Basis::SIN_COS,
            "cos-sin" => Basis::COS_SIN,
            "cos-cos" => Basis::COS_COS,
            "exp" => Basis::Exp,
            _ => return Err(Error::Parse(format!("unknown basis {s:?}"))),
        })
    }

    pub fn is_exp(self) -> bool {
        self == Basis::Exp
    }

    /// Grid side length for a cutoff.
    pub fn side(self, cutoff: usize) -> usize {
        match self {
            Basis::Trig(..) => cutoff + 1,
            Basis::Exp => 2 * cutoff + 1,
        }
    }

    /// Signed mode index of a grid row or column.
    pub fn index(self, cutoff: usize, i: usize) -> i64 {
        match self {
            Basis::Trig(..) => i as i64,
            Basis::Exp => i as i64 - cutoff as i64,
        }
    }

    /// Grid position of a signed index, if inside the cutoff.
    pub fn position(self, cutoff: usize, n: i64) -> Option<usize> {
        match self {
            Basis::Trig(..) if n >= 0 && n as usize <= cutoff => Some(n as usize),
            Basis::Exp if n.unsigned_abs() as usize <= cutoff => Some((n + cutoff as i64) as usize),
            _ => None,
        }
    }

    /// Frequency scale per unit index: the derivative of a mode picks up
    /// `scale · n` in modulus (`π` for trig, `2π` for exp).
    pub fn freq_scale(self) -> BoundedValue {
        match self {
            Basis::Trig(..) => BoundedValue::pi(),
            Basis::Exp => BoundedValue::pi() * BoundedValue::point(2.0),
        }
    }

    /// `−Δ` eigenvalue of mode `(n, m)`.
    pub fn laplace_eigen(self, n: i64, m: i64) -> BoundedValue {
        let k = BoundedValue::from_i64(n * n + m * m);
        self.freq_scale().sqr() * k
    }

    /// Whether grid entry `(n, m)` is a nonzero basis function.
    pub fn admits(self, n: i64, m: i64) -> bool {
        match self {
            Basis::Trig(a, b) => a.admits(n as usize) && b.admits(m as usize),
            Basis::Exp => true,
        }
    }
}

impl Serialize for Basis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Basis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Basis::parse(&s).map_err(serde::de::Error::custom)
    }
}
