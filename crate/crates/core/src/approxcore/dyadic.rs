use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{rational_to_f64_directed, Rational};

/// `mantissa · 2^exponent`, kept canonical: mantissa odd, or zero with exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Dyadic {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// Exact value of a finite float; `None` for NaN or infinities.
    pub fn from_f64(x: f64) -> Option<Dyadic> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        Some(Dyadic::new(BigInt::from(m) * sign, e))
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::new(&self.mantissa << self.exponent as usize, BigInt::one())
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as usize)
        }
    }

    /// Directed conversion to a float.
    pub fn to_f64(&self, up: bool) -> f64 {
        rational_to_f64_directed(&self.to_rational(), up)
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        let e = self.exponent.min(o.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &o.mantissa << (o.exponent - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &o.mantissa, self.exponent + o.exponent)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_odd_or_zero(&self) -> bool {
        self.mantissa.is_zero() || self.mantissa.is_odd()
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        self.to_rational().cmp(&o.to_rational())
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

#[derive(Serialize, Deserialize)]
struct DyadicJson {
    m: String,
    e: i64,
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DyadicJson { m: self.mantissa.to_string(), e: self.exponent }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = DyadicJson::deserialize(d)?;
        let m: BigInt = j.m.parse().map_err(|_| de::Error::custom("bad dyadic mantissa"))?;
        Ok(Dyadic::new(m, j.e))
    }
}
