//! Divergence-free, boundary-free polynomial fields and their enumeration.

use std::ops::Deref;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::linalg::{constraint_matrix, kernel_basis_int};
use super::poly::PolyPair;
use crate::approxcore::Rational;
use crate::error::{Error, Result};

/// Smallest degree with a nontrivial kernel: the stream function must carry
/// a `(1−x²)²(1−y²)²` factor.
pub const MIN_KERNEL_DEGREE: usize = 4;

/// A polynomial pair satisfying the divergence and boundary constraints exactly.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct SolenoidalPolyPair(PolyPair);

impl SolenoidalPolyPair {
    pub fn new(p: PolyPair) -> Result<SolenoidalPolyPair> {
        if !check_solenoidal(&p) {
            return Err(Error::Precondition("polynomial pair violates the solenoidal constraints".into()));
        }
        Ok(SolenoidalPolyPair(p))
    }

    pub fn zero() -> SolenoidalPolyPair {
        SolenoidalPolyPair(PolyPair::zero())
    }

    pub fn pair(&self) -> &PolyPair {
        &self.0
    }

    pub fn scale(&self, k: &Rational) -> SolenoidalPolyPair {
        SolenoidalPolyPair(self.0.scale(k))
    }

    pub fn add(&self, o: &SolenoidalPolyPair) -> SolenoidalPolyPair {
        SolenoidalPolyPair(self.0.add(&o.0))
    }
}

impl Deref for SolenoidalPolyPair {
    type Target = PolyPair;
    fn deref(&self) -> &PolyPair {
        &self.0
    }
}

impl Serialize for SolenoidalPolyPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SolenoidalPolyPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = PolyPair::deserialize(d)?;
        SolenoidalPolyPair::new(p).map_err(de::Error::custom)
    }
}

/// Exact zero test of every row of the constraint system.
pub fn check_solenoidal(p: &PolyPair) -> bool {
    let n = p.degree();
    constraint_matrix(n).apply(&p.to_vector(n)).iter().all(|v| v.is_zero())
}

/// Kernel basis of degree `n` as polynomial pairs.
pub fn kernel_pairs(n: usize) -> Vec<PolyPair> {
    kernel_basis_int(&constraint_matrix(n)).iter().map(|v| PolyPair::from_vector(n, v)).collect()
}

/// Cantor pairing.
pub fn pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

fn unpack(c: &BigUint, d: usize) -> Vec<BigUint> {
    match d {
        0 => vec![],
        1 => vec![c.clone()],
        _ => {
            let (x, rest) = unpair(c);
            let mut v = vec![x];
            v.extend(unpack(&rest, d - 1));
            v
        }
    }
}

fn pack(v: &[BigUint]) -> BigUint {
    match v.len() {
        0 => BigUint::zero(),
        1 => v[0].clone(),
        _ => pair(&v[0], &pack(&v[1..])),
    }
}

/// Calkin–Wilf enumeration of the positive rationals, `1 ↦ 1`.
fn calkin_wilf(n: &BigUint) -> Rational {
    let bits = n.bits();
    let mut a = BigInt::one();
    let mut b = BigInt::one();
    for k in (0..bits.saturating_sub(1)).rev() {
        if n.bit(k) {
            a = &a + &b;
        } else {
            b = &a + &b;
        }
    }
    Rational::new(a, b)
}

fn calkin_wilf_index(r: &Rational) -> BigUint {
    let mut a: BigUint = r.numer().to_biguint().expect("positive");
    let mut b: BigUint = r.denom().to_biguint().expect("positive");
    let mut bits: Vec<(bool, BigUint)> = Vec::new();
    while !(a.is_one() && b.is_one()) {
        if a < b {
            let (mut q, rem) = b.div_rem(&a);
            if rem.is_zero() {
                q -= 1u32;
            }
            b -= &q * &a;
            bits.push((false, q));
        } else {
            let (mut q, rem) = a.div_rem(&b);
            if rem.is_zero() {
                q -= 1u32;
            }
            a -= &q * &b;
            bits.push((true, q));
        }
    }
    let mut n = BigUint::one();
    for (bit, q) in bits.into_iter().rev() {
        let q = q.to_u64().expect("run length fits");
        for _ in 0..q {
            n = (n << 1u32) + if bit { 1u32 } else { 0u32 };
        }
    }
    n
}

/// `0 ↦ 0`, odd `k ↦ +cw((k+1)/2)`, even `k ↦ −cw(k/2)`.
pub fn nat_to_rational(k: &BigUint) -> Rational {
    if k.is_zero() {
        return Rational::zero();
    }
    if k.is_odd() {
        calkin_wilf(&((k + 1u32) / 2u32))
    } else {
        -calkin_wilf(&(k / 2u32))
    }
}

pub fn rational_to_nat(r: &Rational) -> BigUint {
    if r.is_zero() {
        BigUint::zero()
    } else if r.is_positive() {
        calkin_wilf_index(r) * 2u32 - 1u32
    } else {
        calkin_wilf_index(&r.abs()) * 2u32
    }
}

/// Total enumeration of the rational kernel points of every degree.
///
/// Index 0 is the zero field. Index `i ≥ 1` unpairs `i − 1` into a degree
/// offset and a coordinate code; the code is unpacked into one rational per
/// kernel basis vector of that degree.
pub fn enumerate_solenoidal_polys(index: &BigUint) -> SolenoidalPolyPair {
    if index.is_zero() {
        return SolenoidalPolyPair::zero();
    }
    let (r, code) = unpair(&(index - 1u32));
    let n = MIN_KERNEL_DEGREE + r.to_usize().expect("degree offset fits in usize");
    let basis = kernel_pairs(n);
    let coords = unpack(&code, basis.len());
    let mut acc = PolyPair::zero();
    for (b, c) in basis.iter().zip(&coords) {
        acc = acc.add(&b.scale(&nat_to_rational(c)));
    }
    SolenoidalPolyPair(acc)
}

/// An index at which [`enumerate_solenoidal_polys`] returns `q`.
pub fn index_of(q: &SolenoidalPolyPair) -> BigUint {
    if q.is_zero() {
        return BigUint::zero();
    }
    let n = q.degree().max(MIN_KERNEL_DEGREE);
    let cm = constraint_matrix(n);
    let basis = kernel_basis_int(&cm);
    let v = q.to_vector(n);
    // Each basis vector is the only one nonzero at its own free column.
    let mut coords = Vec::with_capacity(basis.len());
    for b in &basis {
        let f = b.iter().position(|x| !x.is_zero()).expect("nonzero basis vector");
        let free = (0..b.len()).find(|&c| !b[c].is_zero() && basis.iter().filter(|o| !o[c].is_zero()).count() == 1);
        let f = free.unwrap_or(f);
        coords.push(rational_to_nat(&(&v[f] / &b[f])));
    }
    let r = BigUint::from(n - MIN_KERNEL_DEGREE);
    pair(&r, &pack(&coords)) + 1u32
}

pub fn enumerate_u64(index: u64) -> SolenoidalPolyPair {
    enumerate_solenoidal_polys(&BigUint::from(index))
}
