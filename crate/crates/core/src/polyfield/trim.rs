//! Rescale-and-cutoff of a solenoidal polynomial pair into `Ω_k`.

use super::poly::{BoundedPoly2, PolyPair};
use super::solenoidal::SolenoidalPolyPair;
use crate::approxcore::{BoundedValue, Rational};
use crate::error::{Error, Result};

/// `p(x/s, y/s)` on `[−s, s]²`, zero outside, `s = 1 − 2^{−k}`.
#[derive(Clone, Debug)]
pub struct TrimmedField {
    base: SolenoidalPolyPair,
    k: u32,
    s: Rational,
    scaled: PolyPair,
    bounded: [BoundedPoly2; 2],
}

/// `1 − 2^{−k}`.
pub fn trim_scale(k: u32) -> Rational {
    Rational::one() - Rational::pow2(-(k as i64))
}

pub fn trim(p: &SolenoidalPolyPair, k: u32) -> Result<TrimmedField> {
    if k == 0 {
        return Err(Error::Precondition("trim needs k ≥ 1".into()));
    }
    let s = trim_scale(k);
    let scaled = PolyPair::new(p.p1.rescale(&s), p.p2.rescale(&s));
    let bounded = [scaled.p1.to_bounded(), scaled.p2.to_bounded()];
    Ok(TrimmedField { base: p.clone(), k, s, scaled, bounded })
}

impl TrimmedField {
    pub fn base(&self) -> &SolenoidalPolyPair {
        &self.base
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Half-width `s` of the support box.
    pub fn s(&self) -> &Rational {
        &self.s
    }

    /// The rescaled polynomial, valid inside the support box.
    pub fn scaled(&self) -> &PolyPair {
        &self.scaled
    }

    pub fn bounded(&self, c: usize) -> &BoundedPoly2 {
        &self.bounded[c]
    }

    pub fn inside(&self, x: &Rational, y: &Rational) -> bool {
        x.abs() <= self.s && y.abs() <= self.s
    }

    /// Exact value at a rational point.
    pub fn eval(&self, x: &Rational, y: &Rational) -> [Rational; 2] {
        if !self.inside(x, y) {
            return [Rational::zero(), Rational::zero()];
        }
        [self.scaled.p1.eval(x, y), self.scaled.p2.eval(x, y)]
    }

    /// Enclosure over a box. Boxes meeting the cut edge get `hull(·, 0)`.
    pub fn eval_bounded(&self, x: BoundedValue, y: BoundedValue) -> [BoundedValue; 2] {
        let s = BoundedValue::from_rational(&self.s);
        let box_s = BoundedValue::new(-s.lo(), s.lo());
        let inner = (|| Some((x.intersect(BoundedValue::new(-s.hi(), s.hi()))?, y.intersect(BoundedValue::new(-s.hi(), s.hi()))?)))();
        let Some((xi, yi)) = inner else {
            return [BoundedValue::ZERO; 2];
        };
        let certain = box_s.contains_interval(&x) && box_s.contains_interval(&y);
        let mut out = [self.bounded[0].eval(xi, yi), self.bounded[1].eval(xi, yi)];
        if !certain {
            for v in out.iter_mut() {
                *v = v.hull(BoundedValue::ZERO);
            }
        }
        out
    }

    /// Uniform bound `Σ |a|` of the base polynomial, which also bounds the trimmed field.
    pub fn sup_bound(&self, c: usize) -> Rational {
        self.base.component(c).abs_sum()
    }
}
