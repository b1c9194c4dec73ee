//! Vector fields in the pair basis: `u₁` on sin·cos modes, `u₂` on cos·sin modes.
//!
//! In this basis the divergence of mode `(n, m)` is `π(n A + m B)` times a
//! cos·cos mode, so solenoidal fields are those with `n A + m B = 0`
//! mode by mode.

use serde::{Deserialize, Serialize};

use super::basis::Basis;
use super::field::{hypot_up, FourierField};
use super::images::{coefficients, Source};
use crate::approxcore::{BoundedValue, Rational};
use crate::error::{Error, Result};
use crate::polyfield::MollifiedElement;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairField {
    u1: FourierField,
    u2: FourierField,
}

impl PairField {
    pub fn new(u1: FourierField, u2: FourierField) -> Result<PairField> {
        if u1.basis() != Basis::SIN_COS || u2.basis() != Basis::COS_SIN {
            return Err(Error::Precondition(format!(
                "pair fields need sin-cos and cos-sin components, got {} and {}",
                u1.basis().name(),
                u2.basis().name()
            )));
        }
        let c = u1.cutoff().max(u2.cutoff());
        let u1 = if u1.cutoff() == c { u1 } else { u1.with_cutoff(c) };
        let u2 = if u2.cutoff() == c { u2 } else { u2.with_cutoff(c) };
        Ok(PairField { u1, u2 })
    }

    pub fn zeros(cutoff: usize) -> PairField {
        PairField { u1: FourierField::zeros(Basis::SIN_COS, cutoff), u2: FourierField::zeros(Basis::COS_SIN, cutoff) }
    }

    /// The solenoidal mode `(−m, n)/√(n²+m²)`-direction with unit `L₂` norm,
    /// scaled by `amp`. Needs `n, m ≥ 1`.
    pub fn solenoidal_mode(cutoff: usize, n: i64, m: i64, amp: BoundedValue) -> Result<PairField> {
        if n < 1 || m < 1 || n as usize > cutoff || m as usize > cutoff {
            return Err(Error::Precondition(format!("solenoidal mode needs 1 ≤ n, m ≤ cutoff, got ({n}, {m})")));
        }
        let r = BoundedValue::from_i64(n * n + m * m).sqrt().expect("positive");
        let mut f = PairField::zeros(cutoff);
        f.u1.set(n, m, -(amp * BoundedValue::from_i64(m) / r), BoundedValue::ZERO)?;
        f.u2.set(n, m, amp * BoundedValue::from_i64(n) / r, BoundedValue::ZERO)?;
        Ok(f)
    }

    /// Spectral image of a dense-set element at a fixed cutoff.
    pub fn image(elem: &MollifiedElement, cutoff: usize) -> Result<PairField> {
        let u1 = coefficients(Source::of(elem, 0), Basis::SIN_COS, cutoff)?;
        let u2 = coefficients(Source::of(elem, 1), Basis::COS_SIN, cutoff)?;
        PairField::new(u1, u2)
    }

    /// Image with `L₂` uncertainty at most `2^{−k}`, doubling the cutoff from
    /// `start` up to `max_cutoff`.
    pub fn image_to_precision(elem: &MollifiedElement, k: u32, start: usize, max_cutoff: usize) -> Result<PairField> {
        let target = 2f64.powi(-(k as i32));
        let mut c = start.max(1);
        loop {
            let f = PairField::image(elem, c)?;
            if f.uncertainty() <= target {
                return Ok(f);
            }
            if c >= max_cutoff {
                return Err(Error::BudgetNotMet(format!("pair image uncertainty {:e} above 2^-{k} at cutoff {c}", f.uncertainty())));
            }
            c = (2 * c).min(max_cutoff);
        }
    }

    pub fn u1(&self) -> &FourierField {
        &self.u1
    }

    pub fn u2(&self) -> &FourierField {
        &self.u2
    }

    pub fn component(&self, i: usize) -> &FourierField {
        if i == 0 {
            &self.u1
        } else {
            &self.u2
        }
    }

    pub fn cutoff(&self) -> usize {
        self.u1.cutoff()
    }

    pub fn is_band_limited(&self) -> bool {
        self.u1.is_band_limited() && self.u2.is_band_limited()
    }

    /// `(A, B)` at mode `(n, m)`.
    pub fn coeffs(&self, n: i64, m: i64) -> (BoundedValue, BoundedValue) {
        (self.u1.re(n, m), self.u2.re(n, m))
    }

    pub fn set(&mut self, n: i64, m: i64, a: BoundedValue, b: BoundedValue) -> Result<()> {
        self.u1.set(n, m, a, BoundedValue::ZERO)?;
        self.u2.set(n, m, b, BoundedValue::ZERO)
    }

    /// Grid modes `(n, m)`, `0 ≤ n, m ≤ cutoff`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.u1.modes()
    }

    pub fn l2_norm(&self) -> BoundedValue {
        let (a, b) = (self.u1.l2_norm(), self.u2.l2_norm());
        (a.sqr() + b.sqr()).sqrt().expect("nonnegative")
    }

    /// `‖A^α u‖₂` with `A` diagonal, eigenvalue `π²(n²+m²)`.
    pub fn a_norm(&self, alpha: &Rational) -> Result<BoundedValue> {
        let (a, b) = (self.u1.a_norm(alpha)?, self.u2.a_norm(alpha)?);
        Ok((a.sqr() + b.sqr()).sqrt().expect("nonnegative"))
    }

    pub fn hs_norm(&self, s: &Rational) -> Result<BoundedValue> {
        let (a, b) = (self.u1.hs_norm(s)?, self.u2.hs_norm(s)?);
        Ok((a.sqr() + b.sqr()).sqrt().expect("nonnegative"))
    }

    pub fn uncertainty(&self) -> f64 {
        hypot_up(self.u1.uncertainty(), self.u2.uncertainty())
    }

    /// `L₂` bound of the discarded modes of both components.
    pub fn tail_l2(&self) -> f64 {
        hypot_up(self.u1.tail_l2, self.u2.tail_l2)
    }

    pub fn tail_for(&self, s: &Rational) -> Result<f64> {
        Ok(hypot_up(self.u1.tail_for(s)?, self.u2.tail_for(s)?))
    }

    pub fn center(&self) -> PairField {
        PairField { u1: self.u1.center(), u2: self.u2.center() }
    }

    pub fn with_cutoff(&self, cutoff: usize) -> PairField {
        PairField { u1: self.u1.with_cutoff(cutoff), u2: self.u2.with_cutoff(cutoff) }
    }

    pub fn add(&self, o: &PairField) -> Result<PairField> {
        PairField::new(self.u1.add(&o.u1)?, self.u2.add(&o.u2)?)
    }

    pub fn sub(&self, o: &PairField) -> Result<PairField> {
        PairField::new(self.u1.sub(&o.u1)?, self.u2.sub(&o.u2)?)
    }

    pub fn scale(&self, k: BoundedValue) -> PairField {
        PairField { u1: self.u1.scale(k), u2: self.u2.scale(k) }
    }

    /// Same real factor on both components of each mode.
    pub fn map_modes(&self, factor: impl Fn(i64, i64) -> BoundedValue, tail_gain: impl Fn(&Rational) -> Option<f64>) -> PairField {
        PairField { u1: self.u1.map_modes(&factor, &tail_gain), u2: self.u2.map_modes(&factor, &tail_gain) }
    }

    /// `n A + m B` per mode, a cos·cos grid; zero for solenoidal heads.
    pub fn divergence_coeffs(&self) -> FourierField {
        let mut d = FourierField::zeros(Basis::COS_COS, self.cutoff());
        for (n, m) in self.modes().collect::<Vec<_>>() {
            let (a, b) = self.coeffs(n, m);
            let v = BoundedValue::pi() * (BoundedValue::from_i64(n) * a + BoundedValue::from_i64(m) * b);
            d.set(n, m, v, BoundedValue::ZERO).expect("same grid");
        }
        d
    }

    /// Sup-norm bound of the head of both components (Wiener norm).
    pub fn wiener_head(&self) -> BoundedValue {
        self.u1.wiener_head().max(self.u2.wiener_head())
    }

    /// `L₂` inner product of the heads.
    pub fn dot_head(&self, o: &PairField) -> BoundedValue {
        let c = self.cutoff().min(o.cutoff());
        let mut acc = BoundedValue::ZERO;
        for n in 0..=c as i64 {
            for m in 0..=c as i64 {
                let (a, b) = self.coeffs(n, m);
                let (x, y) = o.coeffs(n, m);
                acc = acc + a * x + b * y;
            }
        }
        acc
    }

    /// Point value of the head.
    pub fn eval_head(&self, x: BoundedValue, y: BoundedValue) -> (BoundedValue, BoundedValue) {
        (self.u1.eval_head(x, y).0, self.u2.eval_head(x, y).0)
    }
}

#[derive(Deserialize)]
struct PairJson {
    u1: FourierField,
    u2: FourierField,
}

impl<'de> Deserialize<'de> for PairField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PairJson::deserialize(d)?;
        PairField::new(j.u1, j.u2).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::enumerate_solenoidal_polys;
    use num_bigint::BigUint;

    #[test]
    fn solenoidal_mode_has_unit_norm_and_no_divergence() {
        let f = PairField::solenoidal_mode(3, 2, 1, BoundedValue::ONE).unwrap();
        assert!(f.l2_norm().inflate(1e-15).contains(1.0));
        for (n, m) in f.modes().collect::<Vec<_>>() {
            assert!(f.divergence_coeffs().re(n, m).contains(0.0));
        }
    }

    #[test]
    fn image_of_dense_element_is_solenoidal_within_enclosures() {
        let p = enumerate_solenoidal_polys(&BigUint::from(9u32));
        let elem = MollifiedElement::new(p, 1, 2).unwrap();
        let f = PairField::image(&elem, 6).unwrap();
        let d = f.divergence_coeffs();
        for (n, m) in d.modes().collect::<Vec<_>>() {
            assert!(d.re(n, m).contains(0.0), "({n},{m}) {:?}", d.re(n, m));
        }
        assert!(f.tail_l2() > 0.0);
    }

    #[test]
    fn json_round_trip() {
        let f = PairField::solenoidal_mode(2, 1, 1, BoundedValue::point(0.5)).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: PairField = serde_json::from_str(&s).unwrap();
        assert!(g.coeffs(1, 1).0.contains_interval(&f.coeffs(1, 1).0));
        assert!(serde_json::from_str::<PairField>(&s.replace("cos-sin", "sin-sin")).is_err());
    }
}
