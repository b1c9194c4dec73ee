//! Names of Sobolev functions on the square, with certified differentiation
//! and multiplication.
//!
//! An approximant is a band-limited field with coefficient enclosures, an
//! orthogonal tail and a non-orthogonal `H^s` slack; its midpoint expansion is
//! within [`Approximant::distance_bound`] of the named function.

use super::basis::Basis;
use super::field::FourierField;
use super::images::{coefficients, SeparableSum, Source};
use super::ops::{derivative, multiply_heads, product_basis};
use crate::approxcore::{BoundedValue, ConstantsTable, Name, Rational};
use crate::error::{Error, Result};
use crate::polyfield::RationalPoly2;

#[derive(Clone, Debug)]
pub struct Approximant {
    pub field: FourierField,
    /// `H^s` distance not captured by the field's own enclosures.
    pub slack: f64,
}

impl Approximant {
    pub fn exact(field: FourierField) -> Approximant {
        Approximant { field, slack: 0.0 }
    }

    /// Bound on the `H^s` distance from the named function to the midpoint expansion.
    pub fn distance_bound(&self, s: &Rational) -> Result<f64> {
        let u = self.field.hs_uncertainty(s)?;
        Ok((BoundedValue::point(u) + BoundedValue::point(self.slack)).hi())
    }

    pub fn center(&self) -> FourierField {
        self.field.center()
    }
}

/// Owned description of a function whose spectral image can be computed.
#[derive(Clone, Debug)]
pub enum SourceSpec {
    Trimmed { poly: RationalPoly2, k: u32 },
    Mollified { poly: RationalPoly2, k: u32, n: u32 },
    Separable { sum: SeparableSum, quad_target: f64 },
}

impl SourceSpec {
    pub fn as_source(&self) -> Source<'_> {
        match self {
            SourceSpec::Trimmed { poly, k } => Source::Trimmed { poly, k: *k },
            SourceSpec::Mollified { poly, k, n } => Source::Mollified { poly, k: *k, n: *n },
            SourceSpec::Separable { sum, quad_target } => Source::Separable { sum, quad_target: *quad_target },
        }
    }
}

/// A name of `w ∈ H^s`: `approx(k)` has distance bound at most `2^{−k}`
/// whenever the underlying budgets can be met, and reports why otherwise.
#[derive(Clone, Debug)]
pub struct SobolevName {
    s: Rational,
    basis: Basis,
    norm_bound: f64,
    approx: Name<Result<Approximant>>,
}

fn eps(k: u32) -> f64 {
    2f64.powi(-(k as i32))
}

impl SobolevName {
    /// Name from an explicit sequence of approximants and an `H^s` norm bound.
    pub fn from_sequence(
        s: Rational,
        basis: Basis,
        norm_bound: f64,
        approx: impl Fn(u32) -> Result<Approximant> + Send + Sync + 'static,
    ) -> SobolevName {
        SobolevName { s, basis, norm_bound, approx: Name::new(approx) }
    }

    pub fn zero(basis: Basis, s: Rational) -> SobolevName {
        SobolevName { s, basis, norm_bound: 0.0, approx: Name::exact(Ok(Approximant::exact(FourierField::zeros(basis, 0)))) }
    }

    /// The constant function 1 (the zeroth cos·cos mode).
    pub fn one(s: Rational) -> SobolevName {
        let f = FourierField::mode(Basis::COS_COS, 0, 0, 0, BoundedValue::ONE).expect("admissible");
        SobolevName::band_limited(f, s).expect("band-limited")
    }

    /// Name of a band-limited field; every approximant is the field itself.
    pub fn band_limited(f: FourierField, s: Rational) -> Result<SobolevName> {
        if !f.is_band_limited() {
            return Err(Error::Precondition("field has a tail; use a source-backed name".into()));
        }
        let norm_bound = f.hs_norm(&s)?.hi();
        let basis = f.basis();
        Ok(SobolevName { s, basis, norm_bound, approx: Name::exact(Ok(Approximant::exact(f))) })
    }

    /// Name of a computable source: cutoffs double from `start` until the
    /// `H^s` distance bound meets `2^{−k}`, up to `max_cutoff`.
    pub fn from_source(spec: SourceSpec, basis: Basis, s: Rational, start: usize, max_cutoff: usize) -> Result<SobolevName> {
        let first = coefficients(spec.as_source(), basis, start.max(1))?;
        let norm_bound = first.hs_norm(&s)?.hi();
        let s2 = s.clone();
        let approx = move |k: u32| -> Result<Approximant> {
            let mut c = start.max(1);
            loop {
                let f = coefficients(spec.as_source(), basis, c)?;
                let d = f.hs_uncertainty(&s2)?;
                if d <= eps(k) {
                    return Ok(Approximant::exact(f));
                }
                if c >= max_cutoff {
                    return Err(Error::BudgetNotMet(format!("H^{s2} distance {d:e} above 2^-{k} at cutoff {c}")));
                }
                c = (2 * c).min(max_cutoff);
            }
        };
        Ok(SobolevName { s, basis, norm_bound, approx: Name::new(approx) })
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Upper bound on `‖w‖_{H^s}`.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn approx(&self, k: u32) -> Result<Approximant> {
        self.approx.refine(k)
    }

    /// Approximant whose distance bound is checked against `2^{−k}`.
    pub fn approx_checked(&self, k: u32) -> Result<Approximant> {
        let a = self.approx(k)?;
        let d = a.distance_bound(&self.s)?;
        if d > eps(k) {
            return Err(Error::BudgetNotMet(format!("approximant {k} has H^{} distance bound {d:e}", self.s)));
        }
        Ok(a)
    }

    /// Same function viewed in a weaker space `H^t`, `t ≤ s`.
    pub fn weaken(&self, t: Rational) -> Result<SobolevName> {
        if t > self.s || t.is_negative() {
            return Err(Error::Precondition(format!("cannot weaken H^{} to H^{t}", self.s)));
        }
        Ok(SobolevName { s: t, basis: self.basis, norm_bound: self.norm_bound, approx: self.approx.clone() })
    }
}

/// `∂w/∂x` (`axis = 0`) or `∂w/∂y` (`axis = 1`) as a name in `H^{s−1}`.
///
/// Approximant `k` is the exact derivative of approximant `k + 2` of `w`;
/// the derivative costs at most the frequency scale (`π` or `2π`) in the
/// distance, so two (three for exp) extra bits keep the bound at `2^{−k}`.
pub fn differentiate(w: &SobolevName, axis: usize) -> Result<SobolevName> {
    let one = Rational::one();
    if w.s < one {
        return Err(Error::Precondition(format!("differentiation needs s ≥ 1, got {}", w.s)));
    }
    if axis > 1 {
        return Err(Error::Precondition(format!("axis must be 0 or 1, got {axis}")));
    }
    let shift = if w.basis.is_exp() { 3 } else { 2 };
    let fs = w.basis.freq_scale();
    let src = w.clone();
    let approx = move |k: u32| -> Result<Approximant> {
        let a = src.approx(k + shift)?;
        let field = derivative(&a.field, axis)?;
        Ok(Approximant { field, slack: (fs * BoundedValue::point(a.slack)).hi() })
    };
    let basis = derivative(&FourierField::zeros(w.basis, 0), axis)?.basis();
    let norm_bound = (fs * BoundedValue::point(w.norm_bound)).hi();
    Ok(SobolevName { s: &w.s - &one, basis, norm_bound, approx: Name::new(approx) })
}

/// `C_s`: `‖f‖_∞ ≤ C_s ‖f‖_{H^s}` for `s > 1`, any of the bases.
fn sup_constant(s: &Rational) -> Result<BoundedValue> {
    Ok(ConstantsTable::default_table().c_s(s)?.value)
}

/// `v · w` as an `L₂` name, `v ∈ H^s` with `s > 1`, `w ∈ L₂`.
///
/// Approximant `n` is `p_m q_k` with `k` chosen so that `C_s ‖v‖ 2^{−k} ≤ 2^{−(n+2)}`
/// and then `m` so that `‖q_k‖_∞ 2^{−m} ≤ 2^{−(n+2)}`.
pub fn multiply(v: &SobolevName, w: &SobolevName) -> Result<SobolevName> {
    if v.s <= Rational::one() {
        return Err(Error::Precondition(format!("multiplication needs s > 1, got {}", v.s)));
    }
    let basis = product_basis(v.basis, w.basis)?;
    let cs = sup_constant(&v.s)?;
    let v_sup = (cs * BoundedValue::point(v.norm_bound)).hi();
    let norm_bound = (BoundedValue::point(v_sup) * BoundedValue::point(w.norm_bound)).hi();
    let (v, w) = (v.clone(), w.clone());
    let approx = move |n: u32| -> Result<Approximant> {
        let k = bits_for(v_sup, n + 2);
        let q = w.approx(k)?;
        let q_unc = q.distance_bound(&w.s)?;
        let qc = q.center();
        let q_sup = qc.wiener_head().hi();
        let m = bits_for(q_sup, n + 2);
        let p = v.approx(m)?;
        let p_unc = p.distance_bound(&v.s)?;
        let pc = p.center();
        let field = multiply_heads(&pc, &qc)?;
        // ‖vw − p̃q̃‖ ≤ ‖v‖_∞ ‖w − q̃‖ + ‖v − p̃‖₂ ‖q̃‖_∞
        let slack = BoundedValue::point(v_sup) * BoundedValue::point(q_unc) + BoundedValue::point(p_unc) * BoundedValue::point(q_sup);
        Ok(Approximant { field, slack: slack.hi() })
    };
    Ok(SobolevName { s: Rational::zero(), basis, norm_bound, approx: Name::new(approx) })
}

/// Smallest `k` with `c · 2^{−k} ≤ 2^{−n}`.
fn bits_for(c: f64, n: u32) -> u32 {
    if c <= 1.0 {
        return n;
    }
    n + c.log2().ceil() as u32 + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::trim::trim_scale;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    /// `(1 − x²)(1 − y²) q(x, y)` on the polynomial square: vanishes on its boundary.
    fn bubble(q: &RationalPoly2) -> RationalPoly2 {
        let one_minus = |axis: usize| {
            let t = if axis == 0 { (2, 0) } else { (0, 2) };
            RationalPoly2::from_terms(&[(0, 0, Rational::one()), (t.0, t.1, -Rational::one())])
        };
        one_minus(0).mul(&one_minus(1)).mul(q)
    }

    fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> RationalPoly2 {
        let mut terms = Vec::new();
        for i in 0..=deg {
            for j in 0..=deg - i {
                terms.push((i, j, r(rng.gen_range(-4..=4), 4)));
            }
        }
        RationalPoly2::from_terms(&terms)
    }

    #[test]
    fn zero_name_differentiates_to_zero() {
        let z = SobolevName::zero(Basis::SIN_SIN, Rational::one());
        let d = differentiate(&z, 0).unwrap();
        let a = d.approx(5).unwrap();
        assert!(a.field.l2_norm().contains(0.0) && a.field.l2_norm().hi() == 0.0);
    }

    #[test]
    fn derivative_of_polynomial_name_matches_symbolic_derivative() {
        let p = bubble(&RationalPoly2::from_terms(&[(1, 0, r(1, 2)), (0, 1, r(-1, 3))]));
        let k = 2;
        let w = SobolevName::from_source(SourceSpec::Trimmed { poly: p.clone(), k }, Basis::SIN_SIN, Rational::one(), 8, 64).unwrap();
        let d = differentiate(&w, 0).unwrap();
        // the trim edge is a kink, so H¹ tails decay slowly; stay at a coarse level
        let a = d.approx(0).unwrap();
        let c = a.field.cutoff();
        // ∂_{x'} of p(x/s) on the canonical square is (2/s) (∂_x p)(x/s)
        let s = BoundedValue::from_rational(&trim_scale(k));
        let want = coefficients(Source::Trimmed { poly: &p.dx(), k }, Basis::COS_SIN, c).unwrap();
        let factor = BoundedValue::point(2.0) / s;
        for (n, m) in want.modes().collect::<Vec<_>>() {
            assert!(a.field.re(n, m).overlaps(&(want.re(n, m) * factor)), "({n},{m})");
        }
    }

    #[test]
    fn band_limited_derivative_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut f = FourierField::zeros(Basis::Exp, 3);
        for (n, m) in f.modes().collect::<Vec<_>>() {
            f.set(n, m, BoundedValue::point(rng.gen_range(-1.0..1.0)), BoundedValue::point(rng.gen_range(-1.0..1.0))).unwrap();
        }
        let w = SobolevName::band_limited(f.clone(), r(3, 2)).unwrap();
        let d = differentiate(&w, 1).unwrap().approx(10).unwrap().field;
        let tau = 2.0 * std::f64::consts::PI;
        for (n, m) in f.modes().collect::<Vec<_>>() {
            let (a, b) = f.coeff(n, m);
            let (x, y) = d.coeff(n, m);
            // multiplication by 2πi m
            assert!(x.inflate(1e-14).contains(-b.mid() * tau * m as f64));
            assert!(y.inflate(1e-14).contains(a.mid() * tau * m as f64));
        }
    }

    #[test]
    fn approximation_bound_on_band_limited_names() {
        // name of a band-limited field through truncations of growing cutoff
        let mut f = FourierField::zeros(Basis::SIN_SIN, 16);
        for n in 1..=16i64 {
            for m in 1..=16i64 {
                let v = 1.0 / ((n * n + m * m) as f64).powi(3);
                f.set(n, m, BoundedValue::point(v), BoundedValue::ZERO).unwrap();
            }
        }
        let full = f.clone();
        let one = Rational::one();
        let w = SobolevName::from_sequence(one.clone(), Basis::SIN_SIN, full.hs_norm(&one).unwrap().hi(), move |k| {
            for c in 1..=16 {
                let t = full.with_cutoff(c);
                if t.hs_uncertainty(&Rational::one())? <= 2f64.powi(-(k as i32)) {
                    return Ok(Approximant::exact(t));
                }
            }
            Ok(Approximant::exact(full.clone()))
        });
        let exact_dx = derivative(&f, 0).unwrap();
        for k in 0..8 {
            let a = w.approx(k).unwrap();
            let da = derivative(&a.center(), 0).unwrap().with_cutoff(16);
            let diff = exact_dx.sub(&da).unwrap();
            let bound = std::f64::consts::PI * 2f64.powi(-(k as i32));
            assert!(diff.l2_norm().hi() <= bound * (1.0 + 1e-12), "k = {k}");
        }
    }

    #[test]
    fn sup_embedding_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = r(6, 5);
        let cs = sup_constant(&s).unwrap();
        for _ in 0..5 {
            let mut f = FourierField::zeros(Basis::SIN_COS, 4);
            for (n, m) in f.modes().collect::<Vec<_>>() {
                if n > 0 {
                    f.set(n, m, BoundedValue::point(rng.gen_range(-1.0..1.0)), BoundedValue::ZERO).unwrap();
                }
            }
            let bound = (cs * f.hs_norm(&s).unwrap()).hi();
            let mut sup: f64 = 0.0;
            for i in 0..=40 {
                for j in 0..=40 {
                    let v = f.eval_head(BoundedValue::point(i as f64 / 40.0), BoundedValue::point(j as f64 / 40.0)).0;
                    sup = sup.max(v.mag());
                }
            }
            assert!(sup <= bound, "{sup} > {bound}");
        }
    }

    #[test]
    fn hs_norm_is_order_independent_up_to_rounding() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut f = FourierField::zeros(Basis::COS_SIN, 5);
        for (n, m) in f.modes().collect::<Vec<_>>() {
            if m > 0 {
                f.set(n, m, BoundedValue::point(rng.gen_range(-1.0..1.0)), BoundedValue::ZERO).unwrap();
            }
        }
        let s = r(3, 2);
        let direct = f.hs_norm(&s).unwrap();
        let mut modes: Vec<(i64, i64)> = f.modes().collect();
        for i in (1..modes.len()).rev() {
            modes.swap(i, rng.gen_range(0..=i));
        }
        let mut acc = BoundedValue::ZERO;
        for (n, m) in modes {
            acc = acc + super::super::field::sobolev_weight(n, m, &s) * f.re(n, m).sqr();
        }
        let shuffled = acc.sqrt().unwrap();
        assert!(direct.overlaps(&shuffled));
        assert!((direct.mid() - shuffled.mid()).abs() <= 1e-13 * direct.mid());
    }

    #[test]
    fn multiply_by_one_reproduces_w() {
        let mut f = FourierField::zeros(Basis::SIN_SIN, 3);
        f.set(1, 2, BoundedValue::point(0.75), BoundedValue::ZERO).unwrap();
        f.set(3, 1, BoundedValue::point(-0.5), BoundedValue::ZERO).unwrap();
        let w = SobolevName::band_limited(f.clone(), Rational::zero()).unwrap();
        let prod = multiply(&SobolevName::one(r(3, 2)), &w).unwrap();
        assert_eq!(prod.basis(), Basis::SIN_SIN);
        for n in [2u32, 6, 12] {
            let a = prod.approx(n).unwrap();
            let diff = a.field.with_cutoff(3).sub(&f).unwrap();
            assert!(diff.l2_norm().hi() + a.slack <= 2f64.powi(-(n as i32)));
        }
    }

    #[test]
    fn multiply_by_zero_is_zero() {
        let w = SobolevName::zero(Basis::COS_SIN, Rational::zero());
        let v = SobolevName::one(r(3, 2));
        let a = multiply(&v, &w).unwrap().approx(4).unwrap();
        assert_eq!(a.field.l2_norm().hi(), 0.0);
    }

    #[test]
    fn multiply_rejects_low_smoothness() {
        let v = SobolevName::one(Rational::one());
        let w = SobolevName::zero(Basis::COS_SIN, Rational::zero());
        assert_eq!(multiply(&v, &w).unwrap_err().kind(), "precondition");
        assert_eq!(differentiate(&SobolevName::zero(Basis::SIN_SIN, r(1, 2)), 0).unwrap_err().kind(), "precondition");
    }

    #[test]
    fn product_of_mollified_names_against_finer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let k = 2;
        let pv = bubble(&random_poly(&mut rng, 1));
        let pw = bubble(&random_poly(&mut rng, 2));
        let v = SobolevName::from_source(SourceSpec::Mollified { poly: pv, k, n: 3 }, Basis::SIN_SIN, r(6, 5), 8, 64).unwrap();
        let w = SobolevName::from_source(SourceSpec::Mollified { poly: pw, k, n: 3 }, Basis::SIN_SIN, Rational::zero(), 8, 64).unwrap();
        let prod = multiply(&v, &w).unwrap();
        assert_eq!(prod.basis(), Basis::COS_COS);
        let n = 1;
        let a = prod.approx(n).unwrap();
        let bound = a.distance_bound(&Rational::zero()).unwrap();
        assert!(bound <= 2f64.powi(-(n as i32)), "{bound}");
        // two approximants of the same product are within the sum of their bounds
        let b = prod.approx(n + 1).unwrap();
        let fine_bound = b.distance_bound(&Rational::zero()).unwrap();
        let c = b.field.cutoff().max(a.field.cutoff());
        let diff = b.center().with_cutoff(c).sub(&a.center().with_cutoff(c)).unwrap();
        assert!(diff.l2_norm().lo() <= bound + fine_bound);
    }
}
