//! `γ_n ∗ Trim_k p`: point evaluation by shell integrals, support, and the
//! approximation defect against the untrimmed polynomial.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{BoundedPoly2, PolyPairJson};
use super::solenoidal::SolenoidalPolyPair;
use super::trim::{trim, trim_scale, TrimmedField};
use crate::approxcore::special::bump_jet;
use crate::approxcore::{integrate, integrate_with_breaks, BoundedValue, ConstantsTable, Jet, QuadConfig, Rational};
use crate::error::{Error, Result};

/// An element of the dense set: the mollified, trimmed polynomial pair.
///
/// The mollifier is `γ(z) = γ₀ exp(−1/(1−‖z‖∞²))` on the unit max-norm ball,
/// scaled as `γ_n(z) = 4ⁿ γ(2ⁿ z)`.
#[derive(Clone, Debug)]
pub struct MollifiedElement {
    trimmed: TrimmedField,
    n: u32,
}

impl PartialEq for MollifiedElement {
    fn eq(&self, o: &Self) -> bool {
        self.base() == o.base() && self.k() == o.k() && self.n == o.n
    }
}

pub fn mollify(p: &SolenoidalPolyPair, k: u32, n: u32) -> Result<MollifiedElement> {
    MollifiedElement::new(p.clone(), k, n)
}

struct Shell<'a> {
    anti_x: [BoundedPoly2; 2],
    anti_y: [BoundedPoly2; 2],
    s: BoundedValue,
    crude: [f64; 2],
    point: (BoundedValue, BoundedValue),
    _t: &'a TrimmedField,
}

impl<'a> Shell<'a> {
    fn new(t: &'a TrimmedField, x: f64, y: f64) -> Shell<'a> {
        let sc = t.scaled();
        let crude = [0, 1].map(|c| BoundedValue::from_rational(&t.sup_bound(c)).hi());
        Shell {
            anti_x: [sc.p1.antideriv_x().to_bounded(), sc.p2.antideriv_x().to_bounded()],
            anti_y: [sc.p1.antideriv_y().to_bounded(), sc.p2.antideriv_y().to_bounded()],
            s: BoundedValue::from_rational(t.s()),
            crude,
            point: (BoundedValue::point(x), BoundedValue::point(y)),
            _t: t,
        }
    }

    /// `∫_{[a,b] ∩ [−s,s]} Q'(fixed, τ) dτ` along one edge, `None` when the
    /// clipping pattern is not decided over the jet's range.
    fn edge(&self, anti: &BoundedPoly2, fixed: &Jet, a: &Jet, b: &Jet, vertical: bool) -> Option<Jet> {
        let s = self.s;
        let zero = || fixed.constant_like(BoundedValue::ZERO);
        let f = fixed.value();
        if f.lo() > s.hi() || f.hi() < -s.hi() {
            return Some(zero());
        }
        if !(f.hi() <= s.lo() && f.lo() >= -s.lo()) {
            return None;
        }
        let (av, bv) = (a.value(), b.value());
        if av.lo() >= s.hi() || bv.hi() <= -s.hi() {
            return Some(zero());
        }
        if !(av.hi() <= s.lo() && bv.lo() >= -s.lo()) {
            return None;
        }
        let lo = if av.hi() <= -s.hi() {
            fixed.constant_like(-s)
        } else if av.lo() >= -s.lo() {
            a.clone()
        } else {
            return None;
        };
        let hi = if bv.lo() >= s.lo() {
            fixed.constant_like(s)
        } else if bv.hi() <= s.hi() {
            b.clone()
        } else {
            return None;
        };
        Some(if vertical {
            &anti.eval_jet(fixed, &hi) - &anti.eval_jet(fixed, &lo)
        } else {
            &anti.eval_jet(&hi, fixed) - &anti.eval_jet(&lo, fixed)
        })
    }

    /// Line integral of component `c` over the square shell of radius `r` about the point.
    fn integral(&self, c: usize, r: &Jet) -> Option<Jet> {
        let (px, py) = self.point;
        let xl = r.constant_like(px) - r.clone();
        let xr = r.constant_like(px) + r.clone();
        let yl = r.constant_like(py) - r.clone();
        let yr = r.constant_like(py) + r.clone();
        let shell = (|| {
            let mut acc = self.edge(&self.anti_y[c], &xl, &yl, &yr, true)?;
            acc = &acc + &self.edge(&self.anti_y[c], &xr, &yl, &yr, true)?;
            acc = &acc + &self.edge(&self.anti_x[c], &yl, &xl, &xr, false)?;
            acc = &acc + &self.edge(&self.anti_x[c], &yr, &xl, &xr, false)?;
            Some(acc)
        })();
        match shell {
            Some(v) => Some(v),
            None if r.order() == 0 => {
                let m = 8.0 * r.value().mag() * self.crude[c];
                Some(r.constant_like(BoundedValue::symmetric(m).scale_f64(1.0 + 1e-12)))
            }
            None => None,
        }
    }
}

impl MollifiedElement {
    pub fn new(base: SolenoidalPolyPair, k: u32, n: u32) -> Result<MollifiedElement> {
        if n <= k {
            return Err(Error::Precondition(format!("mollification needs n ≥ k+1, got k = {k}, n = {n}")));
        }
        if n > 60 {
            return Err(Error::Precondition(format!("mollifier scale n = {n} exceeds 60")));
        }
        Ok(MollifiedElement { trimmed: trim(&base, k)?, n })
    }

    pub fn base(&self) -> &SolenoidalPolyPair {
        self.trimmed.base()
    }

    pub fn k(&self) -> u32 {
        self.trimmed.k()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn trimmed(&self) -> &TrimmedField {
        &self.trimmed
    }

    /// `s + 2^{−n}`: the field vanishes where `‖x‖∞ ≥` this.
    pub fn support_half_width(&self) -> Rational {
        self.trimmed.s() + &Rational::pow2(-(self.n as i64))
    }

    /// Encloses both components at `(x, y)` with radius at most `target` each.
    pub fn eval(&self, x: f64, y: f64, target: f64) -> Result<[BoundedValue; 2]> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain("evaluation point must be finite".into()));
        }
        let h = self.support_half_width();
        if Rational::from_f64(x).expect("finite").abs() >= h || Rational::from_f64(y).expect("finite").abs() >= h || self.base().is_zero() {
            return Ok([BoundedValue::ZERO; 2]);
        }
        let gamma0 = ConstantsTable::default_table().gamma0.value;
        let scale = BoundedValue::pow2(-(self.n as i32));
        let weight = gamma0 * BoundedValue::pow2(self.n as i32);
        let shell = Shell::new(&self.trimmed, x, y);
        let s = self.trimmed.s().to_f64_nearest();
        let mut breaks = vec![0.0, 1.0];
        for p in [x, y] {
            for e in [s, -s] {
                let u = (e - p).abs() * 2f64.powi(self.n as i32);
                if u > 0.0 && u < 1.0 {
                    breaks.push(u);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let cfg = QuadConfig { order: 8, max_cells: 20_000 };
        let mut out = [BoundedValue::ZERO; 2];
        for (c, slot) in out.iter_mut().enumerate() {
            if self.base().component(c).is_zero() {
                continue;
            }
            let f = |u: &Jet| {
                let b = bump_jet(u)?;
                let sh = shell.integral(c, &u.scale(scale))?;
                Some((&b * &sh).scale(weight))
            };
            *slot = integrate_with_breaks(&f, &breaks, target, &cfg)?;
        }
        Ok(out)
    }

    /// Upper bound on `‖p − γ_n ∗ Trim_k p‖₂` over `Ω`.
    pub fn approximation_defect(&self) -> BoundedValue {
        approximation_defect_bound(self.base(), self.k(), self.n)
    }
}

/// `2 (Σ_c L_c²)^{1/2} (2^{−k} + 2^{−n})/s` with `L_c = Σ|∂_x p_c| + Σ|∂_y p_c|`,
/// a max-norm Lipschitz constant on the closed square.
fn approximation_defect_bound(p: &SolenoidalPolyPair, k: u32, n: u32) -> BoundedValue {
    let s = BoundedValue::from_rational(&trim_scale(k));
    let step = (BoundedValue::pow2(-(k as i32)) + BoundedValue::pow2(-(n as i32))) / s;
    let mut sq = BoundedValue::ZERO;
    for c in 0..2 {
        let q = p.component(c);
        let l = BoundedValue::from_rational(&(q.dx().abs_sum() + q.dy().abs_sum()));
        sq = sq + (l * step).sqr();
    }
    let v = BoundedValue::point(2.0) * sq.sqrt().expect("nonnegative");
    BoundedValue::new(0.0, v.hi())
}

pub fn approximation_defect(p: &SolenoidalPolyPair, k: u32, n: u32) -> Result<BoundedValue> {
    if n <= k || k == 0 {
        return Err(Error::Precondition(format!("approximation_defect needs 1 ≤ k < n, got k = {k}, n = {n}")));
    }
    Ok(approximation_defect_bound(p, k, n))
}

/// `∫ γ_n` through the radial shell form `∫₀^{2^{−n}} 8r · 4ⁿ γ₀ b(2ⁿ r) dr`.
pub fn mollifier_mass(n: u32, target: f64) -> Result<BoundedValue> {
    let gamma0 = ConstantsTable::default_table().gamma0.value;
    let two_n = BoundedValue::pow2(n as i32);
    let w = gamma0 * two_n.sqr() * BoundedValue::point(8.0);
    let f = |r: &Jet| {
        let b = bump_jet(&r.scale(two_n))?;
        Some((r * &b).scale(w))
    };
    integrate(&f, 0.0, 2f64.powi(-(n as i32)), target, &QuadConfig::default())
}

#[derive(Serialize, Deserialize)]
struct MollifiedJson {
    #[serde(flatten)]
    pair: PolyPairJson,
    k: u32,
    n: u32,
}

impl Serialize for MollifiedElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MollifiedJson { pair: PolyPairJson::from_pair(self.base().pair()), k: self.k(), n: self.n }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MollifiedElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MollifiedJson::deserialize(d)?;
        let p = j.pair.into_pair().map_err(de::Error::custom)?;
        let p = SolenoidalPolyPair::new(p).map_err(de::Error::custom)?;
        MollifiedElement::new(p, j.k, j.n).map_err(de::Error::custom)
    }
}
