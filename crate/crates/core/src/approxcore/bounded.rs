use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::Dyadic;
use super::rational::{rational_to_f64_directed, Rational};

/// Extra ulps of slack applied to every libm result.
const LIBM_ULPS: u32 = 4;
/// Below this magnitude FMA residuals may be inexact, so rounding is done blindly.
const TINY: f64 = 1e-290;

#[inline]
fn dn(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::MAX
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        x.next_up()
    }
}

fn add_r(a: f64, b: f64, round_up: bool) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        if a.is_finite() && b.is_finite() {
            return if round_up { s } else if s > 0.0 { f64::MAX } else { s };
        }
        return s;
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if round_up && err > 0.0 {
        up(s)
    } else if !round_up && err < 0.0 {
        dn(s)
    } else {
        s
    }
}

fn mul_r(a: f64, b: f64, round_up: bool) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        if a.is_finite() && b.is_finite() && !round_up && p > 0.0 {
            return f64::MAX;
        }
        if a.is_finite() && b.is_finite() && round_up && p < 0.0 {
            return -f64::MAX;
        }
        return p;
    }
    if p.abs() < TINY {
        return if round_up { up(p) } else { dn(p) };
    }
    let err = a.mul_add(b, -p);
    if round_up && err > 0.0 {
        up(p)
    } else if !round_up && err < 0.0 {
        dn(p)
    } else {
        p
    }
}

fn div_r(a: f64, b: f64, round_up: bool) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() || !a.is_finite() || !b.is_finite() {
        return q;
    }
    if q.abs() < TINY || a.abs() < TINY {
        return if round_up { up(q) } else { dn(q) };
    }
    // a − q·b is exact; its sign relative to b tells the side of the true quotient.
    let r = (-q).mul_add(b, a);
    let true_above = (r > 0.0) == (b > 0.0) && r != 0.0;
    let true_below = (r > 0.0) != (b > 0.0) && r != 0.0;
    if round_up && true_above {
        up(q)
    } else if !round_up && true_below {
        dn(q)
    } else {
        q
    }
}

fn sqrt_r(x: f64, round_up: bool) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    if !s.is_finite() || x < TINY {
        return if round_up { up(s) } else { dn(s).max(0.0) };
    }
    let r = (-s).mul_add(s, x);
    if round_up && r > 0.0 {
        up(s)
    } else if !round_up && r < 0.0 {
        dn(s)
    } else {
        s
    }
}

fn widen_dn(mut x: f64) -> f64 {
    for _ in 0..LIBM_ULPS {
        x = dn(x);
    }
    x
}

fn widen_up(mut x: f64) -> f64 {
    for _ in 0..LIBM_ULPS {
        x = up(x);
    }
    x
}

/// Closed interval `[lo, hi]` guaranteed to contain the exact value it stands for.
///
/// Every operation rounds outward, so enclosures survive arbitrary compositions.
#[derive(Clone, Copy, PartialEq)]
pub struct BoundedValue {
    lo: f64,
    hi: f64,
}

impl BoundedValue {
    pub const ZERO: BoundedValue = BoundedValue { lo: 0.0, hi: 0.0 };
    pub const ONE: BoundedValue = BoundedValue { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: BoundedValue = BoundedValue { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> BoundedValue {
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        BoundedValue { lo, hi }
    }

    pub fn point(x: f64) -> BoundedValue {
        assert!(!x.is_nan());
        BoundedValue { lo: x, hi: x }
    }

    pub fn from_i64(n: i64) -> BoundedValue {
        let x = n as f64;
        if x as i128 == n as i128 {
            BoundedValue::point(x)
        } else {
            BoundedValue { lo: dn(x), hi: up(x) }
        }
    }

    pub fn from_rational(r: &Rational) -> BoundedValue {
        BoundedValue { lo: rational_to_f64_directed(r, false), hi: rational_to_f64_directed(r, true) }
    }

    /// `[c − r, c + r]`, rounded outward.
    pub fn from_center_radius(c: f64, r: f64) -> BoundedValue {
        assert!(r >= 0.0);
        BoundedValue { lo: add_r(c, -r, false), hi: add_r(c, r, true) }
    }

    /// The exact dyadic `2^e`.
    pub fn pow2(e: i32) -> BoundedValue {
        BoundedValue::point(2f64.powi(e))
    }

    pub fn pi() -> BoundedValue {
        BoundedValue { lo: std::f64::consts::PI, hi: up(std::f64::consts::PI) }
    }

    pub fn hull(self, o: BoundedValue) -> BoundedValue {
        BoundedValue { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn intersect(self, o: BoundedValue) -> Option<BoundedValue> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(BoundedValue { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return if self.lo.is_finite() {
                self.lo
            } else if self.hi.is_finite() {
                self.hi
            } else {
                0.0
            };
        }
        let m = self.lo * 0.5 + self.hi * 0.5;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on the distance from `mid()` to either endpoint.
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        add_r(self.hi, -m, true).max(add_r(m, -self.lo, true))
    }

    pub fn width(&self) -> f64 {
        add_r(self.hi, -self.lo, true)
    }

    /// Upper bound on `|x|` over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lower bound on `|x|` over the interval.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn contains_interval(&self, o: &BoundedValue) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlaps(&self, o: &BoundedValue) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// True only if every point is strictly below every point of `o`.
    pub fn certainly_lt(&self, o: &BoundedValue) -> bool {
        self.hi < o.lo
    }

    pub fn certainly_le(&self, o: &BoundedValue) -> bool {
        self.hi <= o.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo > 0.0
    }

    /// Interval with only the upper end kept: `[0, hi]` for nonnegative quantities.
    pub fn nonneg(self) -> BoundedValue {
        BoundedValue { lo: self.lo.max(0.0), hi: self.hi.max(0.0) }
    }

    /// `[-m, m]` where `m` bounds `|x|`.
    pub fn symmetric(m: f64) -> BoundedValue {
        assert!(m >= 0.0);
        BoundedValue { lo: -m, hi: m }
    }

    /// Adds `[-r, r]`.
    pub fn inflate(self, r: f64) -> BoundedValue {
        assert!(r >= 0.0);
        BoundedValue { lo: add_r(self.lo, -r, false), hi: add_r(self.hi, r, true) }
    }

    pub fn abs(self) -> BoundedValue {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            BoundedValue { lo: 0.0, hi: self.mag() }
        }
    }

    pub fn max(self, o: BoundedValue) -> BoundedValue {
        BoundedValue { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn min(self, o: BoundedValue) -> BoundedValue {
        BoundedValue { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn scale_f64(self, k: f64) -> BoundedValue {
        self * BoundedValue::point(k)
    }

    pub fn sqr(self) -> BoundedValue {
        let a = self.abs();
        BoundedValue { lo: mul_r(a.lo, a.lo, false), hi: mul_r(a.hi, a.hi, true) }
    }

    pub fn powi(self, n: u32) -> BoundedValue {
        match n {
            0 => BoundedValue::ONE,
            1 => self,
            _ if n % 2 == 0 => self.powi(n / 2).sqr(),
            _ => self * self.powi(n - 1),
        }
    }

    pub fn recip(self) -> Option<BoundedValue> {
        BoundedValue::ONE.checked_div(self)
    }

    pub fn checked_div(self, o: BoundedValue) -> Option<BoundedValue> {
        if o.contains_zero() {
            return None;
        }
        let c = [
            (div_r(self.lo, o.lo, false), div_r(self.lo, o.lo, true)),
            (div_r(self.lo, o.hi, false), div_r(self.lo, o.hi, true)),
            (div_r(self.hi, o.lo, false), div_r(self.hi, o.lo, true)),
            (div_r(self.hi, o.hi, false), div_r(self.hi, o.hi, true)),
        ];
        Some(BoundedValue {
            lo: c.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
            hi: c.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Square root of the nonnegative part; `None` if the interval is entirely negative.
    pub fn sqrt(self) -> Option<BoundedValue> {
        if self.hi < 0.0 {
            return None;
        }
        Some(BoundedValue { lo: sqrt_r(self.lo.max(0.0), false), hi: sqrt_r(self.hi, true) })
    }

    pub fn exp(self) -> BoundedValue {
        let lo = if self.lo == f64::NEG_INFINITY { 0.0 } else { widen_dn(self.lo.exp()).max(0.0) };
        let hi = if self.hi == f64::NEG_INFINITY {
            0.0
        } else {
            let e = self.hi.exp();
            if e == 0.0 {
                f64::from_bits(1)
            } else {
                widen_up(e)
            }
        };
        BoundedValue { lo, hi }
    }

    pub fn ln(self) -> Option<BoundedValue> {
        if self.lo <= 0.0 {
            return None;
        }
        Some(BoundedValue { lo: widen_dn(self.lo.ln()), hi: widen_up(self.hi.ln()) })
    }

    /// `self^e` for a positive base.
    pub fn powf(self, e: BoundedValue) -> Option<BoundedValue> {
        if self.is_point() && self.lo == 1.0 {
            return Some(BoundedValue::ONE);
        }
        Some((self.ln()? * e).exp())
    }

    pub fn pow_rational(self, e: &Rational) -> Option<BoundedValue> {
        if e.is_zero() {
            return Some(BoundedValue::ONE);
        }
        if self.lo == 0.0 && self.hi == 0.0 && e.is_positive() {
            return Some(BoundedValue::ZERO);
        }
        if self.lo <= 0.0 {
            if e.is_positive() && self.hi > 0.0 && self.lo == 0.0 {
                let hi = BoundedValue::point(self.hi).powf(BoundedValue::from_rational(e))?;
                return Some(BoundedValue { lo: 0.0, hi: hi.hi });
            }
            return None;
        }
        self.powf(BoundedValue::from_rational(e))
    }

    fn trig(self, is_cos: bool) -> BoundedValue {
        if !self.is_finite() || self.width() > 7.0 || self.mag() > 1e12 {
            return BoundedValue::new(-1.0, 1.0);
        }
        let f = |x: f64| if is_cos { x.cos() } else { x.sin() };
        let a = f(self.lo);
        let b = f(self.hi);
        let mut lo = widen_dn(a.min(b));
        let mut hi = widen_up(a.max(b));
        let pi = BoundedValue::pi();
        let k0 = (self.lo / std::f64::consts::PI).floor() as i64 - 2;
        let k1 = (self.hi / std::f64::consts::PI).ceil() as i64 + 2;
        for k in k0..=k1 {
            // cos has extrema at kπ, sin at (k + 1/2)π; value (−1)^k either way.
            let c = if is_cos {
                BoundedValue::from_i64(k) * pi
            } else {
                (BoundedValue::from_i64(k) + BoundedValue::point(0.5)) * pi
            };
            if c.overlaps(&self) {
                if k.rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        BoundedValue { lo: lo.max(-1.0), hi: hi.min(1.0) }
    }

    pub fn sin(self) -> BoundedValue {
        if self.is_point() && self.lo == 0.0 {
            return BoundedValue::ZERO;
        }
        self.trig(false)
    }

    pub fn cos(self) -> BoundedValue {
        if self.is_point() && self.lo == 0.0 {
            return BoundedValue::ONE;
        }
        self.trig(true)
    }

    /// Sum of a sequence, accumulated in order.
    pub fn sum<I: IntoIterator<Item = BoundedValue>>(it: I) -> BoundedValue {
        it.into_iter().fold(BoundedValue::ZERO, |a, b| a + b)
    }

    pub fn center_dyadic(&self) -> Option<Dyadic> {
        Dyadic::from_f64(self.mid())
    }

    pub fn radius_dyadic(&self) -> Option<Dyadic> {
        Dyadic::from_f64(self.rad())
    }
}

impl Add for BoundedValue {
    type Output = BoundedValue;
    fn add(self, o: BoundedValue) -> BoundedValue {
        BoundedValue { lo: add_r(self.lo, o.lo, false), hi: add_r(self.hi, o.hi, true) }
    }
}

impl Sub for BoundedValue {
    type Output = BoundedValue;
    fn sub(self, o: BoundedValue) -> BoundedValue {
        BoundedValue { lo: add_r(self.lo, -o.hi, false), hi: add_r(self.hi, -o.lo, true) }
    }
}

impl Neg for BoundedValue {
    type Output = BoundedValue;
    fn neg(self) -> BoundedValue {
        BoundedValue { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for BoundedValue {
    type Output = BoundedValue;
    fn mul(self, o: BoundedValue) -> BoundedValue {
        if self.lo >= 0.0 && o.lo >= 0.0 {
            return BoundedValue { lo: mul_r(self.lo, o.lo, false), hi: mul_r(self.hi, o.hi, true) };
        }
        let ends = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in ends {
            lo = lo.min(mul_r(a, b, false));
            hi = hi.max(mul_r(a, b, true));
        }
        BoundedValue { lo, hi }
    }
}

impl Div for BoundedValue {
    type Output = BoundedValue;
    /// Division by an interval containing zero yields the whole line.
    fn div(self, o: BoundedValue) -> BoundedValue {
        self.checked_div(o).unwrap_or(BoundedValue::ENTIRE)
    }
}

impl From<f64> for BoundedValue {
    fn from(x: f64) -> BoundedValue {
        BoundedValue::point(x)
    }
}

impl fmt::Debug for BoundedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for BoundedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.mid(), self.rad())
    }
}

#[derive(Serialize, Deserialize)]
struct BoundedJson {
    center: Dyadic,
    radius: Dyadic,
}

impl Serialize for BoundedValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error;
        let center = self.center_dyadic().ok_or_else(|| S::Error::custom("unbounded enclosure"))?;
        let radius = self.radius_dyadic().ok_or_else(|| S::Error::custom("unbounded enclosure"))?;
        BoundedJson { center, radius }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = BoundedJson::deserialize(d)?;
        if j.radius.is_negative() {
            return Err(de::Error::custom("negative radius"));
        }
        let c = j.center.to_rational();
        let r = j.radius.to_rational();
        Ok(BoundedValue::new(
            rational_to_f64_directed(&(&c - &r), false),
            rational_to_f64_directed(&(&c + &r), true),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn contains_rational(b: &BoundedValue, r: &Rational) -> bool {
        Rational::from_f64(b.lo()).unwrap() <= *r && *r <= Rational::from_f64(b.hi()).unwrap()
    }

    #[test]
    fn exact_operations_stay_points() {
        let a = BoundedValue::point(0.5);
        let b = BoundedValue::point(0.25);
        assert!((a + b).is_point());
        assert!((a * b).is_point());
        assert!((a / b).is_point());
        assert_eq!(BoundedValue::point(9.0).sqrt().unwrap(), BoundedValue::point(3.0));
    }

    #[test]
    fn inexact_division_brackets_third() {
        let t = BoundedValue::ONE / BoundedValue::point(3.0);
        assert!(!t.is_point());
        assert!(contains_rational(&t, &Rational::new(1, 3)));
    }

    #[test]
    fn pi_encloses() {
        let p = BoundedValue::pi();
        assert!(p.lo() < p.hi());
        assert!((p.sin()).contains_zero());
        assert!((p.cos()).contains(-1.0));
    }

    #[test]
    fn trig_extrema_found() {
        let s = BoundedValue::new(1.0, 2.0).sin();
        assert_eq!(s.hi(), 1.0);
        let c = BoundedValue::new(3.0, 3.5).cos();
        assert_eq!(c.lo(), -1.0);
    }

    #[test]
    fn serde_round_trip_widens_only() {
        let x = BoundedValue::ONE / BoundedValue::point(7.0);
        let s = serde_json::to_string(&x).unwrap();
        let y: BoundedValue = serde_json::from_str(&s).unwrap();
        assert!(y.contains_interval(&x));
    }

    #[derive(Debug, Clone)]
    enum Expr {
        Lit(i32, i32),
        Add(Box<Expr>, Box<Expr>),
        Sub(Box<Expr>, Box<Expr>),
        Mul(Box<Expr>, Box<Expr>),
        Div(Box<Expr>, Box<Expr>),
    }

    fn expr() -> impl Strategy<Value = Expr> {
        let leaf = (-50i32..50, 1i32..30).prop_map(|(p, q)| Expr::Lit(p, q));
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            ]
        })
    }

    fn eval(e: &Expr) -> Option<(Rational, BoundedValue)> {
        Some(match e {
            Expr::Lit(p, q) => {
                let r = Rational::new(*p, *q);
                (r.clone(), BoundedValue::from_rational(&r))
            }
            Expr::Add(a, b) => {
                let (x, u) = eval(a)?;
                let (y, v) = eval(b)?;
                (x + y, u + v)
            }
            Expr::Sub(a, b) => {
                let (x, u) = eval(a)?;
                let (y, v) = eval(b)?;
                (x - y, u - v)
            }
            Expr::Mul(a, b) => {
                let (x, u) = eval(a)?;
                let (y, v) = eval(b)?;
                (x * y, u * v)
            }
            Expr::Div(a, b) => {
                let (x, u) = eval(a)?;
                let (y, v) = eval(b)?;
                if y.is_zero() || v.contains_zero() {
                    return None;
                }
                (x / y, u.checked_div(v)?)
            }
        })
    }

    proptest! {
        #[test]
        fn enclosure_soundness(e in expr()) {
            if let Some((exact, enc)) = eval(&e) {
                if enc.is_finite() {
                    prop_assert!(contains_rational(&enc, &exact), "{:?} not in {:?}", exact, enc);
                }
            }
        }

        #[test]
        fn exp_ln_inverse(x in 0.01f64..50.0) {
            let b = BoundedValue::point(x);
            prop_assert!(b.ln().unwrap().exp().contains(x));
        }
    }
}
