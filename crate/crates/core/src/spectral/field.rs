//! Truncated spectral expansions with certified coefficient enclosures and
//! certified bounds on the discarded modes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::basis::Basis;
use crate::approxcore::{BoundedValue, Rational};
use crate::error::{Error, Result};

/// `Σ c_{nm} φ_{nm}` over `|n|, |m| ≤ cutoff` plus a remainder whose
/// `L₂` norm is at most `tail_l2` and whose `H^s` norm (weights
/// `(1+n²+m²)^s`) is at most `tail_hs[s]`.
///
/// The remainder need not be orthogonal to the head (it may hold the error
/// ball of an approximation), so norms combine it by the triangle inequality.
///
/// `tail_l2 == 0` means the field is band-limited; all weighted tails are
/// then zero as well.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    basis: Basis,
    cutoff: usize,
    re: Vec<BoundedValue>,
    im: Option<Vec<BoundedValue>>,
    pub tail_l2: f64,
    pub tail_hs: BTreeMap<Rational, f64>,
}

fn add_up(a: f64, b: f64) -> f64 {
    (BoundedValue::point(a) + BoundedValue::point(b)).hi()
}

/// `sqrt(a² + b²)` rounded up.
pub fn hypot_up(a: f64, b: f64) -> f64 {
    (BoundedValue::point(a).sqr() + BoundedValue::point(b).sqr()).sqrt().expect("nonnegative").hi()
}

/// Norm of head plus a remainder of norm at most `t`.
fn with_remainder(head: BoundedValue, t: f64) -> BoundedValue {
    if t == 0.0 {
        return head;
    }
    BoundedValue::new((head - BoundedValue::point(t)).lo().max(0.0), (head + BoundedValue::point(t)).hi())
}

/// `(1 + n² + m²)^s`.
pub fn sobolev_weight(n: i64, m: i64, s: &Rational) -> BoundedValue {
    BoundedValue::from_i64(1 + n * n + m * m).pow_rational(s).expect("positive base")
}

impl FourierField {
    pub fn zeros(basis: Basis, cutoff: usize) -> FourierField {
        let side = basis.side(cutoff);
        FourierField {
            basis,
            cutoff,
            re: vec![BoundedValue::ZERO; side * side],
            im: if basis.is_exp() { Some(vec![BoundedValue::ZERO; side * side]) } else { None },
            tail_l2: 0.0,
            tail_hs: BTreeMap::new(),
        }
    }

    /// A single unit-coefficient mode.
    pub fn mode(basis: Basis, cutoff: usize, n: i64, m: i64, value: BoundedValue) -> Result<FourierField> {
        let mut f = FourierField::zeros(basis, cutoff);
        if !basis.admits(n, m) {
            return Err(Error::Precondition(format!("mode ({n}, {m}) is identically zero in basis {}", basis.name())));
        }
        f.set(n, m, value, BoundedValue::ZERO)?;
        Ok(f)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn side(&self) -> usize {
        self.basis.side(self.cutoff)
    }

    pub fn is_band_limited(&self) -> bool {
        self.tail_l2 == 0.0
    }

    fn pos(&self, n: i64, m: i64) -> Option<usize> {
        let i = self.basis.position(self.cutoff, n)?;
        let j = self.basis.position(self.cutoff, m)?;
        Some(i * self.side() + j)
    }

    /// Signed indices of every grid entry, row-major.
    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let side = self.side();
        (0..side * side).map(move |p| (self.basis.index(self.cutoff, p / side), self.basis.index(self.cutoff, p % side)))
    }

    /// `(re, im)`; zero outside the grid.
    pub fn coeff(&self, n: i64, m: i64) -> (BoundedValue, BoundedValue) {
        match self.pos(n, m) {
            Some(p) => (self.re[p], self.im.as_ref().map_or(BoundedValue::ZERO, |v| v[p])),
            None => (BoundedValue::ZERO, BoundedValue::ZERO),
        }
    }

    pub fn re(&self, n: i64, m: i64) -> BoundedValue {
        self.coeff(n, m).0
    }

    pub fn set(&mut self, n: i64, m: i64, re: BoundedValue, im: BoundedValue) -> Result<()> {
        let p = self.pos(n, m).ok_or_else(|| Error::Precondition(format!("mode ({n}, {m}) outside cutoff {}", self.cutoff)))?;
        self.re[p] = re;
        match &mut self.im {
            Some(v) => v[p] = im,
            None if im == BoundedValue::ZERO => {}
            None => return Err(Error::Precondition("imaginary part in a real basis".into())),
        }
        Ok(())
    }

    pub(crate) fn from_raw(basis: Basis, cutoff: usize, re: Vec<BoundedValue>, im: Option<Vec<BoundedValue>>) -> FourierField {
        let side = basis.side(cutoff);
        assert_eq!(re.len(), side * side);
        let im = match (basis.is_exp(), im) {
            (true, Some(v)) => Some(v),
            (true, None) => Some(vec![BoundedValue::ZERO; side * side]),
            (false, _) => None,
        };
        FourierField { basis, cutoff, re, im, tail_l2: 0.0, tail_hs: BTreeMap::new() }
    }

    /// `|c|²` per grid entry.
    fn abs_sq(&self, p: usize) -> BoundedValue {
        let r = self.re[p].sqr();
        match &self.im {
            Some(v) => r + v[p].sqr(),
            None => r,
        }
    }

    /// `Σ w(n,m) |c|²` over the grid.
    pub fn weighted_head(&self, w: impl Fn(i64, i64) -> BoundedValue) -> BoundedValue {
        let mut acc = BoundedValue::ZERO;
        for (p, (n, m)) in self.modes().enumerate() {
            let a = self.abs_sq(p);
            if a != BoundedValue::ZERO {
                acc = acc + w(n, m) * a;
            }
        }
        acc
    }

    pub fn l2_norm(&self) -> BoundedValue {
        let head = self.weighted_head(|_, _| BoundedValue::ONE);
        with_remainder(head.sqrt().expect("nonnegative"), self.tail_l2)
    }

    /// Bound on the `H^s` norm of the discarded part.
    pub fn tail_for(&self, s: &Rational) -> Result<f64> {
        if self.is_band_limited() {
            return Ok(0.0);
        }
        if s.is_zero() {
            return Ok(self.tail_l2);
        }
        self.tail_hs.get(s).copied().ok_or_else(|| {
            Error::InsufficientData(format!("no H^{s} tail control for this field (cutoff {})", self.cutoff))
        })
    }

    pub fn hs_norm(&self, s: &Rational) -> Result<BoundedValue> {
        if s.is_negative() {
            return Err(Error::Precondition(format!("hs_norm needs s ≥ 0, got {s}")));
        }
        let tail = self.tail_for(s)?;
        let head = self.weighted_head(|n, m| sobolev_weight(n, m, s));
        Ok(with_remainder(head.sqrt().expect("nonnegative"), tail))
    }

    /// `‖A^α f‖₂` with `A = −Δ` acting diagonally on the basis.
    pub fn a_norm(&self, alpha: &Rational) -> Result<BoundedValue> {
        if alpha.is_negative() {
            return Err(Error::Precondition(format!("a_norm needs α ≥ 0, got {alpha}")));
        }
        let two_a = alpha * &Rational::from_int(2);
        let tail = self.tail_for(&two_a)?;
        let b = self.basis;
        let head = self.weighted_head(|n, m| {
            if n == 0 && m == 0 {
                BoundedValue::ZERO
            } else {
                b.laplace_eigen(n, m).pow_rational(&two_a).expect("positive")
            }
        });
        // λ ≤ scale²(1 + n² + m²)
        let fs = b.freq_scale().pow_rational(&two_a).expect("positive");
        let t = (fs * BoundedValue::point(tail)).hi();
        Ok(with_remainder(head.sqrt().expect("nonnegative"), t))
    }

    /// `L₂` distance bound between the true field and the midpoint expansion.
    pub fn uncertainty(&self) -> f64 {
        let mut acc = BoundedValue::ZERO;
        for p in 0..self.re.len() {
            acc = acc + BoundedValue::point(self.re[p].rad()).sqr();
            if let Some(v) = &self.im {
                acc = acc + BoundedValue::point(v[p].rad()).sqr();
            }
        }
        add_up(acc.sqrt().expect("nonnegative").hi(), self.tail_l2)
    }

    /// `H^s` distance bound between the true field and the midpoint expansion.
    pub fn hs_uncertainty(&self, s: &Rational) -> Result<f64> {
        let tail = self.tail_for(s)?;
        let mut acc = BoundedValue::ZERO;
        for (p, (n, m)) in self.modes().enumerate() {
            let mut r2 = BoundedValue::point(self.re[p].rad()).sqr();
            if let Some(v) = &self.im {
                r2 = r2 + BoundedValue::point(v[p].rad()).sqr();
            }
            if r2 != BoundedValue::ZERO {
                acc = acc + sobolev_weight(n, m, s) * r2;
            }
        }
        Ok(add_up(acc.sqrt().expect("nonnegative").hi(), tail))
    }

    /// Midpoint expansion with point coefficients and no tail.
    pub fn center(&self) -> FourierField {
        let pt = |v: &BoundedValue| BoundedValue::point(v.mid());
        FourierField {
            basis: self.basis,
            cutoff: self.cutoff,
            re: self.re.iter().map(pt).collect(),
            im: self.im.as_ref().map(|v| v.iter().map(pt).collect()),
            tail_l2: 0.0,
            tail_hs: BTreeMap::new(),
        }
    }

    /// Changes the cutoff. Dropped modes move into the tails.
    pub fn with_cutoff(&self, cutoff: usize) -> FourierField {
        let mut out = FourierField::zeros(self.basis, cutoff);
        let mut dropped = BoundedValue::ZERO;
        let mut dropped_hs: BTreeMap<Rational, BoundedValue> = self.tail_hs.keys().map(|s| (s.clone(), BoundedValue::ZERO)).collect();
        for (p, (n, m)) in self.modes().enumerate() {
            match out.pos(n, m) {
                Some(q) => {
                    out.re[q] = self.re[p];
                    if let (Some(dst), Some(src)) = (&mut out.im, &self.im) {
                        dst[q] = src[p];
                    }
                }
                None => {
                    let a = self.abs_sq(p);
                    dropped = dropped + a;
                    for (s, acc) in dropped_hs.iter_mut() {
                        *acc = *acc + sobolev_weight(n, m, s) * a;
                    }
                }
            }
        }
        let was_band_limited = self.is_band_limited();
        out.tail_l2 = add_up(self.tail_l2, dropped.sqrt().expect("nonnegative").hi());
        if was_band_limited && out.tail_l2 > 0.0 {
            // Dropping from a band-limited field: every weighted tail is finite.
            out.tail_hs = BTreeMap::new();
            out.mark_band_limited_drop(self);
        } else {
            for (s, t) in &self.tail_hs {
                let d = dropped_hs[s].sqrt().expect("nonnegative").hi();
                out.tail_hs.insert(s.clone(), add_up(*t, d));
            }
        }
        out
    }

    /// After truncating a band-limited field the remainder is itself
    /// band-limited; record its weighted norms for the common exponents.
    fn mark_band_limited_drop(&mut self, src: &FourierField) {
        for s in standard_exponents() {
            let mut acc = BoundedValue::ZERO;
            for (p, (n, m)) in src.modes().enumerate() {
                if self.pos(n, m).is_none() {
                    acc = acc + sobolev_weight(n, m, &s) * src.abs_sq(p);
                }
            }
            self.tail_hs.insert(s, acc.sqrt().expect("nonnegative").hi());
        }
    }

    fn binary(&self, o: &FourierField, f: impl Fn(BoundedValue, BoundedValue) -> BoundedValue) -> Result<FourierField> {
        if self.basis != o.basis {
            return Err(Error::Precondition(format!("basis mismatch: {} vs {}", self.basis.name(), o.basis.name())));
        }
        let c = self.cutoff.max(o.cutoff);
        let a = if self.cutoff == c { self.clone() } else { self.with_cutoff(c) };
        let b = if o.cutoff == c { o.clone() } else { o.with_cutoff(c) };
        let mut out = a.clone();
        for p in 0..out.re.len() {
            out.re[p] = f(a.re[p], b.re[p]);
        }
        if let (Some(dst), Some(x), Some(y)) = (&mut out.im, &a.im, &b.im) {
            for p in 0..dst.len() {
                dst[p] = f(x[p], y[p]);
            }
        }
        out.tail_l2 = add_up(a.tail_l2, b.tail_l2);
        out.tail_hs = BTreeMap::new();
        if a.is_band_limited() && b.is_band_limited() {
            out.tail_l2 = 0.0;
        } else {
            for s in a.tail_hs.keys().chain(b.tail_hs.keys()) {
                if let (Ok(x), Ok(y)) = (a.tail_for(s), b.tail_for(s)) {
                    out.tail_hs.insert(s.clone(), add_up(x, y));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &FourierField) -> Result<FourierField> {
        self.binary(o, |x, y| x + y)
    }

    pub fn sub(&self, o: &FourierField) -> Result<FourierField> {
        self.binary(o, |x, y| x - y)
    }

    /// Multiplication by a real scalar.
    pub fn scale(&self, k: BoundedValue) -> FourierField {
        let mut out = self.clone();
        for v in out.re.iter_mut() {
            *v = *v * k;
        }
        if let Some(im) = &mut out.im {
            for v in im.iter_mut() {
                *v = *v * k;
            }
        }
        let m = k.mag();
        out.tail_l2 = (BoundedValue::point(out.tail_l2) * BoundedValue::point(m)).hi();
        for t in out.tail_hs.values_mut() {
            *t = (BoundedValue::point(*t) * BoundedValue::point(m)).hi();
        }
        out
    }

    /// Mode-wise multiplication by real factors. `tail_gain(s)` must bound
    /// `|factor|` over every discarded mode, for the tail of exponent `s`
    /// (`None` drops that tail).
    pub fn map_modes(&self, factor: impl Fn(i64, i64) -> BoundedValue, tail_gain: impl Fn(&Rational) -> Option<f64>) -> FourierField {
        let mut out = self.clone();
        let modes: Vec<(i64, i64)> = self.modes().collect();
        for (p, (n, m)) in modes.iter().enumerate() {
            let f = factor(*n, *m);
            out.re[p] = out.re[p] * f;
            if let Some(im) = &mut out.im {
                im[p] = im[p] * f;
            }
        }
        if !self.is_band_limited() {
            let g0 = tail_gain(&Rational::zero()).expect("L2 gain is required");
            out.tail_l2 = (BoundedValue::point(self.tail_l2) * BoundedValue::point(g0)).hi();
            out.tail_hs = self
                .tail_hs
                .iter()
                .filter_map(|(s, t)| tail_gain(s).map(|g| (s.clone(), (BoundedValue::point(*t) * BoundedValue::point(g)).hi())))
                .collect();
        }
        out
    }

    /// `max |c|` radius over the grid.
    pub fn max_radius(&self) -> f64 {
        let mut r: f64 = 0.0;
        for v in &self.re {
            r = r.max(v.rad());
        }
        if let Some(im) = &self.im {
            for v in im {
                r = r.max(v.rad());
            }
        }
        r
    }

    /// `Σ |c_{nm}|` with the sup of each basis function folded in: a bound
    /// on the sup norm of the head.
    pub fn wiener_head(&self) -> BoundedValue {
        let mut acc = BoundedValue::ZERO;
        for (p, (n, m)) in self.modes().enumerate() {
            let a = self.abs_sq(p).sqrt().expect("nonnegative");
            let w = match self.basis {
                Basis::Exp => BoundedValue::ONE,
                Basis::Trig(x, y) => {
                    let fx = if x == super::basis::Axis::Cos && n == 0 { 1.0 } else { 2f64.sqrt() };
                    let fy = if y == super::basis::Axis::Cos && m == 0 { 1.0 } else { 2f64.sqrt() };
                    BoundedValue::point(fx).inflate(1e-15) * BoundedValue::point(fy).inflate(1e-15)
                }
            };
            acc = acc + a * w;
        }
        acc
    }

    /// Value of the head at a canonical point (the tail has no pointwise bound).
    pub fn eval_head(&self, x: BoundedValue, y: BoundedValue) -> (BoundedValue, BoundedValue) {
        let mut re = BoundedValue::ZERO;
        let mut im = BoundedValue::ZERO;
        for (p, (n, m)) in self.modes().enumerate() {
            match self.basis {
                Basis::Trig(a, b) => {
                    if self.re[p] == BoundedValue::ZERO {
                        continue;
                    }
                    re = re + self.re[p] * a.eval(n as usize, x) * b.eval(m as usize, y);
                }
                Basis::Exp => {
                    let (cr, ci) = (self.re[p], self.im.as_ref().expect("exp is complex")[p]);
                    if cr == BoundedValue::ZERO && ci == BoundedValue::ZERO {
                        continue;
                    }
                    let two = BoundedValue::point(2.0);
                    let arg = BoundedValue::pi()
                        * (BoundedValue::from_i64(n) * (two * x - BoundedValue::ONE)
                            + BoundedValue::from_i64(m) * (two * y - BoundedValue::ONE));
                    let (c, s) = (arg.cos(), arg.sin());
                    re = re + cr * c - ci * s;
                    im = im + cr * s + ci * c;
                }
            }
        }
        (re, im)
    }

    /// Whether coefficients of the exponential basis satisfy `c_{−n,−m} = conj(c_{n,m})`
    /// within their enclosures.
    pub fn conjugate_symmetric(&self) -> bool {
        let Some(im) = &self.im else { return true };
        for (p, (n, m)) in self.modes().enumerate() {
            let q = self.pos(-n, -m).expect("grid is symmetric");
            if !self.re[p].overlaps(&self.re[q]) || !im[p].overlaps(&(-im[q])) {
                return false;
            }
        }
        true
    }
}

/// Exponents for which band-limited truncations record weighted tails.
pub fn standard_exponents() -> Vec<Rational> {
    [(1, 2), (1, 1), (6, 5), (3, 2), (2, 1)].iter().map(|&(p, q)| Rational::new(p, q)).collect()
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    basis: Basis,
    cutoff: usize,
    re: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    rad: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    tail_l2: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    tail_hs: BTreeMap<String, f64>,
}

/// JSON numbers enclose their decimal text by one ulp either way; strings
/// are parsed exactly as decimals or `p/q`.
fn value_to_bounded(v: &Value) -> std::result::Result<BoundedValue, String> {
    match v {
        Value::Number(n) => {
            let x = n.as_f64().ok_or("non-finite number")?;
            if let Some(i) = n.as_i64() {
                if (i as f64) as i64 == i && i.unsigned_abs() < (1u64 << 53) {
                    return Ok(BoundedValue::point(i as f64));
                }
            }
            Ok(BoundedValue::new(x.next_down(), x.next_up()))
        }
        Value::String(s) => {
            let r: Rational = s.parse().map_err(|_| format!("bad coefficient {s:?}"))?;
            Ok(BoundedValue::from_rational(&r))
        }
        _ => Err("coefficient must be a number or a string".into()),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

impl Serialize for FourierField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let side = self.side();
        let grid = |v: &Vec<BoundedValue>| -> Vec<Vec<Value>> {
            (0..side).map(|i| (0..side).map(|j| num(v[i * side + j].mid())).collect()).collect()
        };
        let rad = (0..side)
            .map(|i| {
                (0..side)
                    .map(|j| {
                        let p = i * side + j;
                        let r = self.re[p].rad();
                        self.im.as_ref().map_or(r, |im| r.max(im[p].rad()))
                    })
                    .collect()
            })
            .collect();
        FieldJson {
            basis: self.basis,
            cutoff: self.cutoff,
            re: grid(&self.re),
            im: self.im.as_ref().map(grid),
            rad: Some(rad),
            tail_l2: self.tail_l2,
            tail_hs: self.tail_hs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = FieldJson::deserialize(d)?;
        let side = j.basis.side(j.cutoff);
        let read = |g: &Vec<Vec<Value>>, what: &str| -> std::result::Result<Vec<BoundedValue>, D::Error> {
            if g.len() != side || g.iter().any(|r| r.len() != side) {
                return Err(D::Error::custom(format!("{what} grid must be {side}x{side}")));
            }
            let mut out = Vec::with_capacity(side * side);
            for (i, row) in g.iter().enumerate() {
                for (jj, v) in row.iter().enumerate() {
                    let mut b = value_to_bounded(v).map_err(D::Error::custom)?;
                    if let Some(rad) = &j.rad {
                        let r = rad.get(i).and_then(|r| r.get(jj)).copied().ok_or_else(|| D::Error::custom("rad grid shape"))?;
                        if !(r >= 0.0) {
                            return Err(D::Error::custom("radii must be nonnegative"));
                        }
                        b = b.inflate(r);
                    }
                    out.push(b);
                }
            }
            Ok(out)
        };
        let re = read(&j.re, "re")?;
        let im = match (&j.im, j.basis.is_exp()) {
            (Some(g), true) => Some(read(g, "im")?),
            (None, true) => None,
            (Some(_), false) => return Err(D::Error::custom("im given for a real basis")),
            (None, false) => None,
        };
        if !(j.tail_l2 >= 0.0) {
            return Err(D::Error::custom("tail_l2 must be nonnegative"));
        }
        let mut f = FourierField::from_raw(j.basis, j.cutoff, re, im);
        f.tail_l2 = j.tail_l2;
        for (k, v) in j.tail_hs {
            let s: Rational = k.parse().map_err(|_| D::Error::custom(format!("bad tail exponent {k:?}")))?;
            f.tail_hs.insert(s, v);
        }
        Ok(f)
    }
}
