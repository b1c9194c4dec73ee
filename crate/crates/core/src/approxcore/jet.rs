//! Truncated Taylor series with interval coefficients.
//!
//! Seeding the independent variable with an interval `X` makes every
//! coefficient an enclosure of `f^(k)(ξ)/k!` for all `ξ ∈ X`, which is what
//! the quadrature remainder needs.

use std::ops::{Add, Mul, Neg, Sub};

use super::bounded::BoundedValue;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<BoundedValue>,
}

impl Jet {
    /// Constant function, with coefficients up to `order`.
    pub fn constant(v: BoundedValue, order: usize) -> Jet {
        let mut c = vec![BoundedValue::ZERO; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: BoundedValue, order: usize) -> Jet {
        let mut c = vec![BoundedValue::ZERO; order + 1];
        c[0] = x;
        if order >= 1 {
            c[1] = BoundedValue::ONE;
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BoundedValue {
        self.c[k]
    }

    pub fn coeffs(&self) -> &[BoundedValue] {
        &self.c
    }

    pub fn value(&self) -> BoundedValue {
        self.c[0]
    }

    pub fn constant_like(&self, v: BoundedValue) -> Jet {
        Jet::constant(v, self.order())
    }

    pub fn scale(&self, k: BoundedValue) -> Jet {
        Jet { c: self.c.iter().map(|&x| x * k).collect() }
    }

    pub fn add_const(&self, k: BoundedValue) -> Jet {
        let mut c = self.c.clone();
        c[0] = c[0] + k;
        Jet { c }
    }

    pub fn sqr(&self) -> Jet {
        self * self
    }

    pub fn recip(&self) -> Option<Jet> {
        self.constant_like(BoundedValue::ONE).div(self)
    }

    pub fn div(&self, g: &Jet) -> Option<Jet> {
        let g0 = g.c[0];
        if g0.contains_zero() {
            return None;
        }
        let n = self.c.len();
        let mut h: Vec<BoundedValue> = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = self.c[k];
            for j in 1..=k {
                s = s - g.c[j] * h[k - j];
            }
            h.push(s.checked_div(g0)?);
        }
        Some(Jet { c: h })
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut h = Vec::with_capacity(n);
        h.push(self.c[0].exp());
        for k in 1..n {
            let mut s = BoundedValue::ZERO;
            for j in 1..=k {
                s = s + BoundedValue::from_i64(j as i64) * self.c[j] * h[k - j];
            }
            h.push(s / BoundedValue::from_i64(k as i64));
        }
        Jet { c: h }
    }

    pub fn ln(&self) -> Option<Jet> {
        let f0 = self.c[0];
        let l0 = f0.ln()?;
        let n = self.c.len();
        let mut h = Vec::with_capacity(n);
        h.push(l0);
        for k in 1..n {
            let mut s = BoundedValue::ZERO;
            for j in 1..k {
                s = s + BoundedValue::from_i64(j as i64) * h[j] * self.c[k - j];
            }
            let v = self.c[k] - s / BoundedValue::from_i64(k as i64);
            h.push(v.checked_div(f0)?);
        }
        Some(Jet { c: h })
    }

    /// `f^a` for `f > 0` on the whole expansion set.
    pub fn powf(&self, a: BoundedValue) -> Option<Jet> {
        let f0 = self.c[0];
        if f0.lo() <= 0.0 {
            return None;
        }
        let n = self.c.len();
        let mut h = Vec::with_capacity(n);
        h.push(f0.powf(a)?);
        let a1 = a + BoundedValue::ONE;
        for k in 1..n {
            let kb = BoundedValue::from_i64(k as i64);
            let mut s = BoundedValue::ZERO;
            for j in 1..=k {
                let w = a1 * BoundedValue::from_i64(j as i64) - kb;
                s = s + w * self.c[j] * h[k - j];
            }
            h.push(s.checked_div(kb * f0)?);
        }
        Some(Jet { c: h })
    }

    pub fn sqrt(&self) -> Option<Jet> {
        self.powf(BoundedValue::point(0.5))
    }

    /// `(sin f, cos f)`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let mut s = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        s.push(self.c[0].sin());
        c.push(self.c[0].cos());
        for k in 1..n {
            let mut ss = BoundedValue::ZERO;
            let mut cc = BoundedValue::ZERO;
            for j in 1..=k {
                let jf = BoundedValue::from_i64(j as i64) * self.c[j];
                ss = ss + jf * c[k - j];
                cc = cc + jf * s[k - j];
            }
            let kb = BoundedValue::from_i64(k as i64);
            s.push(ss / kb);
            c.push(-(cc / kb));
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut acc = self.constant_like(BoundedValue::ONE);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Enclosure of the represented function over `[x0 + lo, x0 + hi]`, given
    /// the expansion at `x0` and the offset interval.
    pub fn eval_offset(&self, d: BoundedValue) -> BoundedValue {
        let mut acc = BoundedValue::ZERO;
        for k in (0..self.c.len()).rev() {
            acc = acc * d + self.c[k];
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(&a, &b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(&a, &b)| a - b).collect() }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|&a| -a).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut h = vec![BoundedValue::ZERO; n];
        for k in 0..n {
            let mut s = BoundedValue::ZERO;
            for j in 0..=k {
                s = s + self.c[j] * o.c[k - j];
            }
            h[k] = s;
        }
        Jet { c: h }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        &self + &o
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        &self - &o
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        &self * &o
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(b: BoundedValue, x: f64) -> bool {
        b.inflate(1e-12 * x.abs().max(1.0)).contains(x)
    }

    #[test]
    fn exp_coefficients() {
        let j = Jet::variable(BoundedValue::ZERO, 5).exp();
        let mut f = 1.0;
        for k in 0..=5 {
            if k > 0 {
                f *= k as f64;
            }
            assert!(close(j.coeff(k), 1.0 / f));
        }
    }

    #[test]
    fn sin_cos_and_division() {
        let x = Jet::variable(BoundedValue::point(0.3), 4);
        let (s, c) = x.sin_cos();
        let t = s.div(&c).unwrap();
        // tan'(x) = 1 + tan²(x)
        let tan = 0.3f64.tan();
        assert!(close(t.coeff(1), 1.0 + tan * tan));
        let back = &t * &c;
        for k in 0..=4 {
            assert!(back.coeff(k).overlaps(&s.coeff(k).inflate(1e-12)));
        }
    }

    #[test]
    fn powf_matches_closed_form() {
        let x = Jet::variable(BoundedValue::point(2.0), 3);
        let p = x.powf(BoundedValue::point(-0.75)).unwrap();
        let a = -0.75f64;
        assert!(close(p.coeff(0), 2f64.powf(a)));
        assert!(close(p.coeff(1), a * 2f64.powf(a - 1.0)));
        assert!(close(p.coeff(2), a * (a - 1.0) / 2.0 * 2f64.powf(a - 2.0)));
        let l = x.ln().unwrap();
        assert!(close(l.coeff(2), -1.0 / 8.0));
    }

    #[test]
    fn interval_seed_encloses_all_points() {
        let x = Jet::variable(BoundedValue::new(0.0, 1.0), 3);
        let e = x.exp();
        for xi in [0.0, 0.5, 1.0f64] {
            assert!(e.coeff(2).contains(xi.exp() / 2.0));
        }
    }
}
