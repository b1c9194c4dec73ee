use std::ops::{Add, Mul, Neg, Sub};

use super::bounded::BoundedValue;

/// Rectangular complex enclosure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexBounded {
    pub re: BoundedValue,
    pub im: BoundedValue,
}

impl ComplexBounded {
    pub fn new(re: BoundedValue, im: BoundedValue) -> ComplexBounded {
        ComplexBounded { re, im }
    }

    pub fn real(re: BoundedValue) -> ComplexBounded {
        ComplexBounded { re, im: BoundedValue::ZERO }
    }

    pub fn norm_sqr(&self) -> BoundedValue {
        self.re.sqr() + self.im.sqr()
    }

    /// Upper bound on the modulus.
    pub fn abs_upper(&self) -> f64 {
        self.norm_sqr().sqrt().expect("nonnegative").hi()
    }

    /// `None` when the divisor enclosure may contain zero.
    pub fn checked_div(self, o: ComplexBounded) -> Option<ComplexBounded> {
        let d = o.norm_sqr();
        if d.lo() <= 0.0 {
            return None;
        }
        let re = (self.re * o.re + self.im * o.im).checked_div(d)?;
        let im = (self.im * o.re - self.re * o.im).checked_div(d)?;
        Some(ComplexBounded { re, im })
    }

    pub fn exp(self) -> ComplexBounded {
        let m = self.re.exp();
        ComplexBounded { re: m * self.im.cos(), im: m * self.im.sin() }
    }

    pub fn scale(self, k: BoundedValue) -> ComplexBounded {
        ComplexBounded { re: self.re * k, im: self.im * k }
    }
}

impl Add for ComplexBounded {
    type Output = ComplexBounded;
    fn add(self, o: ComplexBounded) -> ComplexBounded {
        ComplexBounded { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for ComplexBounded {
    type Output = ComplexBounded;
    fn sub(self, o: ComplexBounded) -> ComplexBounded {
        ComplexBounded { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for ComplexBounded {
    type Output = ComplexBounded;
    fn neg(self) -> ComplexBounded {
        ComplexBounded { re: -self.re, im: -self.im }
    }
}

impl Mul for ComplexBounded {
    type Output = ComplexBounded;
    fn mul(self, o: ComplexBounded) -> ComplexBounded {
        ComplexBounded { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_inverts_multiplication() {
        let a = ComplexBounded::new(BoundedValue::point(1.5), BoundedValue::point(-2.0));
        let b = ComplexBounded::new(BoundedValue::point(0.25), BoundedValue::point(3.0));
        let q = (a * b).checked_div(b).unwrap();
        assert!(q.re.contains(1.5) && q.im.contains(-2.0));
    }

    #[test]
    fn zero_divisor_rejected() {
        let z = ComplexBounded::real(BoundedValue::new(-1e-3, 1e-3));
        assert!(ComplexBounded::real(BoundedValue::ONE).checked_div(z).is_none());
    }
}
