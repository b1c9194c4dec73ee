//! Taylor models in local time `τ ∈ [0, h]`: an interval polynomial of fixed
//! degree plus a symmetric remainder valid on the whole panel.

use crate::approxcore::BoundedValue;

#[derive(Clone, Debug, PartialEq)]
pub struct Tm {
    pub c: Vec<BoundedValue>,
    /// Remainder radius: the modelled function lies within `r` of the polynomial.
    pub r: f64,
}

fn up(a: f64, b: f64) -> f64 {
    (BoundedValue::point(a) + BoundedValue::point(b)).hi()
}

fn mul_up(a: f64, b: f64) -> f64 {
    (BoundedValue::point(a) * BoundedValue::point(b)).hi()
}

impl Tm {
    pub fn zero(deg: usize) -> Tm {
        Tm { c: vec![BoundedValue::ZERO; deg + 1], r: 0.0 }
    }

    pub fn constant(v: BoundedValue, deg: usize) -> Tm {
        let mut t = Tm::zero(deg);
        t.c[0] = v;
        t
    }

    pub fn deg(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.r == 0.0 && self.c.iter().all(|v| *v == BoundedValue::ZERO)
    }

    /// Value at `τ`, remainder included.
    pub fn eval(&self, tau: BoundedValue) -> BoundedValue {
        let mut acc = BoundedValue::ZERO;
        for v in self.c.iter().rev() {
            acc = acc * tau + *v;
        }
        acc + BoundedValue::symmetric(self.r)
    }

    /// Enclosure of the range over `[0, h]`.
    pub fn range(&self, h: f64) -> BoundedValue {
        self.eval(BoundedValue::new(0.0, h))
    }

    pub fn mag(&self, h: f64) -> f64 {
        self.range(h).mag()
    }

    pub fn add_assign(&mut self, o: &Tm) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a = *a + *b;
        }
        self.r = up(self.r, o.r);
    }

    /// `self += k · o`.
    pub fn axpy(&mut self, k: BoundedValue, o: &Tm) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a = *a + k * *b;
        }
        self.r = up(self.r, mul_up(k.mag(), o.r));
    }

    pub fn scale(&self, k: BoundedValue) -> Tm {
        Tm { c: self.c.iter().map(|v| *v * k).collect(), r: mul_up(k.mag(), self.r) }
    }

    /// Product truncated to the common degree; overflow terms and remainders
    /// are bounded over `[0, h]`.
    pub fn mul(&self, o: &Tm, h: f64) -> Tm {
        let d = self.deg();
        let mut c = vec![BoundedValue::ZERO; d + 1];
        let mut over = BoundedValue::ZERO;
        let hb = BoundedValue::point(h);
        for (i, a) in self.c.iter().enumerate() {
            if *a == BoundedValue::ZERO {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                let p = *a * *b;
                if i + j <= d {
                    c[i + j] = c[i + j] + p;
                } else {
                    over = over + BoundedValue::point(p.mag()) * hb.powi((i + j) as u32);
                }
            }
        }
        let pa = self.poly_mag(h);
        let pb = o.poly_mag(h);
        let r = up(up(over.hi(), mul_up(self.r, pb)), up(mul_up(o.r, pa), mul_up(self.r, o.r)));
        Tm { c, r }
    }

    fn poly_mag(&self, h: f64) -> f64 {
        let mut acc = BoundedValue::ZERO;
        let t = BoundedValue::new(0.0, h);
        for v in self.c.iter().rev() {
            acc = acc * t + *v;
        }
        acc.mag()
    }

    /// Same function as a constant model: midpoint of the range plus radius.
    pub fn collapse(&self, h: f64) -> Tm {
        let r = self.range(h);
        let mut t = Tm::zero(self.deg());
        t.c[0] = BoundedValue::point(r.mid());
        t.r = (BoundedValue::point(r.hi()) - BoundedValue::point(r.mid())).hi().max((BoundedValue::point(r.mid()) - BoundedValue::point(r.lo())).hi());
        t
    }
}

/// `n!` as an enclosure.
pub fn factorial(n: usize) -> BoundedValue {
    let mut f = BoundedValue::ONE;
    for k in 2..=n {
        f = f * BoundedValue::from_i64(k as i64);
    }
    f
}

/// Solution on one panel of `ψ' = −μψ − g`, `ψ(0) = v0`:
/// `ψ(τ) = e^{−μτ} v0 − ∫₀^τ e^{−μ(τ−σ)} g(σ) dσ`.
///
/// Returns the model on the panel and an enclosure of `ψ(h)`.
pub fn duhamel_panel(mu: BoundedValue, v0: BoundedValue, g: &Tm, h: f64) -> (Tm, BoundedValue) {
    let d = g.deg();
    let hb = BoundedValue::point(h);
    let muh = (mu * hb).hi();
    if muh > 1.0 {
        // the forcing term is a positive average of g's range
        let gr = g.range(h);
        let e = (-(mu * hb)).exp();
        let one_m = BoundedValue::ONE - e;
        let end = e * v0 - one_m * gr / mu;
        let hull = v0.hull(end);
        let mut t = Tm::constant(BoundedValue::point(hull.mid()), d);
        t.r = (BoundedValue::point(hull.hi()) - BoundedValue::point(hull.mid())).hi().max((BoundedValue::point(hull.mid()) - BoundedValue::point(hull.lo())).hi());
        return (t, end);
    }
    let mut out = Tm::zero(d);
    // e^{−μτ} v0 to degree d, Lagrange remainder (μh)^{d+1}/(d+1)!
    let mut term = v0;
    for k in 0..=d {
        out.c[k] = out.c[k] + term;
        term = term * (-mu) / BoundedValue::from_i64(k as i64 + 1);
    }
    let lag = (BoundedValue::point(v0.mag()) * (mu * hb).powi(d as u32 + 1) / factorial(d + 1)).hi();
    out.r = up(out.r, lag);
    // ∫₀^τ e^{−μ(τ−σ)} σ^k dσ = Σ_j (−μ)^j k!/(j+k+1)! τ^{j+k+1}
    for (k, gk) in g.c.iter().enumerate() {
        if *gk == BoundedValue::ZERO {
            continue;
        }
        let kf = factorial(k);
        let mut j = 0usize;
        while j + k < d {
            let p = j + k + 1;
            let coef = (-mu).powi(j as u32) * kf / factorial(p);
            out.c[p] = out.c[p] - *gk * coef;
            j += 1;
        }
        // first dropped term times 2: successive ratios are μh/(p+1) ≤ 1/2
        let p = j + k + 1;
        let first = mu.powi(j as u32) * kf / factorial(p) * hb.powi(p as u32);
        out.r = up(out.r, mul_up(gk.mag(), (BoundedValue::point(2.0) * first).hi()));
    }
    // remainder of g: |∫ e^{−μ(τ−σ)} ρ dσ| ≤ |ρ| min(h, 1/μ)
    if g.r > 0.0 {
        let w = h.min((BoundedValue::ONE / mu).hi());
        out.r = up(out.r, mul_up(g.r, w));
    }
    let end = out.eval(hb);
    (out, end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_encloses_pointwise_product() {
        let h = 0.1;
        let mut a = Tm::zero(3);
        a.c = vec![BoundedValue::point(1.0), BoundedValue::point(-2.0), BoundedValue::point(0.5), BoundedValue::point(3.0)];
        a.r = 1e-6;
        let mut b = Tm::zero(3);
        b.c = vec![BoundedValue::point(0.3), BoundedValue::point(4.0), BoundedValue::ZERO, BoundedValue::point(-1.0)];
        let p = a.mul(&b, h);
        for i in 0..=10 {
            let t = h * i as f64 / 10.0;
            let pa = 1.0 - 2.0 * t + 0.5 * t * t + 3.0 * t * t * t;
            let pb = 0.3 + 4.0 * t - t * t * t;
            for da in [-1e-6, 1e-6] {
                assert!(p.eval(BoundedValue::point(t)).contains((pa + da) * pb));
            }
        }
    }

    #[test]
    fn duhamel_with_constant_forcing_matches_closed_form() {
        for (mu, h) in [(3.0, 0.1), (50.0, 0.1)] {
            let g = Tm::constant(BoundedValue::point(0.7), 4);
            let v0 = BoundedValue::point(1.2);
            let (tm, end) = duhamel_panel(BoundedValue::point(mu), v0, &g, h);
            let exact = |t: f64| (-mu * t).exp() * 1.2 - 0.7 * (1.0 - (-mu * t).exp()) / mu;
            assert!(end.inflate(1e-14).contains(exact(h)), "{mu}: {end:?} vs {}", exact(h));
            for i in 0..=8 {
                let t = h * i as f64 / 8.0;
                assert!(tm.eval(BoundedValue::point(t)).inflate(1e-14).contains(exact(t)));
            }
        }
    }

    #[test]
    fn duhamel_with_linear_forcing() {
        // g(τ) = τ: ψ = e^{−μτ}v0 − (μτ − 1 + e^{−μτ})/μ²
        let mu = 4.0;
        let h = 0.2;
        let mut g = Tm::zero(5);
        g.c[1] = BoundedValue::ONE;
        let (tm, _) = duhamel_panel(BoundedValue::point(mu), BoundedValue::point(0.5), &g, h);
        for i in 0..=8 {
            let t = h * i as f64 / 8.0;
            let e = (-mu * t).exp();
            let exact = e * 0.5 - (mu * t - 1.0 + e) / (mu * mu);
            assert!(tm.eval(BoundedValue::point(t)).inflate(1e-14).contains(exact));
        }
    }
}
