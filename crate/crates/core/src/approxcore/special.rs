//! Beta function, the contour tail integral, and the bump profile.

use super::bounded::BoundedValue;
use super::jet::Jet;
use super::quad::{integrate, integrate_with_breaks, QuadConfig};
use super::rational::Rational;
use crate::error::{Error, Result};

/// `cos(3π/5) = (1 − √5)/4`.
pub fn cos_beta() -> BoundedValue {
    (BoundedValue::ONE - BoundedValue::point(5.0).sqrt().unwrap()) / BoundedValue::point(4.0)
}

/// `sin(3π/5) = √(10 + 2√5)/4`.
pub fn sin_beta() -> BoundedValue {
    let s5 = BoundedValue::point(5.0).sqrt().unwrap();
    (BoundedValue::point(10.0) + BoundedValue::point(2.0) * s5).sqrt().unwrap() / BoundedValue::point(4.0)
}

/// The contour angle `3π/5` itself.
pub fn beta_angle() -> BoundedValue {
    BoundedValue::pi() * BoundedValue::point(3.0) / BoundedValue::point(5.0)
}

/// `exp(−1/(1−ρ²))` for `ρ < 1`, zero beyond; `None` where the expansion
/// set straddles `ρ = 1` and a genuine Taylor expansion is requested.
pub fn bump_jet(rho: &Jet) -> Option<Jet> {
    let d = &rho.constant_like(BoundedValue::ONE) - &rho.sqr();
    let dv = d.value();
    if dv.hi() <= 0.0 {
        return Some(rho.constant_like(BoundedValue::ZERO));
    }
    if dv.lo() > 0.0 {
        return Some((-d.recip()?).exp());
    }
    if rho.order() == 0 {
        let top = (-(BoundedValue::ONE / BoundedValue::point(dv.hi()))).exp().hi();
        return Some(rho.constant_like(BoundedValue::new(0.0, top)));
    }
    None
}

/// Width of the end piece `[1 − δ, 1]` of a radial bump integral.
pub const BUMP_END_CUT: f64 = 1.0 / 64.0;

/// Encloses `∫₀¹ b(r) w(r) dr` given `|w| ≤ w_max` on `[1 − δ, 1]`.
///
/// `w` multiplies the bump inside the closure passed here, which gets the bump
/// jet as its second argument. The end piece is bounded by `δ w_max b(1 − δ)`
/// since `b` decreases there; quadrature near `r = 1` would need range cells.
pub fn radial_bump_integral<F>(w: F, w_max: f64, target: f64, cfg: &QuadConfig) -> Result<BoundedValue>
where
    F: Fn(&Jet, &Jet) -> Option<Jet>,
{
    let cut = 1.0 - BUMP_END_CUT;
    let f = |r: &Jet| w(r, &bump_jet(r)?);
    let end_bump = bump_jet(&Jet::constant(BoundedValue::point(cut), 0)).expect("inside support").value();
    let end = (BoundedValue::point(BUMP_END_CUT * w_max) * end_bump).hi();
    let body = integrate(&f, 0.0, cut, (target - end).max(target * 0.25), cfg)?;
    Ok(body + BoundedValue::new(-end, end))
}

fn check_positive(r: &Rational, what: &str) -> Result<()> {
    if !r.is_positive() {
        return Err(Error::Domain(format!("{what} must be positive, got {r}")));
    }
    Ok(())
}

fn denom_u32(r: &Rational) -> Result<(u32, u32)> {
    let p: u32 = r.numer().try_into().map_err(|_| Error::Domain(format!("beta argument {r} too large")))?;
    let q: u32 = r.denom().try_into().map_err(|_| Error::Domain(format!("beta argument {r} too large")))?;
    if q > 60 || p > 4000 {
        return Err(Error::Domain(format!("beta argument {r} outside supported range")));
    }
    Ok((p, q))
}

/// Encloses `B(x, y) = ∫₀¹ (1−t)^{x−1} t^{y−1} dt` with radius at most `target`.
pub fn beta(x: &Rational, y: &Rational, target: f64) -> Result<BoundedValue> {
    check_positive(x, "beta x")?;
    check_positive(y, "beta y")?;
    let (px, qx) = denom_u32(x)?;
    let (py, qy) = denom_u32(y)?;
    let xm1 = BoundedValue::from_rational(&(x - Rational::one()));
    let ym1 = BoundedValue::from_rational(&(y - Rational::one()));
    let cfg = QuadConfig::default();
    let piece_target = target / 3.0;

    // t = u^qy on [0, 2^-qy]:  qy · u^{py−1} (1 − u^qy)^{x−1}
    let left = |u: &Jet| {
        let base = &u.constant_like(BoundedValue::ONE) - &u.powi(qy);
        let w = base.powf(xm1)?;
        Some((&u.powi(py - 1) * &w).scale(BoundedValue::from_i64(qy as i64)))
    };
    // 1 − t = v^qx on [1 − 2^-qx, 1]
    let right = |v: &Jet| {
        let base = &v.constant_like(BoundedValue::ONE) - &v.powi(qx);
        let w = base.powf(ym1)?;
        Some((&v.powi(px - 1) * &w).scale(BoundedValue::from_i64(qx as i64)))
    };
    let middle = |t: &Jet| {
        let one = t.constant_like(BoundedValue::ONE);
        let a = (&one - t).powf(xm1)?;
        let b = t.powf(ym1)?;
        Some(&a * &b)
    };
    let l = integrate(&left, 0.0, 0.5, piece_target, &cfg)?;
    let r = integrate(&right, 0.0, 0.5, piece_target, &cfg)?;
    let t0 = 2f64.powi(-(qy as i32));
    let t1 = 1.0 - 2f64.powi(-(qx as i32));
    let m = if t0 < t1 { integrate(&middle, t0, t1, piece_target, &cfg)? } else { BoundedValue::ZERO };
    Ok(l + m + r)
}

fn tail_point(l: f64, t: f64, target: f64) -> Result<BoundedValue> {
    let c = cos_beta();
    let a = BoundedValue::point(t) * (-c);
    let bound = |from: f64| -> BoundedValue {
        let ar = a * BoundedValue::point(from);
        ((-ar).exp() / ar).nonneg()
    };
    let r_end = (45.0 / a.lo()).max(l);
    if r_end <= l {
        return Ok(BoundedValue::new(0.0, bound(l).hi()));
    }
    let f = |r: &Jet| {
        let e = r.scale(-a).exp();
        e.div(r)
    };
    let mut breaks = vec![l];
    let mut x = l;
    while x * 2.0 < r_end {
        x *= 2.0;
        breaks.push(x);
    }
    breaks.push(r_end);
    let body = integrate_with_breaks(&f, &breaks, target, &QuadConfig::default())?;
    let tail = bound(r_end).hi();
    Ok(BoundedValue::new(body.lo().max(0.0), (body + BoundedValue::new(0.0, tail)).hi()))
}

/// Encloses `∫_l^∞ e^{t r cos β} r^{−1} dr` for `β = 3π/5`, uniformly over the
/// given enclosures of `l` and `t` (the integral decreases in both).
pub fn gamma_tail(l: BoundedValue, t: BoundedValue, target: f64) -> Result<BoundedValue> {
    if l.lo() <= 0.0 || t.lo() <= 0.0 {
        return Err(Error::Domain(format!("gamma_tail needs l > 0 and t > 0, got l = {l:?}, t = {t:?}")));
    }
    let upper = tail_point(l.lo(), t.lo(), target / 2.0)?;
    let lower = if l.is_point() && t.is_point() { upper } else { tail_point(l.hi(), t.hi(), target / 2.0)? };
    Ok(BoundedValue::new(lower.lo(), upper.hi()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn radial_bump_integral_matches_full_range() {
        let cfg = QuadConfig::default();
        let cut = radial_bump_integral(|_r, b| Some(b.clone()), 1.0, 1e-13, &cfg).unwrap();
        let full = integrate(&|r: &Jet| bump_jet(r), 0.0, 1.0, 1e-10, &cfg).unwrap();
        assert!(cut.overlaps(&full));
        assert!(cut.rad() <= 1e-13);
    }

    #[test]
    fn beta_trivial_and_reflection() {
        let b11 = beta(&r(1, 1), &r(1, 1), 1e-12).unwrap();
        assert!(b11.contains(1.0));
        let pi = std::f64::consts::PI;
        let b = beta(&r(3, 4), &r(1, 4), 1e-11).unwrap();
        assert!(b.inflate(1e-14).contains(pi * 2f64.sqrt()), "{b:?}");
        let h = beta(&r(1, 2), &r(1, 2), 1e-11).unwrap();
        assert!(h.inflate(1e-14).contains(pi), "{h:?}");
    }

    #[test]
    fn beta_symmetric() {
        let a = beta(&r(2, 3), &r(5, 4), 1e-11).unwrap();
        let b = beta(&r(5, 4), &r(2, 3), 1e-11).unwrap();
        assert!(a.overlaps(&b));
    }

    #[test]
    fn beta_domain_error() {
        assert_eq!(beta(&r(0, 1), &r(1, 2), 1e-9).unwrap_err().kind(), "domain");
    }

    #[test]
    fn trig_of_beta_consistent() {
        let th = beta_angle();
        assert!(th.cos().overlaps(&cos_beta()));
        assert!(th.sin().overlaps(&sin_beta()));
        assert!((cos_beta().sqr() + sin_beta().sqr()).inflate(1e-15).contains(1.0));
    }

    #[test]
    fn gamma_tail_monotone() {
        let one = BoundedValue::ONE;
        let g1 = gamma_tail(one, one, 1e-12).unwrap();
        let g2 = gamma_tail(BoundedValue::point(2.0), one, 1e-12).unwrap();
        let g3 = gamma_tail(one, BoundedValue::point(8.0), 1e-12).unwrap();
        assert!(g2.certainly_lt(&g1));
        assert!(g3.certainly_lt(&g1));
        assert!(gamma_tail(BoundedValue::ZERO, one, 1e-9).is_err());
    }
}
