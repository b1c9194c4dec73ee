//! The Stokes semigroup `e^{−tA}` by contour integration, the resolvent, and
//! fractional powers `A^α`.
//!
//! `A` acts on the pair basis mode by mode with eigenvalue
//! `μ = π²(n² + m²)`. The contour `Γ` is the pair of rays `r e^{±iβ}`,
//! `β = 3π/5`, and per mode
//!
//! `e^{−tμ} = (1/π) ∫₀^∞ Im(e^{iβ} e^{λt} / (λ + μ)) dr`, `λ = r e^{iβ}`.
//!
//! The integral is split at `l`: `[0, l]` by validated quadrature, the rest
//! bounded through `gamma_tail` with `|λ + μ| ≥ r sin β`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::approxcore::special::{cos_beta, sin_beta};
use crate::approxcore::{gamma_tail, integrate_with_breaks, BoundedValue, ComplexBounded, ConstantsTable, Jet, QuadConfig, Rational};
use crate::error::{Error, Result};
use crate::helmholtz::VectorFieldName;
use crate::spectral::{FourierField, PairField};

/// `π²(n² + m²)`.
pub fn eigenvalue(n: i64, m: i64) -> BoundedValue {
    BoundedValue::pi().sqr() * BoundedValue::from_i64(n * n + m * m)
}

/// `(λ + A)^{−1} a` as real and imaginary pair fields.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPair {
    pub re: PairField,
    pub im: PairField,
}

/// Mode-wise `a / (λ + π²(n²+m²))` on a band-limited field.
pub fn resolvent_apply(a: &PairField, lambda: ComplexBounded) -> Result<ComplexPair> {
    if !a.is_band_limited() {
        return Err(Error::Precondition("resolvent_apply needs a band-limited field".into()));
    }
    let mut re = PairField::zeros(a.cutoff());
    let mut im = PairField::zeros(a.cutoff());
    for (n, m) in a.modes().collect::<Vec<_>>() {
        let (x, y) = a.coeffs(n, m);
        if x == BoundedValue::ZERO && y == BoundedValue::ZERO {
            continue;
        }
        let d = lambda + ComplexBounded::real(eigenvalue(n, m));
        let inv = ComplexBounded::real(BoundedValue::ONE)
            .checked_div(d)
            .ok_or_else(|| Error::ContourViolation(format!("λ + π²({}) encloses 0 at mode ({n}, {m})", n * n + m * m)))?;
        re.set(n, m, x * inv.re, y * inv.re)?;
        im.set(n, m, x * inv.im, y * inv.im)?;
    }
    Ok(ComplexPair { re, im })
}

/// `(1/(π sin β)) ∫_l^∞ e^{t r cos β}/r dr`: bound on the contour remainder
/// beyond `l` per unit coefficient, uniformly in the mode; `target` is the
/// quadrature radius allowed on the integral.
pub fn contour_tail(l: BoundedValue, t: BoundedValue, target: f64) -> Result<f64> {
    let g = gamma_tail(l, t, target)?;
    Ok((g / (BoundedValue::pi() * sin_beta())).hi())
}

/// Smallest dyadic-grid `l` whose remainder times `‖a‖` is at most `2^{−(K+7)}`.
pub fn tail_cutoff_l(t: BoundedValue, norm_a: BoundedValue, k: u32) -> Result<BoundedValue> {
    if t.lo() <= 0.0 {
        return Err(Error::Precondition(format!("tail_cutoff_l needs t > 0, got {t:?}; use the small-time path")));
    }
    let target = 2f64.powi(-(k as i32) - 7);
    let na = norm_a.hi();
    if na == 0.0 {
        return Ok(BoundedValue::ONE);
    }
    let qt = target / na / 16.0;
    let ok = |l: f64| -> Result<bool> {
        let tail = contour_tail(BoundedValue::point(l), t, qt)?;
        Ok((BoundedValue::point(tail) * BoundedValue::point(na)).hi() <= target)
    };
    let mut hi = 1.0;
    while !ok(hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::BudgetNotMet(format!("contour cutoff beyond 1e12 for t = {t:?}")));
        }
    }
    // bisect on a grid of hi/64 so that results are deterministic and monotone in t
    let step = hi / 64.0;
    let (mut lo_i, mut hi_i) = (0u32, 64u32);
    while hi_i - lo_i > 1 {
        let mid = (lo_i + hi_i) / 2;
        if mid > 0 && ok(step * mid as f64)? {
            hi_i = mid;
        } else {
            lo_i = mid;
        }
    }
    Ok(BoundedValue::point(step * hi_i as f64))
}

type ContourKey = (i64, u64, u64, u64, u64);

fn contour_cache() -> &'static Mutex<HashMap<ContourKey, BoundedValue>> {
    static C: OnceLock<Mutex<HashMap<ContourKey, BoundedValue>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `(1/π) ∫₀^l Im(e^{iβ} e^{λt}/(λ + μ)) dr` for `μ = π² q`, radius ≤ `target`.
pub fn contour_head(q: i64, t: BoundedValue, l: BoundedValue, target: f64) -> Result<BoundedValue> {
    let key = (q, t.lo().to_bits(), t.hi().to_bits(), l.hi().to_bits(), target.to_bits());
    if let Some(v) = contour_cache().lock().expect("contour cache").get(&key) {
        return Ok(*v);
    }
    let mu = BoundedValue::pi().sqr() * BoundedValue::from_i64(q);
    let (c, s) = (cos_beta(), sin_beta());
    let pi = BoundedValue::pi();
    // Im(e^{iβ} e^{λt}/(λ+μ)) = e^{trc}[sin(trs)(r + μc) + cos(trs) μ s] / (r² + 2rμc + μ²)
    let f = move |r: &Jet| -> Option<Jet> {
        let e = r.scale(t * c).exp();
        let (sn, cs) = r.scale(t * s).sin_cos();
        let num = &(&sn * &r.add_const(mu * c)) + &cs.scale(mu * s);
        let den = (&r.sqr() + &r.scale(BoundedValue::point(2.0) * mu * c)).add_const(mu.sqr());
        Some((&e * &num).div(&den)?.scale(BoundedValue::ONE / pi))
    };
    let lmax = l.hi();
    let mut breaks = vec![0.0];
    let mut b = (mu.mid() * 0.25).max(1.0);
    while b < lmax {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(lmax);
    let cfg = QuadConfig { order: 12, max_cells: 200_000 };
    let v = integrate_with_breaks(&f, &breaks, target, &cfg)?;
    contour_cache().lock().expect("contour cache").insert(key, v);
    Ok(v)
}

/// Enclosure of `e^{−tπ²q}` through the contour: head quadrature plus tail.
pub fn contour_factor(q: i64, t: BoundedValue, l: BoundedValue, target: f64) -> Result<BoundedValue> {
    let head = contour_head(q, t, l, target)?;
    Ok(head + BoundedValue::symmetric(contour_tail(l, t, target)?))
}

/// Budget report of one semigroup application.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SemigroupReport {
    pub path: &'static str,
    pub l: Option<f64>,
    pub quadrature_target: Option<f64>,
    pub small_time_bound: Option<f64>,
    pub mode_cutoff: Option<usize>,
}

/// `e^{−tA} a` with `‖e^{−tA}a − mid(out)‖₂ ≤ uncertainty(out) ≤ 2^{−K}`
/// whenever `uncertainty(a)` is at most `2^{−(K+1)}`.
///
/// Each head coefficient is multiplied by an enclosure of `e^{−tμ}` obtained
/// from the contour, so it contains the exact heat factor times the input.
/// Tails contract.
pub fn semigroup_apply(a: &PairField, t: BoundedValue, k: u32) -> Result<(PairField, SemigroupReport)> {
    if t.lo() < 0.0 {
        return Err(Error::Precondition(format!("semigroup needs t ≥ 0, got {t:?}")));
    }
    if t.hi() == 0.0 {
        return Ok((a.clone(), SemigroupReport { path: "identity", l: None, quadrature_target: None, small_time_bound: None, mode_cutoff: None }));
    }
    // small time: ‖e^{−tA}a − a‖ ≤ C t^{1/2} ‖A^{1/2} a‖
    let c = ConstantsTable::default_table().c_small_time.value;
    if let Ok(an) = a.a_norm(&Rational::new(1, 2)) {
        let bound = (c * t.nonneg().sqrt().expect("t ≥ 0") * an).hi();
        if bound <= 2f64.powi(-(k as i32) - 2) {
            let out = add_component_slack(a, bound);
            return Ok((out, SemigroupReport { path: "small-time", l: None, quadrature_target: None, small_time_bound: Some(bound), mode_cutoff: None }));
        }
    }
    if t.lo() <= 0.0 {
        return Err(Error::BudgetNotMet(format!("t enclosure {t:?} touches 0 and the small-time bound is not met")));
    }
    let norm = BoundedValue::point(a.l2_norm().hi().max(1e-300));
    let l = tail_cutoff_l(t, norm, k)?;
    let qtarget = 2f64.powi(-(k as i32) - 3) / norm.hi().max(1.0);
    let mut out = PairField::zeros(a.cutoff());
    let mut factors: HashMap<i64, BoundedValue> = HashMap::new();
    for (n, m) in a.modes().collect::<Vec<_>>() {
        let (x, y) = a.coeffs(n, m);
        if x == BoundedValue::ZERO && y == BoundedValue::ZERO {
            continue;
        }
        let q = n * n + m * m;
        let f = match factors.get(&q) {
            Some(f) => *f,
            None => {
                let f = contour_factor(q, t, l, qtarget)?;
                factors.insert(q, f);
                f
            }
        };
        out.set(n, m, x * f, y * f)?;
    }
    if !a.is_band_limited() {
        out = copy_tails(&out, a);
    }
    let mc = mode_cutoff(t, &a.center(), l, k, true).ok();
    Ok((out, SemigroupReport { path: "contour", l: Some(l.hi()), quadrature_target: Some(qtarget), small_time_bound: None, mode_cutoff: mc }))
}

/// `e^{−tA}` on a name: approximant `K + 1`, then the contour at `K + 1`.
pub fn semigroup_apply_name(a: &VectorFieldName, t: BoundedValue, k: u32) -> Result<PairField> {
    let q = a.approx(k + 2)?;
    Ok(semigroup_apply(&q, t, k + 1)?.0)
}

/// Tails of `a` carried over: `e^{−tA}` contracts every weighted norm of the
/// discarded modes.
fn copy_tails(out: &PairField, a: &PairField) -> PairField {
    let mut f1 = out.u1().clone();
    let mut f2 = out.u2().clone();
    f1.tail_l2 = a.u1().tail_l2;
    f2.tail_l2 = a.u2().tail_l2;
    f1.tail_hs = a.u1().tail_hs.clone();
    f2.tail_hs = a.u2().tail_hs.clone();
    PairField::new(f1, f2).expect("pair bases")
}

/// Adds a non-orthogonal error of pair norm `e` to both component tails.
pub fn add_component_slack(a: &PairField, e: f64) -> PairField {
    let mut f1 = a.u1().clone();
    let mut f2 = a.u2().clone();
    for f in [&mut f1, &mut f2] {
        f.tail_l2 = (BoundedValue::point(f.tail_l2) + BoundedValue::point(e)).hi();
        f.tail_hs.clear();
    }
    PairField::new(f1, f2).expect("pair bases")
}

/// Smallest `k` with `(1/(1+2k²)) (L/2π)² Σ_{n>k or m>k} (1+n²+m²)|a_{nm}|² < 2^{−2(K+7)}`,
/// `L = l e^{lt}` (literal) or `L = l` (sharpened: `|e^{λt}| ≤ 1` on the rays).
pub fn mode_cutoff(t: BoundedValue, a: &PairField, l: BoundedValue, k: u32, sharpened: bool) -> Result<usize> {
    if t.lo() <= 0.0 {
        return Err(Error::Precondition("mode_cutoff needs t > 0".into()));
    }
    let big_l = if sharpened { l } else { l * (l * t).exp() };
    let pref = (big_l / (BoundedValue::point(2.0) * BoundedValue::pi())).sqr();
    let target = 2f64.powi(-2 * (k as i32 + 7));
    let tail = a.tail_for(&Rational::one())?;
    for kk in 0..=a.cutoff() {
        let mut acc = BoundedValue::point(tail).sqr();
        for (n, m) in a.modes().collect::<Vec<_>>() {
            if n as usize > kk || m as usize > kk {
                let (x, y) = a.coeffs(n, m);
                acc = acc + BoundedValue::from_i64(1 + n * n + m * m) * (BoundedValue::point(x.mag()).sqr() + BoundedValue::point(y.mag()).sqr());
            }
        }
        let kb = BoundedValue::from_i64(kk as i64);
        let v = pref * acc / (BoundedValue::ONE + BoundedValue::point(2.0) * kb.sqr());
        if v.hi() < target {
            return Ok(kk);
        }
    }
    Err(Error::BudgetNotMet(format!("no mode cutoff up to {} meets 2^-{}", a.cutoff(), 2 * (k + 7))))
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if !alpha.is_positive() || *alpha >= Rational::one() {
        return Err(Error::Precondition(format!("fractional power needs 0 < α < 1, got {alpha}")));
    }
    Ok(())
}

/// `A^α a`: mode-wise `(π²(n²+m²))^α`; tails need the `H^{2α}` data of `a`.
pub fn frac_power_apply(a: &PairField, alpha: &Rational) -> Result<PairField> {
    check_alpha(alpha)?;
    let pi2a = BoundedValue::pi().sqr().pow_rational(alpha).expect("π² > 0");
    let f = |c: &FourierField| -> Result<FourierField> {
        let mut out = c.map_modes(
            |n, m| if n == 0 && m == 0 { BoundedValue::ZERO } else { pi2a * BoundedValue::from_i64(n * n + m * m).pow_rational(alpha).expect("positive") },
            |_| Some(0.0),
        );
        if !c.is_band_limited() {
            // (n²+m²)^{2α}(1+n²+m²)^s ≤ (1+n²+m²)^{s+2α}
            let two_a = alpha + alpha;
            out.tail_l2 = (pi2a * BoundedValue::point(c.tail_for(&two_a)?)).hi();
            out.tail_hs.clear();
            for s in c.tail_hs.keys() {
                if let Ok(t) = c.tail_for(&(s + &two_a)) {
                    out.tail_hs.insert(s.clone(), (pi2a * BoundedValue::point(t)).hi());
                }
            }
        }
        Ok(out)
    };
    PairField::new(f(a.u1())?, f(a.u2())?)
}

/// Both sides of `‖A^α e^{−tA} a‖ ≤ C_α t^{−α} ‖a‖` (diagnostic).
#[derive(Clone, Debug, Serialize)]
pub struct SmoothingReport {
    pub alpha: String,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub c_alpha: f64,
    pub margin: f64,
}

pub fn smoothing_bound_check(a: &PairField, alpha: &Rational, t: BoundedValue, k: u32) -> Result<SmoothingReport> {
    if t.lo() <= 0.0 {
        return Err(Error::Precondition("smoothing check needs t > 0".into()));
    }
    let table = ConstantsTable::default_table();
    let ca = table.c_alpha(alpha)?.value;
    let (et, _) = semigroup_apply(a, t, k)?;
    let lhs = if alpha.is_zero() { et.l2_norm() } else { frac_power_apply(&et, alpha)?.a_norm(&Rational::zero())? };
    let ta = t.pow_rational(&-alpha.clone()).expect("t > 0");
    let rhs = ca * ta * a.l2_norm();
    Ok(SmoothingReport {
        alpha: alpha.to_string(),
        t: t.mid(),
        lhs: lhs.hi(),
        rhs: rhs.lo(),
        c_alpha: ca.mid(),
        margin: rhs.lo() - lhs.hi(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approxcore::integrate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solenoidal_random(rng: &mut ChaCha8Rng, c: usize) -> PairField {
        let mut f = PairField::zeros(c);
        for n in 1..=c as i64 {
            for m in 1..=c as i64 {
                let g = PairField::solenoidal_mode(c, n, m, BoundedValue::point(rng.gen_range(-1.0..1.0) / (n * m) as f64)).unwrap();
                f = f.add(&g).unwrap();
            }
        }
        f
    }

    fn heat(n: i64, m: i64, t: f64) -> f64 {
        (-t * std::f64::consts::PI.powi(2) * (n * n + m * m) as f64).exp()
    }

    #[test]
    fn resolvent_examples() {
        let a = PairField::solenoidal_mode(2, 1, 1, BoundedValue::ONE).unwrap();
        let r = resolvent_apply(&a, ComplexBounded::real(BoundedValue::ONE)).unwrap();
        let want = 1.0 / (1.0 + 2.0 * std::f64::consts::PI.powi(2));
        let (x, y) = r.re.coeffs(1, 1);
        let (x0, y0) = a.coeffs(1, 1);
        assert!((x / x0).inflate(1e-14).contains(want) && (y / y0).inflate(1e-14).contains(want));
        let z = resolvent_apply(&PairField::zeros(3), ComplexBounded::real(BoundedValue::ONE)).unwrap();
        assert_eq!(z.re.l2_norm().hi(), 0.0);
        let bad = ComplexBounded::real(-eigenvalue(1, 1));
        assert_eq!(resolvent_apply(&a, bad).unwrap_err().kind(), "contour-violation");
    }

    #[test]
    fn resolvent_inverts_lambda_plus_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = solenoidal_random(&mut rng, 3);
        let lam = ComplexBounded::new(BoundedValue::point(-0.4), BoundedValue::point(1.3));
        let r = resolvent_apply(&a, lam).unwrap();
        for (n, m) in a.modes().collect::<Vec<_>>() {
            let d = lam + ComplexBounded::real(eigenvalue(n, m));
            for i in 0..2 {
                let z = ComplexBounded::new(r.re.component(i).re(n, m), r.im.component(i).re(n, m)) * d;
                assert!(z.re.inflate(1e-13).contains(a.component(i).re(n, m).mid()));
                assert!(z.im.inflate(1e-13).contains(0.0));
            }
        }
    }

    #[test]
    fn contour_reproduces_heat_factor() {
        for (q, t) in [(2i64, 0.1), (5, 0.5), (1, 1.0), (72, 1.0 / 64.0)] {
            let tt = BoundedValue::point(t);
            let l = tail_cutoff_l(tt, BoundedValue::ONE, 14).unwrap();
            let f = contour_factor(q, tt, l, 1e-7).unwrap();
            let want = (-t * std::f64::consts::PI.powi(2) * q as f64).exp();
            assert!(f.contains(want), "q = {q}, t = {t}: {f:?} vs {want}");
            assert!(f.rad() < 1e-6);
        }
    }

    #[test]
    fn tail_cutoff_monotone() {
        let l1 = tail_cutoff_l(BoundedValue::point(1.0), BoundedValue::ONE, 10).unwrap();
        let l2 = tail_cutoff_l(BoundedValue::point(2.0), BoundedValue::ONE, 10).unwrap();
        assert!(l2.hi() <= l1.hi());
        let lh = tail_cutoff_l(BoundedValue::point(1.0), BoundedValue::point(0.5), 10).unwrap();
        assert!(lh.hi() <= l1.hi());
        // oracle: direct quadrature of the tail integral over [l, 40 l] plus a crude bound beyond
        let t = 1.0;
        let c = cos_beta().mid();
        let l = l1.hi();
        let f = |r: &Jet| r.scale(BoundedValue::point(t * c)).exp().div(r);
        let body = integrate(&f, l, 40.0 * l, 1e-12, &QuadConfig::default()).unwrap();
        let rest = (t * c * 40.0 * l).exp() / (t * c.abs() * 40.0 * l);
        let tail = (body.hi() + rest) / (std::f64::consts::PI * sin_beta().lo());
        assert!(tail <= 2f64.powi(-17) * (1.0 + 1e-9));
        assert_eq!(tail_cutoff_l(BoundedValue::ZERO, BoundedValue::ONE, 3).unwrap_err().kind(), "precondition");
    }

    #[test]
    fn single_mode_semigroup_matches_residue() {
        let a = PairField::solenoidal_mode(2, 1, 1, BoundedValue::ONE).unwrap();
        let (out, rep) = semigroup_apply(&a, BoundedValue::point(0.1), 12).unwrap();
        assert_eq!(rep.path, "contour");
        let (x, y) = out.coeffs(1, 1);
        let (x0, y0) = a.coeffs(1, 1);
        let f = (-0.2 * std::f64::consts::PI.powi(2)).exp();
        assert!(x.contains(x0.mid() * f) && y.contains(y0.mid() * f));
        assert!(out.uncertainty() <= 2f64.powi(-12));
    }

    #[test]
    fn identity_and_small_time_paths() {
        let a = PairField::solenoidal_mode(2, 1, 1, BoundedValue::point(1e-3)).unwrap();
        let (z, rep) = semigroup_apply(&a, BoundedValue::ZERO, 8).unwrap();
        assert_eq!(rep.path, "identity");
        assert_eq!(z, a);
        let (s, rep) = semigroup_apply(&a, BoundedValue::point(1e-9), 8).unwrap();
        assert_eq!(rep.path, "small-time");
        let exact = a.scale(BoundedValue::point(heat(1, 1, 1e-9)));
        assert!(s.center().sub(&exact).unwrap().l2_norm().hi() <= s.uncertainty());
    }

    #[test]
    fn semigroup_law_and_contractivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = solenoidal_random(&mut rng, 3);
        let (t, s) = (BoundedValue::point(0.05), BoundedValue::point(0.1));
        let k = 12;
        let (ts, _) = semigroup_apply(&a, t + s, k).unwrap();
        let (e1, _) = semigroup_apply(&a, t, k).unwrap();
        let (e2, _) = semigroup_apply(&e1, s, k).unwrap();
        let d = ts.center().sub(&e2.center()).unwrap().l2_norm();
        assert!(d.lo() <= ts.uncertainty() + e2.uncertainty());
        assert!(e1.l2_norm().lo() <= a.l2_norm().hi() + e1.uncertainty());
    }

    #[test]
    fn mode_cutoff_examples() {
        let a = PairField::solenoidal_mode(4, 2, 3, BoundedValue::ONE).unwrap();
        let t = BoundedValue::point(0.5);
        let l = tail_cutoff_l(t, BoundedValue::ONE, 6).unwrap();
        assert_eq!(mode_cutoff(t, &a, l, 6, true).unwrap(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = solenoidal_random(&mut rng, 5);
        let k = mode_cutoff(t, &b, l, 2, true).unwrap();
        // oracle: the residual beyond k summed on a doubled grid
        let big = b.with_cutoff(10);
        let mut acc = 0.0;
        for (n, m) in big.modes().collect::<Vec<_>>() {
            if n as usize > k || m as usize > k {
                let (x, y) = big.coeffs(n, m);
                acc += (1 + n * n + m * m) as f64 * (x.mid().powi(2) + y.mid().powi(2));
            }
        }
        let lv = l.hi() / (2.0 * std::f64::consts::PI);
        assert!(lv * lv * acc / (1.0 + 2.0 * (k * k) as f64) < 2f64.powi(-18));
        let lit = mode_cutoff(t, &b, l, 2, false);
        assert!(lit.map(|x| x >= k).unwrap_or(true));
    }

    #[test]
    fn frac_power_examples() {
        let a = PairField::solenoidal_mode(2, 1, 1, BoundedValue::ONE).unwrap();
        let h = frac_power_apply(&a, &Rational::new(1, 2)).unwrap();
        let want = (2.0 * std::f64::consts::PI.powi(2)).sqrt();
        assert!((h.coeffs(1, 1).1 / a.coeffs(1, 1).1).inflate(1e-14).contains(want));
        assert_eq!(frac_power_apply(&a, &Rational::one()).unwrap_err().kind(), "precondition");
    }

    #[test]
    fn frac_power_matches_resolvent_integral() {
        // ∫₀^∞ s^{−3/4} μ/(s+μ) ds = μ^{1/4} π/sin(π/4); with s = μ v⁴ this is
        // 4 μ^{1/4} ∫₀^∞ dv/(1+v⁴), split at v = 1 and folded by v ↦ 1/v.
        let cfg = QuadConfig::default();
        let inner = integrate(&|v: &Jet| v.sqr().sqr().add_const(BoundedValue::ONE).recip(), 0.0, 1.0, 1e-13, &cfg).unwrap();
        let outer = integrate(&|v: &Jet| v.sqr().div(&v.sqr().sqr().add_const(BoundedValue::ONE)), 0.0, 1.0, 1e-13, &cfg).unwrap();
        let a = PairField::solenoidal_mode(3, 2, 3, BoundedValue::ONE).unwrap();
        let h = frac_power_apply(&a, &Rational::new(1, 4)).unwrap();
        let factor = h.coeffs(2, 3).1 / a.coeffs(2, 3).1;
        let norm = BoundedValue::pi() / (BoundedValue::pi() / BoundedValue::point(4.0)).sin();
        let integral = BoundedValue::point(4.0) * factor * (inner + outer);
        assert!(integral.overlaps(&(factor * norm)));
    }

    #[test]
    fn frac_power_tail_uses_hs_data() {
        let mut a = PairField::solenoidal_mode(2, 1, 1, BoundedValue::ONE).unwrap();
        let mut f1 = a.u1().clone();
        let mut f2 = a.u2().clone();
        f1.tail_l2 = 1e-3;
        f2.tail_l2 = 1e-3;
        a = PairField::new(f1.clone(), f2.clone()).unwrap();
        assert_eq!(frac_power_apply(&a, &Rational::new(1, 2)).unwrap_err().kind(), "insufficient-data");
        f1.tail_hs.insert(Rational::one(), 1e-2);
        f2.tail_hs.insert(Rational::one(), 1e-2);
        let a = PairField::new(f1, f2).unwrap();
        let h = frac_power_apply(&a, &Rational::new(1, 2)).unwrap();
        assert!(h.u1().tail_l2 <= 1e-2 * std::f64::consts::PI * 1.0001);
    }

    #[test]
    fn smoothing_checks() {
        let a = PairField::solenoidal_mode(2, 2, 1, BoundedValue::ONE).unwrap();
        let r0 = smoothing_bound_check(&a, &Rational::zero(), BoundedValue::point(0.3), 10).unwrap();
        assert!(r0.margin >= 0.0 && r0.c_alpha == 1.0);
        // sup_t t^α λ^α e^{−tλ} = (α/e)^α at t = α/λ: the configured constant is tight
        let alpha = Rational::new(1, 2);
        let lam = std::f64::consts::PI.powi(2) * 5.0;
        let t = 0.5 / lam;
        let r = smoothing_bound_check(&a, &alpha, BoundedValue::point(t), 14).unwrap();
        assert!(r.margin >= -1e-3 && r.margin <= 1e-3, "{r:?}");
        assert!(r.c_alpha >= (0.5f64 / std::f64::consts::E).sqrt() * (1.0 - 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let b = solenoidal_random(&mut rng, 3);
        for t in [0.01, 0.1, 0.5] {
            for al in [Rational::new(1, 4), Rational::new(1, 2), Rational::new(3, 5)] {
                assert!(smoothing_bound_check(&b, &al, BoundedValue::point(t), 10).unwrap().margin >= 0.0);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn contour_matches_heat_on_random_fields(seed in 0u64..500, ti in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = solenoidal_random(&mut rng, 3);
            let t = [1.0 / 64.0, 0.25, 1.0][ti];
            let k = 14;
            let (out, _) = semigroup_apply(&a, BoundedValue::point(t), k).unwrap();
            let mut exact = PairField::zeros(3);
            for (n, m) in a.modes().collect::<Vec<_>>() {
                let (x, y) = a.coeffs(n, m);
                let h = BoundedValue::point(heat(n, m, t)).inflate(1e-16);
                exact.set(n, m, x * h, y * h).unwrap();
            }
            let d = out.center().sub(&exact.center()).unwrap().l2_norm().hi();
            prop_assert!(d <= 2f64.powi(-(k as i32)));
        }

        #[test]
        fn frac_power_additivity(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = solenoidal_random(&mut rng, 3);
            let half = frac_power_apply(&frac_power_apply(&a, &Rational::new(1, 4)).unwrap(), &Rational::new(1, 4)).unwrap();
            let whole = frac_power_apply(&a, &Rational::new(1, 2)).unwrap();
            for (n, m) in a.modes().collect::<Vec<_>>() {
                prop_assert!(half.coeffs(n, m).0.overlaps(&whole.coeffs(n, m).0));
                prop_assert!(half.coeffs(n, m).1.overlaps(&whole.coeffs(n, m).1));
            }
        }
    }
}
