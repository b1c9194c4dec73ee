//! Spectral coefficients of trimmed polynomials, mollified trimmed
//! polynomials and separable sums, with certified tails.
//!
//! Polynomials live on `(−1, 1)²`; the canonical square is reached through
//! `x = 2x' − 1`. Trimming a polynomial `p` at level `k` gives
//! `T(x) = p(x/s)` on `[−s, s]²`, `s = 1 − 2^{−k}`, and zero elsewhere.

use std::sync::Arc;

use rayon::prelude::*;

use super::basis::{sqrt2, Axis, Basis};
use super::field::FourierField;
use super::ghat::{ghat_decay_bound, GhatTable};
use super::moments::trig_moments;
use crate::approxcore::{integrate, BoundedValue, Jet, QuadConfig, Rational};
use crate::error::{Error, Result};
use crate::polyfield::{MollifiedElement, RationalPoly2};

/// A function of one canonical coordinate, evaluated on jets.
pub type Func1 = Arc<dyn Fn(&Jet) -> Option<Jet> + Send + Sync>;

/// `Σ_k f_k(x) g_k(y)` on the canonical square.
#[derive(Clone, Default)]
pub struct SeparableSum {
    pub terms: Vec<(Func1, Func1)>,
}

impl SeparableSum {
    pub fn new() -> SeparableSum {
        SeparableSum { terms: Vec::new() }
    }

    pub fn term(mut self, f: Func1, g: Func1) -> SeparableSum {
        self.terms.push((f, g));
        self
    }
}

impl std::fmt::Debug for SeparableSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SeparableSum({} terms)", self.terms.len())
    }
}

/// What to expand.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Trimmed { poly: &'a RationalPoly2, k: u32 },
    Mollified { poly: &'a RationalPoly2, k: u32, n: u32 },
    Separable { sum: &'a SeparableSum, quad_target: f64 },
}

impl<'a> Source<'a> {
    /// One component of a dense-set element.
    pub fn of(elem: &'a MollifiedElement, component: usize) -> Source<'a> {
        Source::Mollified { poly: elem.base().component(component), k: elem.k(), n: elem.n() }
    }
}

fn vanishes_on_boundary(p: &RationalPoly2) -> bool {
    let one = Rational::one();
    let m1 = -Rational::one();
    [p.restrict_x(&one), p.restrict_x(&m1), p.restrict_y(&one), p.restrict_y(&m1)]
        .iter()
        .all(|v| v.iter().all(|c| c.is_zero()))
}

type Cplx = (BoundedValue, BoundedValue);

fn cmul(a: Cplx, b: Cplx) -> Cplx {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// `J[g][i] = ∫_{−1}^{1} ξ^i conj(φ_g((sξ+1)/2)) dξ` for every grid index `g`.
fn one_d_table(kind: Option<Axis>, cutoff: usize, s: BoundedValue, deg: usize) -> Vec<Vec<Cplx>> {
    let z = BoundedValue::ZERO;
    let rt2 = sqrt2();
    let pi = BoundedValue::pi();
    match kind {
        Some(axis) => (0..=cutoff)
            .into_par_iter()
            .map(|nn| {
                let theta = pi * BoundedValue::from_i64(nn as i64) * s * BoundedValue::point(0.5);
                let (c, sn) = trig_moments(theta, deg);
                let (cq, sq) = match nn % 4 {
                    0 => (1.0, 0.0),
                    1 => (0.0, 1.0),
                    2 => (-1.0, 0.0),
                    _ => (0.0, -1.0),
                };
                let (cq, sq) = (BoundedValue::point(cq), BoundedValue::point(sq));
                (0..=deg)
                    .map(|i| match (axis, nn) {
                        (Axis::Sin, 0) => (z, z),
                        (Axis::Cos, 0) => (c[i], z),
                        (Axis::Sin, _) => (rt2 * (cq * sn[i] + sq * c[i]), z),
                        (Axis::Cos, _) => (rt2 * (cq * c[i] - sq * sn[i]), z),
                    })
                    .collect()
            })
            .collect(),
        None => (0..=2 * cutoff)
            .into_par_iter()
            .map(|g| {
                let n = g as i64 - cutoff as i64;
                let theta = pi * BoundedValue::from_i64(n.abs()) * s;
                let (c, sn) = trig_moments(theta, deg);
                let sign = if n < 0 { -BoundedValue::ONE } else { BoundedValue::ONE };
                // ∫ ξ^i e^{−iθξ} = C_i − i S_i, S odd in θ
                (0..=deg).map(|i| (c[i], -(sign * sn[i]))).collect()
            })
            .collect(),
    }
}

/// Exact-moment coefficients of the trimmed polynomial.
fn trimmed_coefficients(p: &RationalPoly2, k: u32, basis: Basis, cutoff: usize) -> FourierField {
    let s_rat = crate::polyfield::trim::trim_scale(k);
    let s = BoundedValue::from_rational(&s_rat);
    let deg = p.degree();
    let (kx, ky) = match basis {
        Basis::Trig(a, b) => (Some(a), Some(b)),
        Basis::Exp => (None, None),
    };
    let jx = one_d_table(kx, cutoff, s, deg);
    let jy = if kx == ky { jx.clone() } else { one_d_table(ky, cutoff, s, deg) };
    let a: Vec<Vec<BoundedValue>> =
        (0..=deg).map(|i| (0..=deg).map(|j| BoundedValue::from_rational(p.coeff_ref(i, j))).collect()).collect();
    let side = basis.side(cutoff);
    // B[g][j] = Σ_i Jx[g][i] a_ij
    let bmat: Vec<Vec<Cplx>> = (0..side)
        .map(|g| {
            (0..=deg)
                .map(|j| {
                    let mut acc = (BoundedValue::ZERO, BoundedValue::ZERO);
                    for i in 0..=deg {
                        if a[i][j] != BoundedValue::ZERO {
                            let t = cmul(jx[g][i], (a[i][j], BoundedValue::ZERO));
                            acc = (acc.0 + t.0, acc.1 + t.1);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let pref = s.sqr() * BoundedValue::point(0.25);
    let cells: Vec<Cplx> = (0..side * side)
        .into_par_iter()
        .map(|p| {
            let (g, h) = (p / side, p % side);
            let mut acc = (BoundedValue::ZERO, BoundedValue::ZERO);
            for j in 0..=deg {
                let t = cmul(bmat[g][j], jy[h][j]);
                acc = (acc.0 + t.0, acc.1 + t.1);
            }
            (acc.0 * pref, acc.1 * pref)
        })
        .collect();
    let re = cells.iter().map(|c| c.0).collect();
    let im = if basis.is_exp() { Some(cells.iter().map(|c| c.1).collect()) } else { None };
    FourierField::from_raw(basis, cutoff, re, im)
}

/// Half-frequency index of a signed mode index.
fn half_index(basis: Basis, n: i64) -> usize {
    match basis {
        Basis::Trig(..) => n as usize,
        Basis::Exp => 2 * n.unsigned_abs() as usize,
    }
}

/// Smallest index magnitude of the discarded modes.
fn first_tail_index(cutoff: usize) -> usize {
    cutoff + 1
}

/// `sup_{q ≥ q0} (1+2q²)^s D(q)² / denom(q)` over the candidate points
/// where the supremum can sit (`D` the mollifier decay in index units).
fn tail_sup(basis: Basis, n_moll: Option<u32>, q0: usize, s: &Rational, h1_route: bool) -> BoundedValue {
    let dec = |q: usize| -> f64 {
        match n_moll {
            Some(n) => ghat_decay_bound(n, half_index(basis, q as i64) as f64),
            None => 1.0,
        }
    };
    let mut cands = vec![q0];
    if let Some(n) = n_moll {
        // first q with D < 1
        let g1 = crate::approxcore::ConstantsTable::default_table().mollifier_grad_l1.value;
        let qc_h = (g1 * BoundedValue::pow2(n as i32) / (BoundedValue::pi() * BoundedValue::point(0.5))).hi();
        let per = match basis {
            Basis::Trig(..) => 1.0,
            Basis::Exp => 2.0,
        };
        let qc = (qc_h / per).floor() as usize + 1;
        for q in [qc.saturating_sub(1), qc, qc + 1] {
            if q >= q0 {
                cands.push(q);
            }
        }
    }
    let fs2 = basis.freq_scale().sqr();
    let mut best = BoundedValue::ZERO;
    for q in cands {
        let qb = BoundedValue::from_i64(q as i64);
        let w = (BoundedValue::ONE + BoundedValue::point(2.0) * qb.sqr()).pow_rational(s).expect("positive");
        let d = BoundedValue::point(dec(q)).sqr();
        let v = if h1_route { w * d / (fs2 * qb.sqr()) } else { w * d };
        best = best.max(v);
    }
    best
}

/// Coefficients at a fixed cutoff with every tail the source supports.
pub fn coefficients(src: Source<'_>, basis: Basis, cutoff: usize) -> Result<FourierField> {
    match src {
        Source::Trimmed { poly, k } => poly_coefficients(poly, k, None, basis, cutoff),
        Source::Mollified { poly, k, n } => {
            if n <= k {
                return Err(Error::Precondition(format!("mollification needs n ≥ k+1, got k = {k}, n = {n}")));
            }
            poly_coefficients(poly, k, Some(n), basis, cutoff)
        }
        Source::Separable { sum, quad_target } => separable_coefficients(sum, basis, cutoff, quad_target),
    }
}

fn poly_coefficients(p: &RationalPoly2, k: u32, n_moll: Option<u32>, basis: Basis, cutoff: usize) -> Result<FourierField> {
    if k == 0 {
        return Err(Error::Precondition("trimming needs k ≥ 1".into()));
    }
    let raw = trimmed_coefficients(p, k, basis, cutoff);
    let s = BoundedValue::from_rational(&crate::polyfield::trim::trim_scale(k));
    let mom = |poly: &RationalPoly2| BoundedValue::from_rational(&poly.inner_square(poly));
    // ‖T‖² on the canonical square, and ‖∇T‖² there when T ∈ H¹₀.
    let l2sq = s.sqr() * BoundedValue::point(0.25) * mom(p);
    let h1_ok = vanishes_on_boundary(p);
    let h1sq = mom(&p.dx()) + mom(&p.dy());
    let head_l2 = raw.weighted_head(|_, _| BoundedValue::ONE);
    let head_h1 = raw.weighted_head(|a, b| basis.laplace_eigen(a, b));
    let def_l2 = (l2sq - head_l2).nonneg().hi();
    let def_h1 = if h1_ok { Some((h1sq - head_h1).nonneg().hi()) } else { None };
    let mut out = match n_moll {
        None => raw,
        Some(n) => {
            let hmax = half_index(basis, cutoff as i64);
            let table = GhatTable::new(n, hmax)?;
            raw.map_modes(|a, b| table.get(half_index(basis, a), half_index(basis, b)), |_| Some(1.0))
        }
    };
    out.tail_hs.clear();
    if p.is_zero() {
        out.tail_l2 = 0.0;
        return Ok(out);
    }
    let q0 = first_tail_index(cutoff);
    let bound = |s: &Rational| -> Option<f64> {
        let via_l2 = if s.is_zero() || n_moll.is_some() && *s <= Rational::one() {
            Some((tail_sup(basis, n_moll, q0, s, false) * BoundedValue::point(def_l2)).hi())
        } else {
            None
        };
        let via_h1 = def_h1.and_then(|d| {
            if n_moll.is_none() && *s > Rational::one() || *s > Rational::from_int(2) {
                None
            } else {
                Some((tail_sup(basis, n_moll, q0, s, true) * BoundedValue::point(d)).hi())
            }
        });
        let best = match (via_l2, via_h1) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }?;
        Some(BoundedValue::point(best).sqrt().expect("nonnegative").hi())
    };
    out.tail_l2 = bound(&Rational::zero()).expect("L2 tail always available");
    if out.tail_l2 == 0.0 {
        // Only possible for an exact zero defect; keep the field marked as
        // carrying a (zero) remainder rather than band-limited.
        out.tail_l2 = f64::MIN_POSITIVE;
    }
    for s in super::field::standard_exponents() {
        if let Some(t) = bound(&s) {
            out.tail_hs.insert(s, t);
        }
    }
    Ok(out)
}

fn separable_coefficients(sum: &SeparableSum, basis: Basis, cutoff: usize, target: f64) -> Result<FourierField> {
    let cfg = QuadConfig::default();
    let side = basis.side(cutoff);
    let nterms = sum.terms.len().max(1);
    let t1 = target / (4.0 * nterms as f64);
    // 1D coefficient of f against the conjugate basis factor on axis `ax`.
    let project = |f: &Func1, ax: Option<Axis>, g: usize| -> Result<Cplx> {
        let pi = BoundedValue::pi();
        match ax {
            Some(axis) => {
                let nn = g as i64;
                if !axis.admits(g) {
                    return Ok((BoundedValue::ZERO, BoundedValue::ZERO));
                }
                let w = pi * BoundedValue::from_i64(nn);
                let norm = if nn == 0 { BoundedValue::ONE } else { sqrt2() };
                let f = f.clone();
                let h = move |x: &Jet| {
                    let v = f(x)?;
                    let (sn, cs) = x.scale(w).sin_cos();
                    let b = if axis == Axis::Sin { sn } else { cs };
                    Some((&v * &b).scale(norm))
                };
                Ok((integrate(&h, 0.0, 1.0, t1, &cfg)?, BoundedValue::ZERO))
            }
            None => {
                let n = g as i64 - cutoff as i64;
                let w = pi * BoundedValue::from_i64(n);
                let (f1, f2) = (f.clone(), f.clone());
                // conj(e^{iπn(2x−1)}) = cos(πn(2x−1)) − i sin(πn(2x−1))
                let arg = move |x: &Jet| x.scale(BoundedValue::point(2.0)).add_const(-BoundedValue::ONE).scale(w);
                let hr = move |x: &Jet| Some(&f1(x)? * &arg(x).cos());
                let hi = move |x: &Jet| Some(-(&f2(x)? * &arg(x).sin()));
                Ok((integrate(&hr, 0.0, 1.0, t1, &cfg)?, integrate(&hi, 0.0, 1.0, t1, &cfg)?))
            }
        }
    };
    let (ax, ay) = match basis {
        Basis::Trig(a, b) => (Some(a), Some(b)),
        Basis::Exp => (None, None),
    };
    let mut re = vec![BoundedValue::ZERO; side * side];
    let mut im = vec![BoundedValue::ZERO; side * side];
    for (f, g) in &sum.terms {
        let fx: Vec<Cplx> = (0..side).into_par_iter().map(|i| project(f, ax, i)).collect::<Result<_>>()?;
        let gy: Vec<Cplx> = (0..side).into_par_iter().map(|j| project(g, ay, j)).collect::<Result<_>>()?;
        for i in 0..side {
            for j in 0..side {
                let t = cmul(fx[i], gy[j]);
                re[i * side + j] = re[i * side + j] + t.0;
                im[i * side + j] = im[i * side + j] + t.1;
            }
        }
    }
    let mut out = FourierField::from_raw(basis, cutoff, re, if basis.is_exp() { Some(im) } else { None });
    // ‖Σ f_k g_k‖² = Σ_{k,l} ⟨f_k, f_l⟩ ⟨g_k, g_l⟩
    let gram = |a: &Func1, b: &Func1| -> Result<BoundedValue> {
        let (a, b) = (a.clone(), b.clone());
        let h = move |x: &Jet| Some(&a(x)? * &b(x)?);
        integrate(&h, 0.0, 1.0, t1 * 1e-2, &cfg)
    };
    let mut norm_sq = BoundedValue::ZERO;
    for (f1, g1) in &sum.terms {
        for (f2, g2) in &sum.terms {
            norm_sq = norm_sq + gram(f1, f2)? * gram(g1, g2)?;
        }
    }
    let head = out.weighted_head(|_, _| BoundedValue::ONE);
    out.tail_l2 = (norm_sq - head).nonneg().sqrt().expect("nonnegative").hi().max(f64::MIN_POSITIVE);
    Ok(out)
}

/// Doubles the cutoff from `start` until the uncertainty is at most `2^{−k}`.
pub fn coefficients_to_precision(src: Source<'_>, basis: Basis, k: u32, start: usize, max_cutoff: usize) -> Result<FourierField> {
    let target = 2f64.powi(-(k as i32));
    let mut c = start.max(1);
    loop {
        let f = coefficients(src, basis, c)?;
        if f.uncertainty() <= target {
            return Ok(f);
        }
        if c >= max_cutoff {
            return Err(Error::BudgetNotMet(format!(
                "coefficient uncertainty {:e} above 2^-{k} at cutoff {c}",
                f.uncertainty()
            )));
        }
        c = (2 * c).min(max_cutoff);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfield::enumerate_solenoidal_polys;
    use num_bigint::BigUint;

    fn sample_poly() -> RationalPoly2 {
        enumerate_solenoidal_polys(&BigUint::from(5u32)).p1.clone()
    }

    #[test]
    fn trimmed_parseval_is_consistent() {
        let p = sample_poly();
        for basis in [Basis::SIN_SIN, Basis::SIN_COS, Basis::COS_SIN, Basis::Exp] {
            let f = coefficients(Source::Trimmed { poly: &p, k: 2 }, basis, 24).unwrap();
            let s = BoundedValue::from_rational(&crate::polyfield::trim::trim_scale(2));
            let exact = (s.sqr() * BoundedValue::point(0.25) * BoundedValue::from_rational(&p.inner_square(&p))).sqrt().unwrap();
            assert!(f.l2_norm().overlaps(&exact), "{}", basis.name());
            assert!(f.tail_l2 < 0.2 * exact.hi());
        }
    }

    #[test]
    fn exp_coefficients_of_real_field_are_conjugate_symmetric() {
        let p = sample_poly();
        let f = coefficients(Source::Mollified { poly: &p, k: 1, n: 2 }, Basis::Exp, 6).unwrap();
        assert!(f.conjugate_symmetric());
    }

    #[test]
    fn separable_single_mode() {
        let sx: Func1 = Arc::new(|x: &Jet| Some(x.scale(BoundedValue::pi()).sin()));
        let sum = SeparableSum::new().term(sx.clone(), sx);
        let f = coefficients(Source::Separable { sum: &sum, quad_target: 1e-12 }, Basis::SIN_SIN, 3).unwrap();
        assert!(f.re(1, 1).contains(0.5));
        for (n, m) in f.modes().collect::<Vec<_>>() {
            if (n, m) != (1, 1) {
                assert!(f.re(n, m).contains(0.0));
            }
        }
        assert!(f.tail_l2 < 1e-5);
    }

    #[test]
    fn mollified_tails_shrink_with_cutoff() {
        let p = sample_poly();
        let a = coefficients(Source::Mollified { poly: &p, k: 1, n: 2 }, Basis::SIN_COS, 8).unwrap();
        let b = coefficients(Source::Mollified { poly: &p, k: 1, n: 2 }, Basis::SIN_COS, 32).unwrap();
        assert!(b.tail_l2 < a.tail_l2);
        let s65 = Rational::new(6, 5);
        assert!(b.tail_for(&s65).unwrap() < a.tail_for(&s65).unwrap());
        assert!(a.l2_norm().overlaps(&b.l2_norm()));
    }
}
