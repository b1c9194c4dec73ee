//! Helmholtz projection onto solenoidal fields on the square.
//!
//! With `u₁` expanded on sin·cos and `u₂` on cos·sin modes, the gradient part
//! of mode `(n, m)` points along `(n, m)`, so the projection is the 2×2
//! orthogonal projector onto `(−m, n)` applied mode by mode. The stream
//! function `φ` then has sin·sin coefficients `(n B − m A)/(π(n²+m²))`.

use num_bigint::BigUint;

use crate::approxcore::{BoundedValue, Rational};
use crate::error::{Error, Result};
use crate::polyfield::{enumerate_solenoidal_polys, MollifiedElement};
use crate::spectral::field::hypot_up;
use crate::spectral::{Basis, FourierField, PairField, SobolevName};

/// A vector field `(u₁, u₂) ∈ L₂²` given by component names in the
/// sin·cos and cos·sin bases.
#[derive(Clone, Debug)]
pub struct VectorFieldName {
    pub u1: SobolevName,
    pub u2: SobolevName,
}

impl VectorFieldName {
    pub fn new(u1: SobolevName, u2: SobolevName) -> Result<VectorFieldName> {
        if u1.basis() != Basis::SIN_COS || u2.basis() != Basis::COS_SIN {
            return Err(Error::Precondition(format!(
                "vector field names need sin-cos and cos-sin components, got {} and {}",
                u1.basis().name(),
                u2.basis().name()
            )));
        }
        Ok(VectorFieldName { u1, u2 })
    }

    /// Exact name of a band-limited pair field.
    pub fn from_pair(f: &PairField) -> Result<VectorFieldName> {
        let z = Rational::zero();
        VectorFieldName::new(SobolevName::band_limited(f.u1().clone(), z.clone())?, SobolevName::band_limited(f.u2().clone(), z)?)
    }

    /// Pair approximant with `L₂` distance at most `2^{−k}` to the field.
    ///
    /// Each component is asked for `2^{−(k+1)}`; the non-orthogonal slack is
    /// folded into both component tails, which keeps every component-wise
    /// distance bound valid.
    pub fn approx(&self, k: u32) -> Result<PairField> {
        let a1 = self.u1.approx(k + 1)?;
        let a2 = self.u2.approx(k + 1)?;
        let mut f1 = a1.field.clone();
        let mut f2 = a2.field.clone();
        let slack = hypot_up(a1.slack, a2.slack);
        if slack > 0.0 {
            for f in [&mut f1, &mut f2] {
                f.tail_l2 = (BoundedValue::point(f.tail_l2) + BoundedValue::point(slack)).hi();
                f.tail_hs.clear();
            }
        }
        PairField::new(f1, f2)
    }
}

/// Mode-wise projector applied to `(A, B)`.
pub fn project_mode(n: i64, m: i64, a: BoundedValue, b: BoundedValue) -> (BoundedValue, BoundedValue) {
    if n == 0 && m == 0 {
        return (BoundedValue::ZERO, BoundedValue::ZERO);
    }
    let (bn, bm) = (BoundedValue::from_i64(n), BoundedValue::from_i64(m));
    let q = BoundedValue::from_i64(n * n + m * m);
    // (A, B)·(−m, n)/(n²+m²) times (−m, n); written this way the result is
    // exactly solenoidal for point inputs.
    let c = (bn * b - bm * a) / q;
    (-(bm * c), bn * c)
}

/// Exact projection of a pair field: the head mode by mode; the tails stay
/// beyond the cutoff, and `‖ℙ r‖ ≤ ‖r‖` bounds each component by the pair tail.
pub fn project_field(u: &PairField) -> PairField {
    let mut out = PairField::zeros(u.cutoff());
    for (n, m) in u.modes().collect::<Vec<_>>() {
        let (a, b) = u.coeffs(n, m);
        let (x, y) = project_mode(n, m, a, b);
        out.set(n, m, x, y).expect("same grid");
    }
    if !u.is_band_limited() {
        let (t1, t2) = (u.u1(), u.u2());
        let t = hypot_up(t1.tail_l2, t2.tail_l2);
        let mut f1 = out.u1().clone();
        let mut f2 = out.u2().clone();
        for f in [&mut f1, &mut f2] {
            f.tail_l2 = t;
            // same weight on both components of a mode, so ℙ is contractive in H^s too
            for (s, a) in &t1.tail_hs {
                if let Some(b) = t2.tail_hs.get(s) {
                    f.tail_hs.insert(s.clone(), hypot_up(*a, *b));
                }
            }
        }
        out = PairField::new(f1, f2).expect("pair bases");
    }
    out
}

/// Sin·sin coefficients of the stream function `φ` with `ℙu = (−∂_y φ, ∂_x φ)`.
pub fn stream_function(u: &PairField) -> FourierField {
    let mut phi = FourierField::zeros(Basis::SIN_SIN, u.cutoff());
    for (n, m) in u.modes().collect::<Vec<_>>() {
        if n == 0 || m == 0 {
            continue;
        }
        let (a, b) = u.coeffs(n, m);
        let q = BoundedValue::pi() * BoundedValue::from_i64(n * n + m * m);
        let v = (BoundedValue::from_i64(n) * b - BoundedValue::from_i64(m) * a) / q;
        phi.set(n, m, v, BoundedValue::ZERO).expect("same grid");
    }
    phi
}

/// Upper bound on the `L₂` norm of the modes with `n ≥ N` or `m ≥ N`.
fn outside_norm(f: &PairField, big_n: usize) -> f64 {
    let mut acc = BoundedValue::ZERO;
    for (n, m) in f.modes().collect::<Vec<_>>() {
        if n as usize >= big_n || m as usize >= big_n {
            let (a, b) = f.coeffs(n, m);
            acc = acc + BoundedValue::point(a.mag()).sqr() + BoundedValue::point(b.mag()).sqr();
        }
    }
    let head = acc.sqrt().expect("nonnegative").hi();
    (BoundedValue::point(head) + BoundedValue::point(hypot_up(f.u1().tail_l2, f.u2().tail_l2))).hi()
}

/// Smallest `N` with `2 ‖q restricted to n ≥ N or m ≥ N‖² ≤ 2^{−2(K+1)}`,
/// tails of `q` included.
fn truncation_index_of(q: &PairField, k: u32) -> Result<usize> {
    let target = 2f64.powi(-(k as i32) - 1);
    for big_n in 0..=q.cutoff() + 1 {
        let t = BoundedValue::point(outside_norm(q, big_n));
        if (BoundedValue::point(2.0) * t.sqr()).hi() <= target * target {
            return Ok(big_n);
        }
    }
    Err(Error::BudgetNotMet(format!("tail of the approximant exceeds 2^-{} at every truncation", k + 1)))
}

/// `N(K, u)`: truncation index whose certified tail mass
/// `2 Σ_{n ≥ N or m ≥ N} (|u_{1,nm}|² + |u_{2,nm}|²)` is at most `2^{−2(K+1)}`.
/// The name's own approximation error counts towards the tail.
pub fn truncation_index(u: &VectorFieldName, k: u32) -> Result<usize> {
    truncation_index_of(&u.approx(k + 3)?, k)
}

/// How `project` picks its final approximant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProjectMode {
    /// Emit the truncated projected series.
    #[default]
    Constructive,
    /// Enumerate the dense set until an element within `2^{−(K+1)}` of the
    /// truncated series is found, trying at most `cap` candidates.
    Search { cap: u64 },
}

/// `q_K` with `‖ℙu − q_K‖₂ ≤ 2^{−K}`, as a pair field whose uncertainty
/// certifies the bound.
pub fn project(u: &VectorFieldName, k: u32) -> Result<PairField> {
    project_with(u, k, ProjectMode::Constructive)
}

pub fn project_with(u: &VectorFieldName, k: u32, mode: ProjectMode) -> Result<PairField> {
    let q = u.approx(k + 3)?;
    let big_n = truncation_index_of(&q, k)?;
    // dropped modes move into the tails, which ℙ carries along contractively
    let p = project_field(&q.with_cutoff(big_n.saturating_sub(1).min(q.cutoff())));
    let unc = p.uncertainty();
    if unc > 2f64.powi(-(k as i32)) {
        return Err(Error::BudgetNotMet(format!("projection uncertainty {unc:e} above 2^-{k}")));
    }
    match mode {
        ProjectMode::Constructive => Ok(p),
        ProjectMode::Search { cap } => search_dense(&p, k, cap),
    }
}

/// Literal search over the dense set: first element whose image is within
/// `2^{−(K+1)}` of `p`'s center, with `p` itself within `2^{−(K+1)}` of `ℙu`.
fn search_dense(p: &PairField, k: u32, cap: u64) -> Result<PairField> {
    let half = 2f64.powi(-(k as i32) - 1);
    // p is within `unc` of ℙu; the candidate must close the rest of the budget
    let budget = half.min(2f64.powi(-(k as i32)) - p.uncertainty());
    let kt = k + 2;
    for j in 0..cap {
        let base = enumerate_solenoidal_polys(&BigUint::from(j));
        let elem = MollifiedElement::new(base, kt, kt + 1)?;
        let img = match PairField::image_to_precision(&elem, k + 3, p.cutoff().max(4), 4 * p.cutoff().max(4)) {
            Ok(f) => f,
            Err(Error::BudgetNotMet(_)) => continue,
            Err(e) => return Err(e),
        };
        let c = img.cutoff().max(p.cutoff());
        let d = img.with_cutoff(c).sub(&p.center().with_cutoff(c))?;
        let dist = d.l2_norm().hi();
        let total = (BoundedValue::point(dist) + BoundedValue::point(p.uncertainty())).hi();
        if dist <= budget && total <= 2f64.powi(-(k as i32)) {
            return Ok(img);
        }
    }
    Err(Error::BudgetNotMet(format!("no dense-set element within 2^-{} among {cap} candidates", k + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SobolevName;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pair(rng: &mut ChaCha8Rng, c: usize) -> PairField {
        let mut f = PairField::zeros(c);
        for (n, m) in f.modes().collect::<Vec<_>>() {
            let a = if n > 0 { rng.gen_range(-1.0..1.0) } else { 0.0 };
            let b = if m > 0 { rng.gen_range(-1.0..1.0) } else { 0.0 };
            f.set(n, m, BoundedValue::point(a), BoundedValue::point(b)).unwrap();
        }
        f
    }

    fn name(f: &PairField) -> VectorFieldName {
        VectorFieldName::from_pair(f).unwrap()
    }

    #[test]
    fn solenoidal_mode_is_reproduced() {
        let u = PairField::solenoidal_mode(4, 2, 3, BoundedValue::point(0.8)).unwrap();
        let p = project(&name(&u), 20).unwrap();
        let d = p.sub(&u).unwrap();
        assert!(d.l2_norm().hi() + p.uncertainty() <= 2f64.powi(-20));
    }

    #[test]
    fn gradient_projects_to_zero() {
        // ∇ of ψ = sin(2πx) sin(πy) ... as cos·sin / sin·cos: u = (∂xψ, ∂yψ) is (cos·sin, sin·cos),
        // so use ψ = cos(2πx) cos(πy): ∇ψ = (−2π sin cos, −π cos sin)
        let mut u = PairField::zeros(3);
        let pi = BoundedValue::pi();
        u.set(2, 1, -(pi * BoundedValue::point(2.0)), -pi).unwrap();
        let p = project(&name(&u), 12).unwrap();
        assert!(p.l2_norm().hi() <= 2f64.powi(-12));
    }

    #[test]
    fn worked_single_mode_example_sign() {
        // (0, cos sin) at mode (1,1) projects onto the (−1, 1)/√2 direction
        let mut u = PairField::zeros(1);
        u.set(1, 1, BoundedValue::ZERO, BoundedValue::ONE).unwrap();
        let p = project(&name(&u), 12).unwrap();
        let (a, b) = p.coeffs(1, 1);
        assert!(a.contains(-0.5) && b.contains(0.5));
    }

    #[test]
    fn stream_function_recovers_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_pair(&mut rng, 4);
        let p = project_field(&u);
        let phi = stream_function(&u);
        let pi = BoundedValue::pi();
        for (n, m) in p.modes().collect::<Vec<_>>() {
            if n == 0 || m == 0 {
                continue;
            }
            let (a, b) = p.coeffs(n, m);
            // −∂_y of sin sin at (n,m) is −mπ sin cos; ∂_x is nπ cos sin
            let c = phi.re(n, m);
            assert!(a.overlaps(&(-(BoundedValue::from_i64(m) * pi * c))));
            assert!(b.overlaps(&(BoundedValue::from_i64(n) * pi * c)));
        }
    }

    #[test]
    fn truncation_index_of_band_limited_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_pair(&mut rng, 5);
        let n = truncation_index(&name(&u), 10).unwrap();
        assert!(n <= 6);
        let twice = name(&u.scale(BoundedValue::point(2.0)));
        assert!(truncation_index(&twice, 9).unwrap() <= n);
    }

    #[test]
    fn truncation_index_certified_against_finer_sum() {
        let p = enumerate_solenoidal_polys(&BigUint::from(14u32));
        let elem = MollifiedElement::new(p, 1, 2).unwrap();
        let u1 = SobolevName::from_source(
            crate::spectral::SourceSpec::Mollified { poly: elem.trimmed().base().p1.clone(), k: 1, n: 2 },
            Basis::SIN_COS,
            Rational::zero(),
            8,
            64,
        )
        .unwrap();
        let u2 = SobolevName::from_source(
            crate::spectral::SourceSpec::Mollified { poly: elem.trimmed().base().p2.clone(), k: 1, n: 2 },
            Basis::COS_SIN,
            Rational::zero(),
            8,
            64,
        )
        .unwrap();
        let u = VectorFieldName::new(u1, u2).unwrap();
        let k = 3;
        let n = truncation_index(&u, k).unwrap();
        // oracle: head of an independent image to 4N modes
        let img = PairField::image(&elem, 4 * n.max(2)).unwrap();
        let mut acc = 0.0;
        for (a, b) in img.modes().collect::<Vec<_>>() {
            if a as usize >= n || b as usize >= n {
                let (x, y) = img.coeffs(a, b);
                acc += x.mid().powi(2) + y.mid().powi(2);
            }
        }
        assert!(2.0 * acc <= 2f64.powi(-2 * (k as i32 + 1)), "N = {n}: {acc}");
    }

    #[test]
    fn search_mode_finds_zero_for_gradients() {
        let mut u = PairField::zeros(2);
        u.set(1, 0, BoundedValue::point(0.3), BoundedValue::ZERO).unwrap();
        let p = project_with(&name(&u), 4, ProjectMode::Search { cap: 3 }).unwrap();
        assert!(p.l2_norm().hi() <= 2f64.powi(-4));
        let v = PairField::solenoidal_mode(2, 1, 1, BoundedValue::ONE).unwrap();
        let e = project_with(&name(&v), 4, ProjectMode::Search { cap: 2 }).unwrap_err();
        assert_eq!(e.kind(), "budget-not-met");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn idempotent_divergence_free_orthogonal_linear(seed in 0u64..1000, k in 4u32..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_pair(&mut rng, 3);
            let v = random_pair(&mut rng, 3);
            let pu = project(&name(&u), k).unwrap();
            let eps = 2f64.powi(-(k as i32));
            // idempotence
            let ppu = project(&name(&pu.center()), k).unwrap();
            prop_assert!(ppu.sub(&pu.center()).unwrap().l2_norm().lo() <= 2.0 * eps);
            // divergence
            let d = pu.divergence_coeffs();
            for (n, m) in d.modes().collect::<Vec<_>>() {
                prop_assert!(d.re(n, m).contains(0.0));
            }
            // orthogonality of u − ℙu and ℙu
            let r = u.sub(&pu).unwrap();
            let ip = r.dot_head(&pu);
            let slack = pu.uncertainty() * (u.l2_norm().hi() + pu.l2_norm().hi());
            prop_assert!(ip.mag() <= slack + 1e-12);
            // linearity
            let puv = project(&name(&u.add(&v).unwrap()), k).unwrap();
            let pv = project(&name(&v), k).unwrap();
            let lin = puv.sub(&pu).unwrap().sub(&pv).unwrap();
            prop_assert!(lin.l2_norm().lo() <= puv.uncertainty() + pu.uncertainty() + pv.uncertainty());
        }
    }
}
