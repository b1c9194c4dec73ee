//! Pressure recovery: `∇P = h = (I − ℙ)(f − (u·∇)u)`, the viscous term being
//! solenoidal mode by mode. `P` is normalized by `P(0, 0) = 0`.

use serde::Serialize;

use super::engine::wiener_zeta;
use super::solve::Solver;
use crate::approxcore::{eps, BoundedValue, Rational};
use crate::error::{Error, Result};
use crate::helmholtz::project_mode;
use crate::spectral::ops::{derivative, multiply_heads};
use crate::spectral::{Axis, Basis, FourierField, PairField};

/// A rectilinear path from the anchor `(0, 0)` through `waypoints` to `(x, y)`.
#[derive(Clone, Debug, Serialize)]
pub struct PressureQuery {
    pub x: Rational,
    pub y: Rational,
    pub waypoints: Vec<(Rational, Rational)>,
    pub t: Rational,
}

impl PressureQuery {
    /// Along `x` first, then `y`.
    pub fn x_then_y(x: Rational, y: Rational, t: Rational) -> PressureQuery {
        PressureQuery { waypoints: vec![(x.clone(), Rational::zero())], x, y, t }
    }

    /// Along `y` first, then `x`.
    pub fn y_then_x(x: Rational, y: Rational, t: Rational) -> PressureQuery {
        PressureQuery { waypoints: vec![(Rational::zero(), y.clone())], x, y, t }
    }

    fn points(&self) -> Vec<(Rational, Rational)> {
        let mut p = vec![(Rational::zero(), Rational::zero())];
        p.extend(self.waypoints.iter().cloned());
        p.push((self.x.clone(), self.y.clone()));
        p
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureOutput {
    /// Path integral of `h` along the query path.
    pub value: BoundedValue,
    /// Potential difference `P(x) − P(0)` from the cos·cos coefficients.
    pub potential: BoundedValue,
    /// Bound from the solution's error beyond its head.
    pub error_bound: f64,
    /// Solve precision used.
    pub solve_precision: u32,
}

/// `h` and its potential for one solution enclosure.
#[derive(Clone, Debug)]
pub struct PressureField {
    pub h: PairField,
    /// cos·cos coefficients of the potential.
    pub potential: FourierField,
    pub error_bound: f64,
}

fn strip(f: &FourierField) -> FourierField {
    let mut g = f.clone();
    g.tail_l2 = 0.0;
    g.tail_hs.clear();
    g
}

impl PressureField {
    /// From a solution head, the forcing head, and `w_e ≥ ‖e_i‖_W` for the
    /// solution error `e` (sup-weighted Wiener norm).
    pub fn new(u: &PairField, f: Option<&PairField>, w_e: f64) -> Result<PressureField> {
        let (u1, u2) = (strip(u.u1()), strip(u.u2()));
        let conv1 = multiply_heads(&u1, &derivative(&u1, 0)?)?.add(&multiply_heads(&u2, &derivative(&u1, 1)?)?)?;
        let conv2 = multiply_heads(&u1, &derivative(&u2, 0)?)?.add(&multiply_heads(&u2, &derivative(&u2, 1)?)?)?;
        let mut big = PairField::new(conv1, conv2)?.scale(-BoundedValue::ONE);
        if let Some(f) = f {
            if !f.is_band_limited() {
                return Err(Error::Precondition("pressure needs a band-limited forcing".into()));
            }
            big = big.add(f)?;
        }
        let c = big.cutoff();
        let mut h = PairField::zeros(c);
        let mut potential = FourierField::zeros(Basis::COS_COS, c);
        for (n, m) in big.modes().collect::<Vec<_>>() {
            if n == 0 && m == 0 {
                continue;
            }
            let (a, b) = big.coeffs(n, m);
            let (pa, pb) = project_mode(n, m, a, b);
            h.set(n, m, a - pa, b - pb)?;
            let q = BoundedValue::pi() * BoundedValue::from_i64(n * n + m * m);
            potential.set(n, m, -(BoundedValue::from_i64(n) * a + BoundedValue::from_i64(m) * b) / q, BoundedValue::ZERO)?;
        }
        // T = e⊗u + u⊗e + e⊗e; potential of (I−ℙ)∇·T bounded mode-wise by
        // |T₁₁| + |T₂₂| + (|T₁₂| + |T₂₁|)/2, doubled for the difference of two points
        let wu = [u1.wiener_head().hi(), u2.wiener_head().hi()];
        let w = |i: usize, j: usize| {
            let (we, a, b) = (BoundedValue::point(w_e), BoundedValue::point(wu[i]), BoundedValue::point(wu[j]));
            we * b + a * we + we * we
        };
        let error_bound = if w_e == 0.0 {
            0.0
        } else {
            (BoundedValue::point(2.0) * (w(0, 0) + w(1, 1) + (w(0, 1) + w(1, 0)) / BoundedValue::point(2.0))).hi()
        };
        Ok(PressureField { h, potential, error_bound })
    }

    /// `P(x, y) − P(0, 0)` from the potential coefficients.
    pub fn potential_difference(&self, x: BoundedValue, y: BoundedValue) -> BoundedValue {
        let z = BoundedValue::ZERO;
        self.potential.eval_head(x, y).0 - self.potential.eval_head(z, z).0
    }

    /// `∫ h · dγ` along axis-parallel segments through `points`, in closed form.
    pub fn path_integral(&self, points: &[(Rational, Rational)]) -> Result<BoundedValue> {
        let (h1, h2) = (self.h.u1(), self.h.u2());
        let pi = BoundedValue::pi();
        let sq2 = crate::spectral::basis::sqrt2();
        // ∫_{a}^{b} √2 sin(kπs) ds = √2 (cos kπa − cos kπb)/(kπ)
        let sin_int = |k: i64, a: BoundedValue, b: BoundedValue| {
            let w = pi * BoundedValue::from_i64(k);
            sq2 * ((w * a).cos() - (w * b).cos()) / w
        };
        let mut acc = BoundedValue::ZERO;
        for seg in points.windows(2) {
            let ((x0, y0), (x1, y1)) = (&seg[0], &seg[1]);
            for v in [x0, y0, x1, y1] {
                if v.is_negative() || *v > Rational::one() {
                    return Err(Error::Precondition(format!("path leaves the closed square at coordinate {v}")));
                }
            }
            let (bx0, by0) = (BoundedValue::from_rational(x0), BoundedValue::from_rational(y0));
            let (bx1, by1) = (BoundedValue::from_rational(x1), BoundedValue::from_rational(y1));
            if y0 == y1 {
                for (n, m) in h1.modes().collect::<Vec<_>>() {
                    let c = h1.re(n, m);
                    if n == 0 || c == BoundedValue::ZERO {
                        continue;
                    }
                    acc = acc + c * sin_int(n, bx0, bx1) * Axis::Cos.eval(m as usize, by0);
                }
            } else if x0 == x1 {
                for (n, m) in h2.modes().collect::<Vec<_>>() {
                    let c = h2.re(n, m);
                    if m == 0 || c == BoundedValue::ZERO {
                        continue;
                    }
                    acc = acc + c * Axis::Cos.eval(n as usize, bx0) * sin_int(m, by0, by1);
                }
            } else {
                return Err(Error::Precondition("path segments must be axis-parallel".into()));
            }
        }
        Ok(acc)
    }
}

/// `P(x, t)` along the query path to `2^{−k}`, both routes reported.
pub fn pressure(solver: &Solver, f: Option<&PairField>, q: &PressureQuery, k: u32) -> Result<PressureOutput> {
    let target = eps(k as i32);
    let mut kk = k + 2;
    loop {
        let field = pressure_field(solver, f, &q.t, kk)?;
        let value = field.path_integral(&q.points())?.inflate(field.error_bound);
        let x = (BoundedValue::from_rational(&q.x), BoundedValue::from_rational(&q.y));
        let potential = field.potential_difference(x.0, x.1).inflate(field.error_bound);
        if value.width() <= target {
            return Ok(PressureOutput { value, potential, error_bound: field.error_bound, solve_precision: kk });
        }
        if kk >= k + 24 {
            return Err(Error::BudgetNotMet(format!("pressure enclosure width {:e} above 2^-{k}", value.width())));
        }
        kk += 4;
    }
}

/// Pressure data from the solution at `t` solved to `2^{−k}`.
pub fn pressure_field(solver: &Solver, f: Option<&PairField>, t: &Rational, k: u32) -> Result<PressureField> {
    let sol = solver.solve(t, k)?;
    let w_e = match sol.a35_error {
        Some(e) => (BoundedValue::point(2.0) * wiener_zeta().sqrt().expect("positive") * BoundedValue::point(e)).hi(),
        None if sol.field.is_band_limited() => 0.0,
        None => {
            return Err(Error::InsufficientSmoothness(
                "pressure at t = 0 needs a band-limited datum; the gradient of the remainder is not controlled".into(),
            ))
        }
    };
    PressureField::new(&sol.field, f, w_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approxcore::ConstantsTable;
    use crate::helmholtz::VectorFieldName;
    use crate::nse::EngineConfig;

    fn solver(a: &PairField, f: Option<&PairField>) -> Solver {
        Solver::new(
            VectorFieldName::from_pair(a).unwrap(),
            f,
            &ConstantsTable::default_table(),
            EngineConfig { cap: 8, degree: 8, panels: 4, max_panels: 64 },
        )
        .unwrap()
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn zero_flow_has_zero_pressure() {
        let s = solver(&PairField::zeros(2), None);
        let out = pressure(&s, None, &PressureQuery::x_then_y(r(1, 3), r(3, 4), r(1, 8)), 10).unwrap();
        assert!(out.value.contains(0.0) && out.value.width() <= eps(10));
    }

    #[test]
    fn gradient_forcing_recovers_its_potential() {
        // f = ∇(cos πx cos 2πy)
        use std::f64::consts::PI;
        let mut f = PairField::zeros(2);
        let half = BoundedValue::point(0.5);
        // cos πx cos 2πy = ½ φ^{cc}_{12}; ∂x → −π ½ √2 sin·√2 cos = −(π/2) φ^{sc}_{12}
        f.set(1, 2, -(BoundedValue::pi() * half), -(BoundedValue::pi() * BoundedValue::point(2.0) * half)).unwrap();
        let s = solver(&PairField::zeros(2), Some(&f));
        let phi = |x: f64, y: f64| (PI * x).cos() * (2.0 * PI * y).cos();
        for (x, y) in [(r(1, 4), r(1, 2)), (r(3, 5), r(1, 7))] {
            let (xf, yf) = (x.to_f64_nearest(), y.to_f64_nearest());
            let out = pressure(&s, Some(&f), &PressureQuery::y_then_x(x, y, r(1, 16)), 12).unwrap();
            let want = phi(xf, yf) - phi(0.0, 0.0);
            assert!(out.value.inflate(1e-12).contains(want), "{:?} vs {want}", out.value);
            assert!(out.potential.inflate(1e-12).contains(want));
        }
    }

    fn flow() -> PairField {
        PairField::solenoidal_mode(4, 1, 2, BoundedValue::point(0.04))
            .unwrap()
            .add(&PairField::solenoidal_mode(4, 2, 1, BoundedValue::point(-0.03)).unwrap())
            .unwrap()
    }

    #[test]
    fn paths_agree() {
        let s = solver(&flow(), None);
        let t = &s.cert.t_a * &r(1, 2);
        for (x, y) in [(r(1, 3), r(2, 3)), (r(7, 8), r(1, 8))] {
            let a = pressure(&s, None, &PressureQuery::x_then_y(x.clone(), y.clone(), t.clone()), 8).unwrap();
            let b = pressure(&s, None, &PressureQuery::y_then_x(x.clone(), y.clone(), t.clone()), 8).unwrap();
            let via = PressureQuery { x: x.clone(), y: y.clone(), waypoints: vec![(r(1, 2), r(0, 1)), (r(1, 2), r(1, 1)), (x.clone(), r(1, 1))], t: t.clone() };
            let c = pressure(&s, None, &via, 8).unwrap();
            assert!(a.value.overlaps(&b.value) && a.value.overlaps(&c.value) && a.value.overlaps(&a.potential));
        }
    }

    #[test]
    fn finite_differences_match_h() {
        let s = solver(&flow(), None);
        let t = &s.cert.t_a * &r(1, 2);
        let pf = pressure_field(&s, None, &t, 12).unwrap();
        let d = 1e-4;
        for (x, y) in [(0.3, 0.6), (0.71, 0.22)] {
            let p = |x: f64, y: f64| pf.potential_difference(BoundedValue::point(x), BoundedValue::point(y)).mid();
            let gx = (p(x + d, y) - p(x - d, y)) / (2.0 * d);
            let gy = (p(x, y + d) - p(x, y - d)) / (2.0 * d);
            let (h1, h2) = pf.h.eval_head(BoundedValue::point(x), BoundedValue::point(y));
            assert!((h1.mid() - gx).abs() < 1e-6 && (h2.mid() - gy).abs() < 1e-6, "{h1:?} {gx} {h2:?} {gy}");
        }
    }

    #[test]
    fn rough_datum_at_time_zero_is_rejected() {
        use crate::spectral::names::Approximant;
        use crate::spectral::SobolevName;
        let a = flow();
        let mut f1 = a.u1().clone();
        f1.tail_l2 = 1e-9;
        let n1 = SobolevName::from_sequence(Rational::zero(), Basis::SIN_COS, 1.0, move |_| Ok(Approximant::exact(f1.clone())));
        let n2 = SobolevName::band_limited(a.u2().clone(), Rational::zero()).unwrap();
        let name = VectorFieldName::new(n1, n2).unwrap();
        let s = Solver::new(name, None, &ConstantsTable::default_table(), EngineConfig { cap: 8, degree: 8, panels: 4, max_panels: 64 }).unwrap();
        assert!(matches!(pressure_field(&s, None, &Rational::zero(), 8), Err(Error::InsufficientSmoothness(_))));
    }
}
