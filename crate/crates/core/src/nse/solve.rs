//! Iterates, the smoothness lift and the solution operator on `[0, T_a]`.

use serde::Serialize;

use super::engine::{h65_from_a35, Ball, Datum, Engine, EngineConfig, Run};
use super::horizon::{compute_horizon, IterationCertificate};
use crate::approxcore::{eps, BoundedValue, ConstantsTable, Ledger, Rational};
use crate::error::{Error, Result};
use crate::helmholtz::{project, project_field, VectorFieldName};
use crate::spectral::names::Approximant;
use crate::spectral::{differentiate, multiply, PairField, SobolevName};
use crate::stokes::add_component_slack;

/// A truncated iterate evaluated at one time.
#[derive(Clone, Debug)]
pub struct IterateOutput {
    pub field: PairField,
    pub ball: Ball,
    pub panels: usize,
    pub ledger: Ledger,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    /// Nested-interval index: `t_n = t/2^n`.
    pub n: u32,
    pub endpoint_tail: f64,
    /// `H^{6/5}` distance bound of the returned approximant.
    pub h65_uncertainty: f64,
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub field: PairField,
    /// Iterate index used.
    pub m: usize,
    pub geometric_tail: f64,
    /// Bound on `‖A^{3/5}(u − ũ)‖₂` beyond the head enclosure; `None` at `t = 0`.
    pub a35_error: Option<f64>,
    pub ledger: Ledger,
}

/// Datum, forcing and certificate for one problem.
pub struct Solver {
    pub a: VectorFieldName,
    /// `g = ℙf`, constant in time.
    pub g: Option<PairField>,
    pub cert: IterationCertificate,
    pub engine: Engine,
}

fn horizon_error(t: &Rational, cert: &IterationCertificate) -> Error {
    Error::HorizonViolation { t: t.to_string(), horizon: cert.t_a.to_string() }
}

/// `L₂` radius of the head enclosure alone.
fn head_radius(f: &PairField) -> f64 {
    let (mut f1, mut f2) = (f.u1().clone(), f.u2().clone());
    for c in [&mut f1, &mut f2] {
        c.tail_l2 = 0.0;
        c.tail_hs.clear();
    }
    PairField::new(f1, f2).expect("pair bases").uncertainty()
}

impl Solver {
    pub fn new(a: VectorFieldName, f: Option<&PairField>, table: &ConstantsTable, cfg: EngineConfig) -> Result<Solver> {
        let g = f.map(project_field);
        let cert = compute_horizon(&a, g.as_ref(), table)?;
        Ok(Solver { a, g, cert, engine: Engine::new(cfg) })
    }

    fn check_time(&self, t: &Rational) -> Result<()> {
        if t.is_negative() || *t > self.cert.t_a {
            return Err(horizon_error(t, &self.cert));
        }
        Ok(())
    }

    fn datum(&self, k: u32) -> Result<Datum> {
        let a = self.a.approx(k)?;
        Datum::new(self.engine.modes(), &a, self.g.as_ref())
    }

    /// Runs the engine on `[0, t]`, doubling panels until `check` accepts.
    fn run_until(&self, d: &Datum, t: f64, m: usize, diffs: bool, check: impl Fn(&Run) -> Result<bool>) -> Result<Run> {
        let mut panels = self.engine.cfg.panels.max(1);
        loop {
            let run = self.engine.run(d, t, panels, m, diffs)?;
            if check(&run)? {
                return Ok(run);
            }
            if panels >= self.engine.cfg.max_panels {
                return Err(Error::BudgetNotMet(format!("time panels exhausted at {panels}")));
            }
            panels *= 2;
        }
    }

    /// `u_m(t)` to `2^{−k}` in `L₂`.
    pub fn iterate(&self, m: usize, t: &Rational, k: u32) -> Result<IterateOutput> {
        self.check_time(t)?;
        let mut ledger = Ledger::new();
        if t.is_zero() {
            let field = self.a.approx(k)?;
            ledger.push("datum", -(k as i32), field.uncertainty());
            return Ok(IterateOutput { field, ball: Ball::default(), panels: 0, ledger });
        }
        let d = self.datum(k + 2)?;
        let tf = BoundedValue::from_rational(t);
        if !tf.is_point() {
            return Err(Error::Precondition(format!("time {t} is not a binary fraction")));
        }
        let target = eps(k as i32);
        let run = self.run_until(&d, tf.mid(), m, false, |run| {
            let f = self.engine.field_at(&run.iterates[m], run.panels);
            let ball = run.iterates[m].ball.e0;
            if 2f64.sqrt() * ball > target {
                return Err(Error::BudgetNotMet(format!(
                    "truncation ball {ball:e} of iterate {m} exceeds 2^-{k}; raise the mode cap"
                )));
            }
            Ok(f.uncertainty() <= target)
        })?;
        let it = &run.iterates[m];
        let field = self.engine.field_at(it, run.panels);
        ledger.push("head enclosure", -(k as i32 + 1), head_radius(&field));
        ledger.push("truncation ball", -(k as i32 + 1), (BoundedValue::point(2.0).sqrt().expect("positive") * BoundedValue::point(it.ball.e0)).hi());
        Ok(IterateOutput { field, ball: it.ball, panels: run.panels, ledger })
    }

    /// `u_m(t)`, `t > 0`, with certified `H^{6/5}` data and the nested-interval report.
    pub fn smoothness_lift(&self, m: usize, t: &Rational, k: u32) -> Result<(IterateOutput, LiftReport)> {
        if !t.is_positive() {
            return Err(Error::Precondition(format!("the smoothness lift needs t > 0, got {t}")));
        }
        let out = self.iterate(m, t, k)?;
        let tv = BoundedValue::from_rational(t);
        let target = BoundedValue::pow2(-(k as i32) - 2);
        let mut n = 1u32;
        while !self.cert.lift_tail(m, tv, n).certainly_le(&target) {
            n += 1;
            if n > 4096 {
                return Err(Error::BudgetNotMet("nested-interval index above 4096".into()));
            }
        }
        let h65 = out.field.u1().hs_uncertainty(&Rational::new(6, 5))?.max(out.field.u2().hs_uncertainty(&Rational::new(6, 5))?);
        let report = LiftReport { n, endpoint_tail: self.cert.lift_tail(m, tv, n).hi(), h65_uncertainty: h65 };
        Ok((out, report))
    }

    /// The solution at `t` to `2^{−k}`: iterate `m` with `L ε^{m−1}/(1−ε) ≤ 2^{−(k+1)}`.
    pub fn solve(&self, t: &Rational, k: u32) -> Result<SolveOutput> {
        self.check_time(t)?;
        if t.is_zero() {
            let it = self.iterate(0, t, k)?;
            return Ok(SolveOutput { field: it.field, m: 0, geometric_tail: 0.0, a35_error: None, ledger: it.ledger });
        }
        let m = self.cert.iterations_for(k + 1);
        let it = self.iterate(m, t, k + 1)?;
        let geo = self.cert.geometric_tail(m).hi();
        let tv = BoundedValue::from_rational(t);
        let a35 = (BoundedValue::point(it.ball.e3) + self.cert.a35_tail(m, tv)).hi();
        // u − head = (u − u_m) + (u_m − ũ_m): L₂ by E₀ plus the geometric tail, H^{6/5} via A^{3/5}
        let mut field = add_component_slack(&it.field, geo);
        let (mut f1, mut f2) = (field.u1().clone(), field.u2().clone());
        for c in [&mut f1, &mut f2] {
            c.tail_hs.insert(Rational::new(6, 5), h65_from_a35(a35));
        }
        field = PairField::new(f1, f2)?;
        let mut ledger = Ledger::new();
        ledger.extend(&format!("iterate {m}"), &it.ledger);
        ledger.push("geometric tail", -(k as i32 + 1), geo);
        Ok(SolveOutput { field, m, geometric_tail: geo, a35_error: Some(a35), ledger })
    }

    /// Certified `‖u_{m+1}(t) − u_m(t)‖₂` enclosures at the panel ends of a
    /// uniform grid on `[0, window]`, for `m = 0..m_max`; each enclosure
    /// includes both truncation balls.
    pub fn differences(&self, window: &Rational, panels: usize, m_max: usize, k: u32) -> Result<Vec<Vec<BoundedValue>>> {
        self.check_time(window)?;
        let d = self.datum(k)?;
        let run = self.engine.run(&d, BoundedValue::from_rational(window).mid(), panels, m_max, true)?;
        Ok((0..m_max)
            .map(|m| {
                let slack = BoundedValue::point(run.iterates[m].ball.e0) + BoundedValue::point(run.iterates[m + 1].ball.e0);
                (0..=panels).map(|j| run.differences[m].l2_at(j).inflate(slack.hi())).collect()
            })
            .collect())
    }
}

/// `ℙ(u·∇)u` from names, for `u` with `H^{6/5}` components.
pub fn nonlinearity(u: &VectorFieldName, k: u32) -> Result<PairField> {
    let need = Rational::new(6, 5);
    if *u.u1.s() < need || *u.u2.s() < need {
        return Err(Error::InsufficientSmoothness(format!(
            "the nonlinearity needs H^6/5 data, got H^{} and H^{}",
            u.u1.s(),
            u.u2.s()
        )));
    }
    let (v1, v2) = (u.u1.weaken(need.clone())?, u.u2.weaken(need)?);
    let f1 = sum_names(&multiply(&v1, &differentiate(&v1, 0)?)?, &multiply(&v2, &differentiate(&v1, 1)?)?)?;
    let f2 = sum_names(&multiply(&v1, &differentiate(&v2, 0)?)?, &multiply(&v2, &differentiate(&v2, 1)?)?)?;
    project(&VectorFieldName::new(f1, f2)?, k)
}

/// `v + w` as an `L₂` name; each summand gets half the budget.
fn sum_names(v: &SobolevName, w: &SobolevName) -> Result<SobolevName> {
    if v.basis() != w.basis() {
        return Err(Error::Precondition("sum of names in different bases".into()));
    }
    let (a, b) = (v.clone(), w.clone());
    let bound = (BoundedValue::point(v.norm_bound()) + BoundedValue::point(w.norm_bound())).hi();
    Ok(SobolevName::from_sequence(Rational::zero(), v.basis(), bound, move |k| {
        let x = a.approx(k + 1)?;
        let y = b.approx(k + 1)?;
        Ok(Approximant { field: x.field.add(&y.field)?, slack: (BoundedValue::point(x.slack) + BoundedValue::point(y.slack)).hi() })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(amp: f64) -> PairField {
        PairField::solenoidal_mode(4, 1, 2, BoundedValue::point(amp))
            .unwrap()
            .add(&PairField::solenoidal_mode(4, 2, 1, BoundedValue::point(-amp / 2.0)).unwrap())
            .unwrap()
            .add(&PairField::solenoidal_mode(4, 1, 1, BoundedValue::point(amp / 3.0)).unwrap())
            .unwrap()
    }

    fn solver(amp: f64) -> Solver {
        let a = VectorFieldName::from_pair(&datum(amp)).unwrap();
        Solver::new(a, None, &ConstantsTable::default_table(), EngineConfig { cap: 8, degree: 8, panels: 4, max_panels: 64 }).unwrap()
    }

    fn band_limited(f: &PairField, s: Rational) -> VectorFieldName {
        VectorFieldName::new(
            SobolevName::band_limited(f.u1().clone(), s.clone()).unwrap(),
            SobolevName::band_limited(f.u2().clone(), s).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_iterate_is_the_semigroup() {
        let s = solver(0.05);
        let t = s.cert.t_a.clone();
        let out = s.iterate(0, &t, 20).unwrap();
        let tf = BoundedValue::from_rational(&t).mid();
        let a = datum(0.05);
        for (n, m) in [(1, 2), (2, 1), (1, 1)] {
            let h = (-(std::f64::consts::PI.powi(2)) * (n * n + m * m) as f64 * tf).exp();
            let (x, y) = out.field.coeffs(n, m);
            let (a1, a2) = a.coeffs(n, m);
            assert!(x.inflate(1e-15).contains(a1.mid() * h) && y.inflate(1e-15).contains(a2.mid() * h));
        }
    }

    #[test]
    fn iterates_at_time_zero_return_the_datum() {
        let s = solver(0.05);
        for m in 0..4 {
            let out = s.iterate(m, &Rational::zero(), 10).unwrap();
            assert_eq!(out.field, datum(0.05));
        }
    }

    #[test]
    fn horizon_is_enforced() {
        let s = solver(0.05);
        let beyond = &s.cert.t_a * &Rational::from_int(2);
        assert!(matches!(s.iterate(1, &beyond, 10), Err(Error::HorizonViolation { .. })));
        assert!(matches!(s.solve(&Rational::new(-1, 8), 10), Err(Error::HorizonViolation { .. })));
    }

    #[test]
    fn zero_data_give_zero_solution() {
        let a = VectorFieldName::from_pair(&PairField::zeros(2)).unwrap();
        let s = Solver::new(a, None, &ConstantsTable::default_table(), EngineConfig { cap: 4, degree: 6, panels: 2, max_panels: 4 }).unwrap();
        let out = s.solve(&Rational::new(1, 4), 10).unwrap();
        assert!(out.field.l2_norm().hi() <= eps(10));
    }

    #[test]
    fn solutions_at_two_precisions_agree() {
        let s = solver(0.05);
        let t = &s.cert.t_a * &Rational::new(1, 2);
        let a = s.solve(&t, 10).unwrap();
        let b = s.solve(&t, 12).unwrap();
        let d = a.field.center().sub(&b.field.center()).unwrap().l2_norm().hi();
        assert!(d <= eps(10) + eps(12), "{d:e}");
        assert!(a.ledger.closes(-10), "{:?}", a.ledger);
    }

    #[test]
    fn first_iterate_differs_from_semigroup_by_the_difference_bound() {
        let s = solver(0.05);
        let t = s.cert.t_a.clone();
        let d = s.differences(&t, 4, 1, 20).unwrap();
        let bound = s.cert.l.hi();
        for v in &d[0] {
            assert!(v.lo() <= bound);
        }
        let sol = s.solve(&t, 12).unwrap();
        let u0 = s.iterate(0, &t, 14).unwrap();
        let gap = sol.field.center().sub(&u0.field.center()).unwrap().l2_norm().hi();
        assert!(gap <= bound + eps(11), "{gap:e} vs {bound:e}");
    }

    #[test]
    fn lift_matches_the_mode_wise_oracle_at_m0() {
        let s = solver(0.05);
        let t = s.cert.t_a.clone();
        let (out, rep) = s.smoothness_lift(0, &t, 16).unwrap();
        let tf = BoundedValue::from_rational(&t).mid();
        // ‖e^{−tA}a‖_{H^{6/5}} from the modes directly
        let a = datum(0.05);
        let mut acc = 0.0;
        for (n, m) in [(1i64, 2i64), (2, 1), (1, 1)] {
            let q = (n * n + m * m) as f64;
            let (x, y) = a.coeffs(n, m);
            let w = (1.0 + q).powf(1.2) * (-2.0 * std::f64::consts::PI.powi(2) * q * tf).exp();
            acc += w * (x.mid().powi(2) + y.mid().powi(2));
        }
        let oracle = acc.sqrt();
        let got = out.field.hs_norm(&Rational::new(6, 5)).unwrap();
        assert!(got.inflate(1e-12).contains(oracle), "{got:?} vs {oracle}");
        assert!(oracle <= s.cert.semigroup_lift_bound(BoundedValue::from_rational(&t)).hi());
        assert!(rep.endpoint_tail <= eps(18));
        assert!(s.smoothness_lift(0, &Rational::zero(), 10).is_err());
    }

    #[test]
    fn name_nonlinearity_matches_engine_table() {
        let eng = Engine::new(EngineConfig { cap: 4, ..Default::default() });
        let u = PairField::solenoidal_mode(4, 1, 2, BoundedValue::point(0.5))
            .unwrap()
            .add(&PairField::solenoidal_mode(4, 3, 1, BoundedValue::point(0.25)).unwrap())
            .unwrap();
        let by_names = nonlinearity(&band_limited(&u, Rational::new(6, 5)), 14).unwrap();
        let by_table = eng.nonlinearity_head(&u);
        let d = by_names.center().sub(&by_table.center()).unwrap().l2_norm().hi();
        assert!(d <= eps(14) + 1e-12, "{d:e}");
        // single mode: a gradient
        let one = PairField::solenoidal_mode(4, 2, 3, BoundedValue::point(0.8)).unwrap();
        assert!(nonlinearity(&band_limited(&one, Rational::new(6, 5)), 12).unwrap().l2_norm().hi() <= eps(12));
        // bilinear scaling
        let b2 = nonlinearity(&band_limited(&u.scale(BoundedValue::point(2.0)), Rational::new(6, 5)), 14).unwrap();
        let d = b2.center().sub(&by_names.center().scale(BoundedValue::point(4.0))).unwrap().l2_norm().hi();
        assert!(d <= 5.0 * eps(14), "{d:e}");
        assert!(matches!(nonlinearity(&band_limited(&u, Rational::one()), 10), Err(Error::InsufficientSmoothness(_))));
    }
}
