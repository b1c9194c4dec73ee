//! Computable horizon `T_a` and the contraction certificate of the Picard
//! iteration on `[0, T_a]`.

use serde::Serialize;

use crate::approxcore::{beta, BoundedValue, ConstantsTable, Rational};
use crate::error::{Error, Result};
use crate::helmholtz::VectorFieldName;
use crate::spectral::PairField;

/// Default depth of the `K_{β,m}` and `M_{β,m}` tables.
pub const TABLE_DEPTH: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct IterationCertificate {
    /// Dyadic horizon.
    #[serde(serialize_with = "ser_rational")]
    pub t_a: Rational,
    pub khat: u32,
    /// Upper bound on `‖A^{1/4} a_k̂‖₂`, `‖A^{1/2} a_k̂‖₂` and `‖a‖₂`.
    pub a_quarter: f64,
    pub a_half: f64,
    pub a_l2: f64,
    /// `‖ℙf‖₂` upper bound; zero when unforced.
    pub forcing_l2: f64,
    pub ctilde: BoundedValue,
    pub k0: BoundedValue,
    /// `[K_{1/4,m}, K_{1/2,m}]`.
    pub k_beta_m: Vec<[BoundedValue; 2]>,
    pub k_cap: BoundedValue,
    pub epsilon: BoundedValue,
    pub l: BoundedValue,
    /// `[M_{1/4,m}, M_{1/2,m}, M_{3/5,m}]`.
    pub m_beta_m: Vec<[BoundedValue; 3]>,
    #[serde(skip)]
    consts: Consts,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// The constants the recursions need, resolved once.
#[derive(Clone, Debug)]
struct Consts {
    c: BoundedValue,
    m: BoundedValue,
    /// `C_{1/4}, C_{1/2}, C_{3/5}, C_{3/4}, C_{17/20}`.
    c_quarter: BoundedValue,
    c_half: BoundedValue,
    c_35: BoundedValue,
    c_34: BoundedValue,
    c_1720: BoundedValue,
    /// `B(1/2,1/4)`, `B(1/4,1/4)`, `B(3/20,1/4)`, `B(3/4,1/4)`.
    b_half: BoundedValue,
    b_quarter: BoundedValue,
    b_320: BoundedValue,
    b_34: BoundedValue,
}

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

impl Consts {
    fn new(t: &ConstantsTable) -> Result<Consts> {
        let ca = |p, q| t.c_alpha(&r(p, q)).map(|c| c.value);
        let b = |p, q| beta(&r(p, q), &r(1, 4), 1e-12);
        Ok(Consts {
            c: t.c.value,
            m: t.m.value,
            c_quarter: ca(1, 4)?,
            c_half: ca(1, 2)?,
            c_35: ca(3, 5)?,
            c_34: ca(3, 4)?,
            c_1720: ca(17, 20)?,
            b_half: b(1, 2)?,
            b_quarter: b(1, 4)?,
            b_320: b(3, 20)?,
            b_34: b(3, 4)?,
        })
    }
}

/// Smallest `k` with `2^{−k} < bound`.
fn first_bits_below(bound: BoundedValue) -> u32 {
    let mut k = 0u32;
    while !(BoundedValue::pow2(-(k as i32)).certainly_lt(&bound)) {
        k += 1;
    }
    k
}

fn pow_q(x: BoundedValue, e: Rational) -> BoundedValue {
    if x == BoundedValue::ZERO {
        return BoundedValue::ZERO;
    }
    x.pow_rational(&e).expect("positive base")
}

/// `max(T^{1/4}, T^{1/2})`.
fn growth(t: BoundedValue) -> BoundedValue {
    pow_q(t, r(1, 4)).max(pow_q(t, r(1, 2)))
}

impl IterationCertificate {
    /// `K_{β,m}` for `β = 1/4` (`which = 0`) or `1/2`, extending the table as needed.
    pub fn k_beta(&self, which: usize, m: usize) -> BoundedValue {
        let mut rows = self.k_beta_m.clone();
        while rows.len() <= m {
            rows.push(self.next_k(rows.last().expect("nonempty")));
        }
        rows[m][which]
    }

    fn next_k(&self, prev: &[BoundedValue; 2]) -> [BoundedValue; 2] {
        let c = &self.consts;
        let prod = prev[0] * prev[1];
        // K_{β,m+1} = k₀ + C_{β+1/4} M B(3/4−β, 1/4) K_{1/4,m} K_{1/2,m}
        [self.k0 + c.c_half * c.m * c.b_half * prod, self.k0 + c.c_34 * c.m * c.b_quarter * prod]
    }

    fn next_m(&self, prev: &[BoundedValue; 3]) -> [BoundedValue; 3] {
        let c = &self.consts;
        let m0 = &self.m_beta_m[0];
        let prod = c.m * prev[0] * prev[1];
        [
            m0[0] + c.c_half * prod * c.b_half,
            m0[1] + c.c_34 * prod * c.b_quarter,
            m0[2] + c.c_1720 * prod * c.b_320,
        ]
    }

    /// `M_{β,m}` for `β = 1/4, 1/2, 3/5` (`which = 0, 1, 2`).
    pub fn m_beta(&self, which: usize, m: usize) -> BoundedValue {
        let mut rows = self.m_beta_m.clone();
        while rows.len() <= m {
            rows.push(self.next_m(rows.last().expect("nonempty")));
        }
        rows[m][which]
    }

    pub fn t_a_value(&self) -> BoundedValue {
        BoundedValue::from_rational(&self.t_a)
    }

    /// Difference bound `L ε^{m−1}` on `‖u_{m+1}(t) − u_m(t)‖₂`, `m ≥ 1`.
    pub fn difference_bound(&self, m: usize) -> BoundedValue {
        assert!(m >= 1, "the geometric bound starts at m = 1");
        self.l * self.epsilon.powi(m as u32 - 1)
    }

    /// `Σ_{j ≥ m} L ε^{j−1} = L ε^{m−1}/(1−ε)`: distance from `u_m` to the solution.
    pub fn geometric_tail(&self, m: usize) -> BoundedValue {
        self.difference_bound(m) / (BoundedValue::ONE - self.epsilon)
    }

    /// Bound on `‖A^{3/5}(u − u_m)(t)‖₂`:
    /// `2K C_{17/20} B(3/20, 1/4) ε^{m−1}/(1−ε) · t^{−3/5}`.
    pub fn a35_tail(&self, m: usize, t: BoundedValue) -> BoundedValue {
        let c = &self.consts;
        BoundedValue::point(2.0) * self.k_cap * c.c_1720 * c.b_320 * self.epsilon.powi(m as u32 - 1)
            / (BoundedValue::ONE - self.epsilon)
            / pow_q(t, r(3, 5))
    }

    /// Smallest `m ≥ 1` with `L ε^{m−1}/(1−ε) ≤ 2^{−k}`.
    pub fn iterations_for(&self, k: u32) -> usize {
        let target = BoundedValue::pow2(-(k as i32));
        let mut m = 1;
        while !self.geometric_tail(m).certainly_le(&target) {
            m += 1;
        }
        m
    }

    /// Left-end lift tail `C C_{17/20} M M_{1/4,m} M_{1/2,m} (t−t_n)^{−17/20} · 4 t_n^{1/4}`
    /// with `t_n = t/2^n`.
    pub fn lift_tail(&self, m: usize, t: BoundedValue, n: u32) -> BoundedValue {
        let c = &self.consts;
        let tn = t * BoundedValue::pow2(-(n as i32));
        c.c * c.c_1720 * c.m * self.m_beta(0, m) * self.m_beta(1, m) / pow_q(t - tn, r(17, 20))
            * BoundedValue::point(4.0)
            * pow_q(tn, r(1, 4))
    }

    /// `C C_{3/5} t^{−3/5} ‖a‖₂`, the smoothing bound of `u₀(t)` in `H^{6/5}`.
    pub fn semigroup_lift_bound(&self, t: BoundedValue) -> BoundedValue {
        self.consts.c * self.consts.c_35 * BoundedValue::point(self.a_l2) / pow_q(t, r(3, 5))
    }
}

/// `k̂`, `T_a` and the `K`, `M` tables for datum `a` and forcing `g = ℙf`
/// (constant in time).
pub fn compute_horizon(a: &VectorFieldName, g: Option<&PairField>, table: &ConstantsTable) -> Result<IterationCertificate> {
    let consts = Consts::new(table)?;
    let ctilde = table.ctilde.value;
    let c1 = table.c1.value;
    // ‖a − a_k̂‖ ≤ 2^{−k̂} so that c₁‖a − a_k̂‖ < 1/(16 C̃)
    let khat = first_bits_below(BoundedValue::ONE / (BoundedValue::point(16.0) * c1 * ctilde));
    let approx = a.approx(khat)?;
    let center = approx.center();
    let dist = BoundedValue::point(approx.uncertainty());
    let a_quarter = center.a_norm(&r(1, 4))?.hi();
    let a_half = center.a_norm(&r(1, 2))?.hi();
    let a_l2 = approx.l2_norm().hi();
    let forcing_l2 = match g {
        Some(g) => g.l2_norm().hi(),
        None => 0.0,
    };
    if !forcing_l2.is_finite() || !a_l2.is_finite() {
        return Err(Error::Precondition("datum or forcing norm is not finite".into()));
    }
    let big_n = BoundedValue::point(a_quarter.max(a_half));
    let limit = BoundedValue::ONE / (BoundedValue::point(16.0) * ctilde);
    let eighth = BoundedValue::ONE / (BoundedValue::point(8.0) * ctilde);
    let fg = BoundedValue::point(forcing_l2);
    // sup_{t ≤ T} t^β ‖A^β ∫ e^{−(t−s)A} g‖ ≤ C_β T ‖g‖/(1−β)
    let forcing_term = |t: BoundedValue| {
        (consts.c_quarter * t * fg / BoundedValue::point(0.75)).max(consts.c_half * t * fg / BoundedValue::point(0.5))
    };
    let k0_of = |t: BoundedValue| c1 * dist + growth(t) * big_n + forcing_term(t);
    let mut t_a = table.t_cap.clone();
    let half = r(1, 2);
    let mut tries = 0;
    loop {
        let t = BoundedValue::from_rational(&t_a);
        if (growth(t) * big_n).certainly_lt(&limit) && k0_of(t).certainly_lt(&eighth) {
            break;
        }
        t_a = &t_a * &half;
        tries += 1;
        if tries > 2000 {
            return Err(Error::BudgetNotMet("no dyadic horizon above 2^-2000".into()));
        }
    }
    let k0 = k0_of(BoundedValue::from_rational(&t_a));
    let root2 = BoundedValue::point(2.0).sqrt().expect("positive");
    let k_cap = BoundedValue::point(4.0) * k0 * (root2 - BoundedValue::ONE) / root2;
    let epsilon = BoundedValue::point(2.0) * ctilde * k_cap;
    let l = BoundedValue::point(2.0) * k_cap * consts.c_quarter * consts.b_34;
    let tval = BoundedValue::from_rational(&t_a);
    let fa = BoundedValue::point(a_l2);
    let m0 = [
        consts.c_quarter * fa + consts.c_quarter * tval * fg / BoundedValue::point(0.75),
        consts.c_half * fa + consts.c_half * tval * fg / BoundedValue::point(0.5),
        consts.c_35 * fa + consts.c_35 * tval * fg / BoundedValue::point(0.4),
    ];
    let mut cert = IterationCertificate {
        t_a,
        khat,
        a_quarter,
        a_half,
        a_l2,
        forcing_l2,
        ctilde,
        k0,
        k_beta_m: vec![[k0, k0]],
        k_cap,
        epsilon,
        l,
        m_beta_m: vec![m0],
        consts,
    };
    for _ in 0..TABLE_DEPTH {
        let next = cert.next_k(cert.k_beta_m.last().expect("nonempty"));
        cert.k_beta_m.push(next);
        let next = cert.next_m(cert.m_beta_m.last().expect("nonempty"));
        cert.m_beta_m.push(next);
    }
    if !cert.epsilon.certainly_lt(&BoundedValue::ONE) {
        return Err(Error::BudgetNotMet(format!("contraction constant {:?} not below 1", cert.epsilon)));
    }
    Ok(cert)
}

/// `w_{m+1} = 1 + w_m²/8` from `w₀ = 1`: the normalized bound recursion.
pub fn scalar_recursion(steps: usize) -> Vec<f64> {
    let mut w = vec![1.0];
    for _ in 0..steps {
        let x = *w.last().expect("nonempty");
        w.push(1.0 + x * x / 8.0);
    }
    w
}
