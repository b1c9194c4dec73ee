//! Analytic constants consumed by the estimates, with their provenance.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::bounded::BoundedValue;
use super::quad::QuadConfig;
use super::rational::Rational;
use super::special::{beta, radial_bump_integral};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Configured,
    Derived,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: BoundedValue,
    pub provenance: Provenance,
}

impl Constant {
    fn derived(value: BoundedValue) -> Constant {
        Constant { value, provenance: Provenance::Derived }
    }

    fn configured(value: BoundedValue) -> Constant {
        Constant { value, provenance: Provenance::Configured }
    }
}

/// User-supplied overrides, all exact rational literals.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsOverride {
    #[serde(rename = "C", default)]
    pub c: Option<Rational>,
    #[serde(rename = "M", default)]
    pub m: Option<Rational>,
    #[serde(rename = "C_small_time", default)]
    pub c_small_time: Option<Rational>,
    #[serde(rename = "C_alpha", default)]
    pub c_alpha: BTreeMap<String, Rational>,
    #[serde(rename = "C_s", default)]
    pub c_s: BTreeMap<String, Rational>,
    #[serde(rename = "T_cap", default)]
    pub t_cap: Option<Rational>,
}

/// The constants table. Entries without an override take their default: the
/// exact value for the diagonal spectral model where one exists (Derived),
/// otherwise a documented configuration value (Configured).
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsTable {
    #[serde(rename = "C")]
    pub c: Constant,
    #[serde(rename = "M")]
    pub m: Constant,
    #[serde(rename = "C_small_time")]
    pub c_small_time: Constant,
    #[serde(rename = "C_alpha")]
    c_alpha: BTreeMap<Rational, Constant>,
    #[serde(rename = "C_s")]
    c_s: BTreeMap<Rational, Constant>,
    #[serde(rename = "T_cap")]
    pub t_cap: Rational,
    pub c1: Constant,
    #[serde(rename = "B1")]
    pub b1: Constant,
    #[serde(rename = "Ctilde")]
    pub ctilde: Constant,
    /// Normalisation of the max-norm bump: `γ₀ = 1 / (8 ∫₀¹ r b(r) dr)`.
    pub gamma0: Constant,
    /// `4 γ₀ ∫₀¹ b(r) dr`, the L¹ norm of a partial derivative of the mollifier.
    pub mollifier_grad_l1: Constant,
}

/// `(α/e)^α`, the supremum of `(tλ)^α e^{−tλ}`.
pub fn spectral_c_alpha(alpha: &Rational) -> BoundedValue {
    if alpha.is_zero() {
        return BoundedValue::ONE;
    }
    let a = BoundedValue::from_rational(alpha);
    (a * (a.ln().expect("α > 0") - BoundedValue::ONE)).exp()
}

/// `2 √S` with `S ≥ Σ_{n,m≥0} (1+n²+m²)^{−s}` bounded by integral comparison.
pub fn spectral_c_s(s: &Rational) -> Result<BoundedValue> {
    if *s <= Rational::one() {
        return Err(Error::Precondition(format!("sup-norm embedding needs s > 1, got {s}")));
    }
    let sv = BoundedValue::from_rational(s);
    let one = BoundedValue::ONE;
    let two = BoundedValue::point(2.0);
    let zeta = one + one / (two * sv - one);
    let plane = BoundedValue::pi() / BoundedValue::point(4.0) / (sv - one);
    let total = one + two * zeta + plane;
    Ok(two * total.sqrt().expect("positive"))
}

/// `(γ₀, G1, B1)`; independent of any override, computed once.
fn fixed_constants() -> &'static (BoundedValue, BoundedValue, BoundedValue) {
    static CELL: OnceLock<(BoundedValue, BoundedValue, BoundedValue)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = QuadConfig::default();
        let mass = radial_bump_integral(|r, b| Some(r * b), 1.0, 1e-14, &cfg).expect("bump moment");
        let gamma0 = BoundedValue::ONE / (BoundedValue::point(8.0) * mass);
        let plain = radial_bump_integral(|_r, b| Some(b.clone()), 1.0, 1e-14, &cfg).expect("bump integral");
        let g1 = BoundedValue::point(4.0) * gamma0 * plain;
        let quarter = beta(&Rational::new(1, 4), &Rational::new(1, 4), 1e-12).expect("B(1/4,1/4)");
        let half_quarter = beta(&Rational::new(1, 2), &Rational::new(1, 4), 1e-12).expect("B(1/2,1/4)");
        (gamma0, g1, quarter.max(half_quarter).max(BoundedValue::ONE))
    })
}

fn key(s: &str) -> Result<Rational> {
    s.parse().map_err(|_| Error::Parse(format!("bad constant key {s:?}")))
}

impl ConstantsTable {
    pub fn default_table() -> ConstantsTable {
        Self::with_overrides(&ConstantsOverride::default()).expect("defaults are valid")
    }

    pub fn from_json(text: &str) -> Result<ConstantsTable> {
        let o: ConstantsOverride = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::with_overrides(&o)
    }

    pub fn with_overrides(o: &ConstantsOverride) -> Result<ConstantsTable> {
        let pos = |name: &str, r: &Rational| -> Result<BoundedValue> {
            if !r.is_positive() {
                return Err(Error::Precondition(format!("constant {name} must be positive, got {r}")));
            }
            Ok(BoundedValue::from_rational(r))
        };
        let c = match &o.c {
            Some(r) => Constant::configured(pos("C", r)?),
            None => Constant::derived(BoundedValue::ONE),
        };
        let m = match &o.m {
            Some(r) => Constant::configured(pos("M", r)?),
            None => Constant::configured(BoundedValue::ONE),
        };
        let c_small_time = match &o.c_small_time {
            Some(r) => Constant::configured(pos("C_small_time", r)?),
            None => Constant::derived(BoundedValue::ONE),
        };
        let mut c_alpha = BTreeMap::new();
        for (k, v) in &o.c_alpha {
            let a = key(k)?;
            if a.is_zero() {
                return Err(Error::Precondition("C_0 = 1 is fixed and cannot be overridden".into()));
            }
            c_alpha.insert(a, Constant::configured(pos("C_alpha", v)?));
        }
        let mut c_s = BTreeMap::new();
        for (k, v) in &o.c_s {
            c_s.insert(key(k)?, Constant::configured(pos("C_s", v)?));
        }
        let t_cap = match &o.t_cap {
            Some(r) if r.is_positive() => r.clone(),
            Some(r) => return Err(Error::Precondition(format!("T_cap must be positive, got {r}"))),
            None => Rational::one(),
        };
        let (gamma0, g1, b1) = *fixed_constants();
        let mut t = ConstantsTable {
            c,
            m,
            c_small_time,
            c_alpha,
            c_s,
            t_cap,
            c1: Constant::derived(BoundedValue::ONE),
            b1: Constant::derived(b1),
            ctilde: Constant::derived(BoundedValue::ONE),
            gamma0: Constant::derived(gamma0),
            mollifier_grad_l1: Constant::derived(g1),
        };
        let mut c1 = BoundedValue::ONE;
        for a in [Rational::new(1, 4), Rational::new(1, 2), Rational::new(3, 4)] {
            c1 = c1.max(t.c_alpha(&a)?.value);
        }
        t.c1 = Constant::derived(c1);
        t.ctilde = Constant::derived(c1 * t.m.value * b1);
        Ok(t)
    }

    /// `C_α` for `α ∈ [0, 1)`; `C_0 = 1` always.
    pub fn c_alpha(&self, alpha: &Rational) -> Result<Constant> {
        if alpha.is_negative() || *alpha >= Rational::one() {
            return Err(Error::Precondition(format!("C_alpha needs 0 ≤ α < 1, got {alpha}")));
        }
        if alpha.is_zero() {
            return Ok(Constant::derived(BoundedValue::ONE));
        }
        Ok(match self.c_alpha.get(alpha) {
            Some(c) => *c,
            None => Constant::derived(spectral_c_alpha(alpha)),
        })
    }

    pub fn c_s(&self, s: &Rational) -> Result<Constant> {
        match self.c_s.get(s) {
            Some(c) => Ok(*c),
            None => Ok(Constant::derived(spectral_c_s(s)?)),
        }
    }

    pub fn t_cap_value(&self) -> BoundedValue {
        BoundedValue::from_rational(&self.t_cap)
    }
}
