//! Adaptive validated quadrature on compact intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::bounded::BoundedValue;
use super::jet::Jet;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct QuadConfig {
    /// Taylor order of the remainder term; kept even so the weight `(x−c)^p` is nonnegative.
    pub order: usize,
    pub max_cells: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { order: 12, max_cells: 40_000 }
    }
}

#[derive(Clone, Copy)]
struct Cell {
    a: f64,
    b: f64,
    value: BoundedValue,
}

struct ByRadius(Cell);

impl PartialEq for ByRadius {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for ByRadius {}
impl PartialOrd for ByRadius {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ByRadius {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0
            .value
            .width()
            .total_cmp(&o.0.value.width())
            .then_with(|| o.0.a.total_cmp(&self.0.a))
    }
}

/// `∫_{dl}^{dr} x^k dx` for offset intervals.
fn monomial_integral(dl: BoundedValue, dr: BoundedValue, k: usize) -> BoundedValue {
    let kk = (k + 1) as u32;
    (dr.powi(kk) - dl.powi(kk)) / BoundedValue::from_i64(kk as i64)
}

fn cell_integral<F>(f: &F, a: f64, b: f64, order: usize) -> Option<BoundedValue>
where
    F: Fn(&Jet) -> Option<Jet> + ?Sized,
{
    let cell = BoundedValue::new(a, b);
    let h = BoundedValue::point(b) - BoundedValue::point(a);
    let range = f(&Jet::variable(cell, 0)).map(|j| j.value() * h);
    let c = (0.5 * a + 0.5 * b).clamp(a, b);
    let dl = BoundedValue::point(a) - BoundedValue::point(c);
    let dr = BoundedValue::point(b) - BoundedValue::point(c);
    let taylor = (|| {
        let centre = f(&Jet::variable(BoundedValue::point(c), order - 1))?;
        let whole = f(&Jet::variable(cell, order))?;
        let mut acc = BoundedValue::ZERO;
        for k in 0..order {
            acc = acc + centre.coeff(k) * monomial_integral(dl, dr, k);
        }
        let w = monomial_integral(dl, dr, order).nonneg();
        Some(acc + whole.coeff(order) * w)
    })();
    match (range, taylor) {
        (Some(r), Some(t)) if r.is_finite() && t.is_finite() => Some(r.intersect(t).unwrap_or(t)),
        (_, Some(t)) if t.is_finite() => Some(t),
        (Some(r), _) => Some(r),
        _ => None,
    }
}

/// Encloses `∫_a^b f` with radius at most `target`.
///
/// `f` maps a jet of the integration variable to a jet of the integrand, or
/// `None` where it cannot be expanded (a range enclosure is tried instead).
pub fn integrate<F>(f: &F, a: f64, b: f64, target: f64, cfg: &QuadConfig) -> Result<BoundedValue>
where
    F: Fn(&Jet) -> Option<Jet> + ?Sized,
{
    integrate_with_breaks(f, &[a, b], target, cfg)
}

/// Like [`integrate`] but starting from the given sorted cell boundaries.
pub fn integrate_with_breaks<F>(f: &F, breaks: &[f64], target: f64, cfg: &QuadConfig) -> Result<BoundedValue>
where
    F: Fn(&Jet) -> Option<Jet> + ?Sized,
{
    assert!(breaks.len() >= 2);
    assert!(cfg.order >= 2 && cfg.order % 2 == 0);
    let mut heap = BinaryHeap::new();
    let mut width_sum = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a >= b {
            if a > b {
                return Err(Error::Domain(format!("quadrature interval [{a}, {b}] is inverted")));
            }
            continue;
        }
        let value = cell_integral(f, a, b, cfg.order)
            .ok_or_else(|| Error::Domain(format!("integrand not evaluable on [{a}, {b}]")))?;
        width_sum += value.width();
        heap.push(ByRadius(Cell { a, b, value }));
    }
    loop {
        if 0.5 * width_sum <= target * 0.75 {
            let mut cells: Vec<Cell> = heap.iter().map(|c| c.0).collect();
            cells.sort_by(|x, y| x.a.total_cmp(&y.a));
            let total = BoundedValue::sum(cells.iter().map(|c| c.value));
            if total.rad() <= target {
                return Ok(total);
            }
        }
        if heap.len() >= cfg.max_cells {
            return Err(Error::BudgetNotMet(format!(
                "quadrature used {} cells, radius {:e} above target {:e}",
                heap.len(),
                0.5 * width_sum,
                target
            )));
        }
        let worst = heap.pop().expect("nonempty").0;
        width_sum -= worst.value.width();
        let m = 0.5 * worst.a + 0.5 * worst.b;
        if m <= worst.a || m >= worst.b {
            return Err(Error::BudgetNotMet(format!(
                "cell [{:e}, {:e}] cannot be split further; radius {:e}",
                worst.a,
                worst.b,
                worst.value.rad()
            )));
        }
        for (x, y) in [(worst.a, m), (m, worst.b)] {
            let value = cell_integral(f, x, y, cfg.order)
                .ok_or_else(|| Error::Domain(format!("integrand not evaluable on [{x}, {y}]")))?;
            width_sum += value.width();
            heap.push(ByRadius(Cell { a: x, b: y, value }));
        }
        // running sum drifts; recompute exactly now and then
        if heap.len() % 1024 == 0 {
            width_sum = heap.iter().map(|c| c.0.value.width()).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_nearly_exact() {
        let f = |x: &Jet| Some(x * x);
        let v = integrate(&f, 0.0, 1.0, 1e-14, &QuadConfig::default()).unwrap();
        assert!(v.inflate(1e-15).contains(1.0 / 3.0));
        assert!(v.rad() <= 1e-14);
    }

    #[test]
    fn exp_over_unit_interval() {
        let f = |x: &Jet| Some(x.exp());
        let v = integrate(&f, 0.0, 1.0, 1e-13, &QuadConfig::default()).unwrap();
        assert!(v.contains(std::f64::consts::E - 1.0) || v.inflate(1e-15).contains(std::f64::consts::E - 1.0));
    }

    #[test]
    fn bump_with_boundary_fallback() {
        // ∫_{-1}^{1} exp(−1/(1−x²)) dx ≈ 0.443993816168...
        let f = |x: &Jet| {
            let one = x.constant_like(BoundedValue::ONE);
            let d = &one - &x.sqr();
            if d.value().hi() <= 0.0 {
                return Some(x.constant_like(BoundedValue::ZERO));
            }
            if d.value().lo() <= 0.0 {
                if x.order() == 0 {
                    let lo = d.value().hi();
                    return Some(x.constant_like(BoundedValue::new(0.0, (-1.0 / lo).exp().next_up())));
                }
                return None;
            }
            Some((-d.recip()?).exp())
        };
        let v = integrate(&f, -1.0, 1.0, 1e-9, &QuadConfig::default()).unwrap();
        assert!(v.inflate(1e-11).contains(0.443993816168));
    }

    #[test]
    fn budget_exhaustion_reported() {
        let f = |x: &Jet| Some(x.sin());
        let cfg = QuadConfig { order: 2, max_cells: 4 };
        let e = integrate(&f, 0.0, 100.0, 1e-14, &cfg).unwrap_err();
        assert_eq!(e.kind(), "budget-not-met");
    }
}
