//! Fourier transform of the max-norm mollifier.
//!
//! `ĝ(ω) = ∫ γ(z) e^{iω·z} dz = 4γ₀ ∫₀¹ b(r) [cos(ω₁r) sin(ω₂r)/ω₂ + cos(ω₂r) sin(ω₁r)/ω₁] dr`
//! (square-shell decomposition; `sin(ωr)/ω → r` at `ω = 0`). The scaled
//! mollifier has `ĝ_n(ω) = ĝ(ω/2ⁿ)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::approxcore::special::radial_bump_integral;
use crate::approxcore::{BoundedValue, ConstantsTable, Jet, QuadConfig};
use crate::error::Result;

/// Quadrature radius target for every table entry.
pub const GHAT_TARGET: f64 = 1e-13;

/// `sin(ωr)/ω` as a jet in `r`.
fn sinc_jet(r: &Jet, w: BoundedValue) -> Jet {
    if w == BoundedValue::ZERO {
        r.clone()
    } else {
        r.scale(w).sin().scale(BoundedValue::ONE / w)
    }
}

/// `ĝ(ω₁, ω₂)` at radius target `target`.
pub fn ghat(w1: BoundedValue, w2: BoundedValue, target: f64) -> Result<BoundedValue> {
    let g0 = ConstantsTable::default_table().gamma0.value;
    let k = g0 * BoundedValue::point(4.0);
    let f = move |r: &Jet, b: &Jet| {
        let t1 = &r.scale(w1).cos() * &sinc_jet(r, w2);
        let t2 = &r.scale(w2).cos() * &sinc_jet(r, w1);
        Some(b * &(&t1 + &t2))
    };
    let cfg = QuadConfig { order: 10, max_cells: 20_000 };
    // each bracket term is at most r ≤ 1 in modulus
    let body = radial_bump_integral(f, 2.0, target * 0.25, &cfg)?;
    Ok(k * body)
}

/// Frequency `hπ/2 · 2^{−n}` for a half-frequency index `h`.
pub fn half_freq(h: usize, n: u32) -> BoundedValue {
    BoundedValue::pi() * BoundedValue::from_i64(h as i64) * BoundedValue::pow2(-(n as i32) - 1)
}

type Key = (u32, usize, usize);

fn cache() -> &'static Mutex<HashMap<Key, BoundedValue>> {
    static C: OnceLock<Mutex<HashMap<Key, BoundedValue>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `ĝ_n` on the half-frequency lattice `(h₁π/2, h₂π/2)`, `0 ≤ h ≤ hmax`.
///
/// Entries depend only on `(n, h₁, h₂)` and are memoized process-wide, so a
/// table is the same no matter which tables were built before it.
#[derive(Clone, Debug)]
pub struct GhatTable {
    n: u32,
    hmax: usize,
    v: Arc<Vec<BoundedValue>>,
}

impl GhatTable {
    pub fn new(n: u32, hmax: usize) -> Result<GhatTable> {
        let side = hmax + 1;
        let mut missing = Vec::new();
        {
            let c = cache().lock().expect("ghat cache");
            for a in 0..side {
                for b in a..side {
                    if !c.contains_key(&(n, a, b)) {
                        missing.push((a, b));
                    }
                }
            }
        }
        let computed: Vec<((usize, usize), Result<BoundedValue>)> = missing
            .par_iter()
            .map(|&(a, b)| ((a, b), ghat(half_freq(a, n), half_freq(b, n), GHAT_TARGET)))
            .collect();
        {
            let mut c = cache().lock().expect("ghat cache");
            for ((a, b), v) in computed {
                c.insert((n, a, b), v?);
            }
        }
        let c = cache().lock().expect("ghat cache");
        let mut v = vec![BoundedValue::ZERO; side * side];
        for a in 0..side {
            for b in 0..side {
                let key = if a <= b { (n, a, b) } else { (n, b, a) };
                v[a * side + b] = c[&key];
            }
        }
        Ok(GhatTable { n, hmax, v: Arc::new(v) })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn hmax(&self) -> usize {
        self.hmax
    }

    pub fn get(&self, h1: usize, h2: usize) -> BoundedValue {
        self.v[h1 * (self.hmax + 1) + h2]
    }
}

/// `|ĝ_n(ω)| ≤ min(1, G₁ 2ⁿ / max|ωᵢ|)` at half-frequency index `q = max hᵢ`.
pub fn ghat_decay_bound(n: u32, q: f64) -> f64 {
    if q <= 0.0 {
        return 1.0;
    }
    let g1 = ConstantsTable::default_table().mollifier_grad_l1.value;
    let w = BoundedValue::pi() * BoundedValue::point(q) * BoundedValue::point(0.5);
    let b = (g1 * BoundedValue::pow2(n as i32) / w).hi();
    b.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approxcore::integrate;
    use crate::approxcore::special::bump_jet;

    #[test]
    fn unit_mass_at_zero() {
        let g = ghat(BoundedValue::ZERO, BoundedValue::ZERO, 1e-12).unwrap();
        assert!(g.contains(1.0), "{g:?}");
    }

    #[test]
    fn symmetric_and_bounded() {
        let t = GhatTable::new(2, 12).unwrap();
        for a in 0..=12 {
            for b in 0..=12 {
                assert_eq!(t.get(a, b), t.get(b, a));
                assert!(t.get(a, b).abs().lo() <= ghat_decay_bound(2, a.max(b) as f64));
                let g0_rad = ConstantsTable::default_table().gamma0.value.rad();
                assert!(t.get(a, b).rad() <= GHAT_TARGET + 8.0 * g0_rad);
            }
        }
    }

    #[test]
    fn separable_check_against_direct_2d_sum() {
        // ĝ(ω, 0) = ∫∫ γ(z) cos(ω z₁) dz, computed here through the shell form
        // with a different split: integrate over z₁ first on each shell edge.
        let w = BoundedValue::point(3.0);
        let direct = ghat(w, BoundedValue::ZERO, 1e-12).unwrap();
        let g0 = ConstantsTable::default_table().gamma0.value;
        let f = move |r: &Jet| {
            let b = bump_jet(r)?;
            // vertical edges: 2 cos(ωr) · 2r; horizontal edges: 2 · 2 sin(ωr)/ω
            let v = &r.scale(w).cos() * &r.scale(BoundedValue::point(4.0));
            let h = r.scale(w).sin().scale(BoundedValue::point(4.0) / w);
            Some((&b * &(&v + &h)).scale(g0))
        };
        let other = integrate(&f, 0.0, 1.0, 1e-12, &QuadConfig::default()).unwrap();
        assert!(direct.overlaps(&other));
    }
}
