//! Truncated Picard iteration on the stream-coefficient representation.
//!
//! A solenoidal pair field with modes `1 ≤ n, m ≤ C` is `ψ_{nm}` times the
//! unit field `(−m, n)/|k|` on sin·cos / cos·sin modes. The truncated iterate
//! `ũ_{m+1} = e^{−tA}a_C − ∫₀^t e^{−(t−s)A}(ℙ_C B(ũ_m) − g_C) ds` is enclosed
//! panel by panel with Taylor models in time. Everything the truncation
//! drops is collected in an error ball valid uniformly on the window.

use std::sync::OnceLock;

use serde::Serialize;

use super::tm::{duhamel_panel, Tm};
use crate::approxcore::{BoundedValue, Rational};
use crate::error::{Error, Result};
use crate::spectral::field::hypot_up;
use crate::spectral::ops::product_1d;
use crate::spectral::{Axis, PairField};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EngineConfig {
    /// Highest retained mode index in each direction.
    pub cap: usize,
    /// Taylor-model degree in time.
    pub degree: usize,
    /// Initial panel count; doubled on demand.
    pub panels: usize,
    pub max_panels: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { cap: 12, degree: 10, panels: 8, max_panels: 256 }
    }
}

fn up(a: f64, b: f64) -> f64 {
    (BoundedValue::point(a) + BoundedValue::point(b)).hi()
}

fn bv(x: f64) -> BoundedValue {
    BoundedValue::point(x)
}

/// `π^{−12/5} Σ_{(n,m) ≠ 0} (n²+m²)^{−6/5}`, so that `Σ|c| ≤ √Z ‖A^{3/5} f‖₂`.
pub fn wiener_zeta() -> BoundedValue {
    static CELL: OnceLock<BoundedValue> = OnceLock::new();
    *CELL.get_or_init(|| {
        let big = 200i64;
        let e = Rational::new(6, 5);
        let mut acc = BoundedValue::ZERO;
        for n in 0..=big {
            for m in 0..=big {
                if n == 0 && m == 0 {
                    continue;
                }
                acc = acc + BoundedValue::ONE / BoundedValue::from_i64(n * n + m * m).pow_rational(&e).expect("positive");
            }
        }
        // max(n,m) > N, by rows: Σ_{n>N} n^{−12/5} + n^{−7/5}∫₀^∞(1+y²)^{−6/5}dy, the integral ≤ 12/7
        let nb = BoundedValue::from_i64(big);
        let r = |p: i64, q: i64| BoundedValue::from_rational(&Rational::new(p, q));
        let tail = r(2, 1)
            * (r(5, 7) * nb.pow_rational(&Rational::new(-7, 5)).expect("positive")
                + r(12, 7) * r(5, 2) * nb.pow_rational(&Rational::new(-2, 5)).expect("positive"));
        (acc + tail) / BoundedValue::pi().pow_rational(&Rational::new(12, 5)).expect("positive")
    })
}

/// Mode bookkeeping for cap `C`: index `(n−1)C + (m−1)`.
#[derive(Clone, Debug)]
pub struct Modes {
    pub cap: usize,
    pub nm: Vec<(i64, i64)>,
    pub mu: Vec<BoundedValue>,
    /// `u₁ = α₁ ψ`, `u₂ = α₂ ψ`.
    pub alpha1: Vec<BoundedValue>,
    pub alpha2: Vec<BoundedValue>,
}

impl Modes {
    pub fn new(cap: usize) -> Modes {
        let mut nm = Vec::new();
        let (mut mu, mut alpha1, mut alpha2) = (Vec::new(), Vec::new(), Vec::new());
        let pi2 = BoundedValue::pi().sqr();
        for n in 1..=cap as i64 {
            for m in 1..=cap as i64 {
                nm.push((n, m));
                let q = BoundedValue::from_i64(n * n + m * m);
                mu.push(pi2 * q);
                let r = q.sqrt().expect("positive");
                alpha1.push(-(BoundedValue::from_i64(m) / r));
                alpha2.push(BoundedValue::from_i64(n) / r);
            }
        }
        Modes { cap, nm, mu, alpha1, alpha2 }
    }

    pub fn len(&self) -> usize {
        self.nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nm.is_empty()
    }

    pub fn index(&self, n: i64, m: i64) -> Option<usize> {
        let c = self.cap as i64;
        if (1..=c).contains(&n) && (1..=c).contains(&m) {
            Some(((n - 1) * c + (m - 1)) as usize)
        } else {
            None
        }
    }

    /// Stream coefficients of the head of `p` restricted to the cap.
    pub fn stream_coeffs(&self, p: &PairField) -> Vec<BoundedValue> {
        self.nm
            .iter()
            .map(|&(n, m)| {
                let (a, b) = p.coeffs(n, m);
                let r = BoundedValue::from_i64(n * n + m * m).sqrt().expect("positive");
                (BoundedValue::from_i64(n) * b - BoundedValue::from_i64(m) * a) / r
            })
            .collect()
    }

    /// Pair field with the given stream coefficients and no tail.
    pub fn pair_from_stream(&self, psi: &[BoundedValue]) -> PairField {
        let mut f = PairField::zeros(self.cap);
        for (i, &(n, m)) in self.nm.iter().enumerate() {
            if psi[i] != BoundedValue::ZERO {
                f.set(n, m, self.alpha1[i] * psi[i], self.alpha2[i] * psi[i]).expect("inside cap");
            }
        }
        f
    }
}

/// Exact coefficients of `ℙ(v·∇)w` in stream form: for modes `p` of `v` and
/// `q` of `w`, output mode `r` on the `2C × 2C` grid receives `coef · ψᵥ_p ψ_w_q`.
#[derive(Clone, Debug)]
pub struct Bilinear {
    pub modes: Modes,
    /// Sorted by `(p, q)`.
    entries: Vec<(u32, u32, u32, BoundedValue)>,
}

impl Bilinear {
    pub fn new(cap: usize) -> Bilinear {
        let modes = Modes::new(cap);
        let pi = BoundedValue::pi();
        let side = 2 * cap;
        let mut entries = Vec::new();
        let mut acc: Vec<(u32, BoundedValue)> = Vec::new();
        for (p, &(n, m)) in modes.nm.iter().enumerate() {
            let (a1p, a2p) = (modes.alpha1[p], modes.alpha2[p]);
            for (q, &(n2, m2)) in modes.nm.iter().enumerate() {
                let (a1q, a2q) = (modes.alpha1[q], modes.alpha2[q]);
                let (nq, mq) = (BoundedValue::from_i64(n2), BoundedValue::from_i64(m2));
                // (F component, x axes, y axes, scalar)
                let terms = [
                    (0, (Axis::Sin, Axis::Cos), (Axis::Cos, Axis::Cos), a1p * nq * pi * a1q),
                    (0, (Axis::Cos, Axis::Sin), (Axis::Sin, Axis::Sin), -(a2p * mq * pi * a1q)),
                    (1, (Axis::Sin, Axis::Sin), (Axis::Cos, Axis::Sin), -(a1p * nq * pi * a2q)),
                    (1, (Axis::Cos, Axis::Cos), (Axis::Sin, Axis::Cos), a2p * mq * pi * a2q),
                ];
                acc.clear();
                for (comp, (ax, bx), (ay, by), k) in terms {
                    for (rx, wx) in product_1d(ax, n as usize, bx, n2 as usize) {
                        for (ry, wy) in product_1d(ay, m as usize, by, m2 as usize) {
                            if rx == 0 || ry == 0 {
                                continue; // killed by the projection
                            }
                            let r = BoundedValue::from_i64((rx * rx + ry * ry) as i64).sqrt().expect("positive");
                            // ψ_r = (−r_y F₁ + r_x F₂)/|r|
                            let proj = if comp == 0 { -(BoundedValue::from_i64(ry as i64)) } else { BoundedValue::from_i64(rx as i64) } / r;
                            let idx = ((rx - 1) * side + (ry - 1)) as u32;
                            let c = k * wx * wy * proj;
                            match acc.iter_mut().find(|e| e.0 == idx) {
                                Some(e) => e.1 = e.1 + c,
                                None => acc.push((idx, c)),
                            }
                        }
                    }
                }
                for &(r, c) in &acc {
                    entries.push((p as u32, q as u32, r, c));
                }
            }
        }
        Bilinear { modes, entries }
    }

    pub fn side(&self) -> usize {
        2 * self.modes.cap
    }

    /// Stream coefficients of `ℙ(v·∇)w` on the `2C × 2C` grid, index `(r_x−1)2C + (r_y−1)`.
    pub fn apply(&self, v: &[Tm], w: &[Tm], h: f64) -> Vec<Tm> {
        let deg = v[0].deg();
        let side = self.side();
        let mut out = vec![Tm::zero(deg); side * side];
        let mut i = 0;
        let e = &self.entries;
        while i < e.len() {
            let (p, q) = (e[i].0, e[i].1);
            let mut j = i;
            while j < e.len() && e[j].0 == p && e[j].1 == q {
                j += 1;
            }
            let (vp, wq) = (&v[p as usize], &w[q as usize]);
            if !vp.is_zero() && !wq.is_zero() {
                let prod = vp.mul(wq, h);
                for &(_, _, r, c) in &e[i..j] {
                    out[r as usize].axpy(c, &prod);
                }
            }
            i = j;
        }
        out
    }

    /// Splits a `2C`-grid output into retained stream coefficients and the
    /// `L₂` norm bound of the dropped ones over the panel.
    pub fn split(&self, full: Vec<Tm>, h: f64) -> (Vec<Tm>, f64) {
        let side = self.side();
        let cap = self.modes.cap;
        let deg = full[0].deg();
        let mut kept = vec![Tm::zero(deg); self.modes.len()];
        let mut dropped = BoundedValue::ZERO;
        for (idx, t) in full.into_iter().enumerate() {
            let (rx, ry) = (idx / side + 1, idx % side + 1);
            if rx <= cap && ry <= cap {
                kept[(rx - 1) * cap + (ry - 1)] = t;
            } else if !t.is_zero() {
                dropped = dropped + bv(t.mag(h)).sqr();
            }
        }
        (kept, dropped.sqrt().expect("nonnegative").hi())
    }
}

/// Uniform-in-time bounds on `e = u − ũ`: `‖e‖₂`, `‖A^{1/2}e‖₂`, `‖A^{3/5}e‖₂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Ball {
    pub e0: f64,
    pub e1: f64,
    pub e3: f64,
}

impl Ball {
    pub fn is_zero(&self) -> bool {
        self.e0 == 0.0 && self.e1 == 0.0 && self.e3 == 0.0
    }
}

/// Sup-in-time bounds on a truncated iterate: `max_i ‖ũ_i‖_∞`,
/// `(Σ_ij ‖∂_j ũ_i‖²_∞)^{1/2}`, and the dropped norm of `B(ũ)`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Sup {
    pub u: f64,
    pub grad: f64,
    pub dropped: f64,
}

/// Initial datum and forcing in stream form with their truncation balls.
#[derive(Clone, Debug)]
pub struct Datum {
    pub psi: Vec<BoundedValue>,
    pub ball: Ball,
    /// Stream coefficients of `ℙ_C g`; `g` constant in time.
    pub forcing: Vec<BoundedValue>,
    /// `‖g − ℙ_C g‖₂` bound.
    pub forcing_tail: f64,
}

fn pair_tail(p: &PairField, s: &Rational) -> Result<f64> {
    let t1 = p.u1().tail_for(s).map_err(|_| Error::InsufficientSmoothness(format!("no H^{s} tail on the first component")))?;
    let t2 = p.u2().tail_for(s).map_err(|_| Error::InsufficientSmoothness(format!("no H^{s} tail on the second component")))?;
    Ok(hypot_up(t1, t2))
}

impl Datum {
    /// `a` and `g` are enclosures of solenoidal data (general remainders).
    /// The part of `a` beyond the cap needs `H¹` and `H^{6/5}` control.
    pub fn new(modes: &Modes, a: &PairField, g: Option<&PairField>) -> Result<Datum> {
        let ac = if a.cutoff() > modes.cap { a.with_cutoff(modes.cap) } else { a.clone() };
        let psi = modes.stream_coeffs(&ac);
        let ball = if ac.is_band_limited() {
            Ball::default()
        } else {
            let pi = BoundedValue::pi();
            Ball {
                e0: pair_tail(&ac, &Rational::zero())?,
                e1: (pi * bv(pair_tail(&ac, &Rational::one())?)).hi(),
                e3: (pi.pow_rational(&Rational::new(6, 5)).expect("positive") * bv(pair_tail(&ac, &Rational::new(6, 5))?)).hi(),
            }
        };
        let (forcing, forcing_tail) = match g {
            None => (vec![BoundedValue::ZERO; modes.len()], 0.0),
            Some(g) => {
                let gc = if g.cutoff() > modes.cap { g.with_cutoff(modes.cap) } else { g.clone() };
                // the gradient part of the head is dropped by the stream map
                (modes.stream_coeffs(&gc), hypot_up(gc.u1().tail_l2, gc.u2().tail_l2))
            }
        };
        Ok(Datum { psi, ball, forcing, forcing_tail })
    }
}

/// One truncated iterate on all panels of the window.
#[derive(Clone, Debug)]
pub struct Iterate {
    /// `panels[j][i]`: Taylor model of `ψ_i` on panel `j`.
    pub panels: Vec<Vec<Tm>>,
    /// `ends[j][i]`: enclosure of `ψ_i(j h)`, `j = 0..=J`.
    pub ends: Vec<Vec<BoundedValue>>,
    pub ball: Ball,
    pub sup: Sup,
}

/// Truncated difference `ũ_{m+1} − ũ_m`; no ball, the iterates carry theirs.
#[derive(Clone, Debug)]
pub struct Difference {
    pub panels: Vec<Vec<Tm>>,
    pub ends: Vec<Vec<BoundedValue>>,
}

fn l2_of(psi: &[BoundedValue]) -> BoundedValue {
    BoundedValue::sum(psi.iter().map(|v| v.sqr())).sqrt().expect("nonnegative")
}

impl Difference {
    pub fn l2_at(&self, j: usize) -> BoundedValue {
        l2_of(&self.ends[j])
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub window: f64,
    pub panels: usize,
    pub iterates: Vec<Iterate>,
    pub differences: Vec<Difference>,
}

impl Run {
    pub fn h(&self) -> f64 {
        self.window / self.panels as f64
    }
}

/// Duhamel factors `sup_{t ≤ T} ∫₀^t ‖A^β e^{−(t−s)A}‖ ds = C_β T^{1−β}/(1−β)` for `β = 0, 1/2, 3/5`.
fn duhamel_factors(window: f64) -> [f64; 3] {
    let t = BoundedValue::point(window);
    let e = BoundedValue::ONE.exp();
    let half = (BoundedValue::point(2.0) * t / e).sqrt().expect("positive");
    let c35 = (BoundedValue::from_rational(&Rational::new(3, 5)) / e).pow_rational(&Rational::new(3, 5)).expect("positive");
    let f3 = c35 * t.pow_rational(&Rational::new(2, 5)).expect("positive") * BoundedValue::point(2.5);
    [t.hi(), half.hi(), f3.hi()]
}

pub struct Engine {
    pub table: Bilinear,
    pub cfg: EngineConfig,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Engine {
        Engine { table: Bilinear::new(cfg.cap), cfg }
    }

    pub fn modes(&self) -> &Modes {
        &self.table.modes
    }

    fn sup_of(&self, panels: &[Vec<Tm>], h: f64) -> (f64, f64) {
        let md = self.modes();
        let pi = BoundedValue::pi();
        let two = BoundedValue::point(2.0);
        let (mut su, mut sg) = (0.0f64, 0.0f64);
        for panel in panels {
            let mut u = [BoundedValue::ZERO; 2];
            let mut g = [BoundedValue::ZERO; 4];
            for (i, t) in panel.iter().enumerate() {
                if t.is_zero() {
                    continue;
                }
                let a = two * bv(t.mag(h));
                let (n, m) = md.nm[i];
                let (a1, a2) = (bv(md.alpha1[i].mag()), bv(md.alpha2[i].mag()));
                let (fn_, fm) = (BoundedValue::from_i64(n) * pi, BoundedValue::from_i64(m) * pi);
                u[0] = u[0] + a * a1;
                u[1] = u[1] + a * a2;
                g[0] = g[0] + a * a1 * fn_;
                g[1] = g[1] + a * a1 * fm;
                g[2] = g[2] + a * a2 * fn_;
                g[3] = g[3] + a * a2 * fm;
            }
            su = su.max(u[0].hi()).max(u[1].hi());
            let gg = BoundedValue::sum(g.iter().map(|v| v.sqr())).sqrt().expect("nonnegative");
            sg = sg.max(gg.hi());
        }
        (su, sg)
    }

    /// Integrates `ψ' = −μψ − G_j(τ)` across all panels from `psi0`.
    fn integrate(&self, psi0: &[BoundedValue], forcing: impl Fn(usize) -> Vec<Tm>, panels: usize, h: f64) -> (Vec<Vec<Tm>>, Vec<Vec<BoundedValue>>) {
        let md = self.modes();
        let mut ends = vec![psi0.to_vec()];
        let mut out = Vec::with_capacity(panels);
        for j in 0..panels {
            let g = forcing(j);
            let mut panel = Vec::with_capacity(md.len());
            let mut end = Vec::with_capacity(md.len());
            for i in 0..md.len() {
                let v0 = ends[j][i];
                if v0 == BoundedValue::ZERO && g[i].is_zero() {
                    panel.push(Tm::zero(self.cfg.degree));
                    end.push(BoundedValue::ZERO);
                    continue;
                }
                let (t, e) = duhamel_panel(md.mu[i], v0, &g[i], h);
                panel.push(t);
                end.push(e);
            }
            out.push(panel);
            ends.push(end);
        }
        (out, ends)
    }

    fn constant_forcing(&self, d: &Datum) -> Vec<Tm> {
        d.forcing.iter().map(|v| Tm::constant(-*v, self.cfg.degree)).collect()
    }

    /// Iterates `0..=m_max` on `[0, window]` with `panels` uniform panels;
    /// differences `ũ_{m+1} − ũ_m` for `m < m_max` when asked.
    pub fn run(&self, d: &Datum, window: f64, panels: usize, m_max: usize, with_differences: bool) -> Result<Run> {
        if !(window > 0.0) || panels == 0 {
            return Err(Error::Precondition(format!("engine needs a positive window and panel count, got {window} and {panels}")));
        }
        let h = window / panels as f64;
        let fac = duhamel_factors(window);
        let z2 = (BoundedValue::point(2.0) * wiener_zeta().sqrt().expect("positive")).hi();
        let root2 = std::f64::consts::SQRT_2 * (1.0 + 1e-15);
        let gconst = self.constant_forcing(d);
        let mut iterates: Vec<Iterate> = Vec::new();
        let mut bvals: Vec<Vec<Tm>> = Vec::new(); // retained ℙ_C B(ũ_m) per panel
        for m in 0..=m_max {
            let (panels_m, ends, ball) = if m == 0 {
                let (p, e) = self.integrate(&d.psi, |_| gconst.clone(), panels, h);
                let ball = Ball {
                    e0: up(d.ball.e0, fac[0] * d.forcing_tail * (1.0 + 1e-15)),
                    e1: up(d.ball.e1, fac[1] * d.forcing_tail * (1.0 + 1e-15)),
                    e3: up(d.ball.e3, fac[2] * d.forcing_tail * (1.0 + 1e-15)),
                };
                (p, e, ball)
            } else {
                let prev = &iterates[m - 1];
                let (p, e) = self.integrate(
                    &d.psi,
                    |j| {
                        let mut g = bvals[j].clone();
                        for (a, c) in g.iter_mut().zip(&gconst) {
                            a.add_assign(c);
                        }
                        g
                    },
                    panels,
                    h,
                );
                let b = prev.ball;
                let s = prev.sup;
                let f = BoundedValue::sum([
                    bv(b.e0) * bv(s.grad),
                    bv(root2) * bv(s.u) * bv(b.e1),
                    bv(root2) * bv(z2) * bv(b.e3) * bv(b.e1),
                    bv(s.dropped),
                    bv(d.forcing_tail),
                ])
                .hi();
                let ball = Ball {
                    e0: up(d.ball.e0, (bv(fac[0]) * bv(f)).hi()),
                    e1: up(d.ball.e1, (bv(fac[1]) * bv(f)).hi()),
                    e3: up(d.ball.e3, (bv(fac[2]) * bv(f)).hi()),
                };
                (p, e, ball)
            };
            if !(ball.e0.is_finite() && ball.e1.is_finite() && ball.e3.is_finite()) {
                return Err(Error::BudgetNotMet(format!("error ball of iterate {m} is not finite")));
            }
            let (su, sg) = self.sup_of(&panels_m, h);
            // B(ũ_m) for the next iterate
            let mut dropped = 0.0f64;
            bvals.clear();
            if m < m_max || with_differences {
                for p in &panels_m {
                    let (kept, dr) = self.table.split(self.table.apply(p, p, h), h);
                    dropped = dropped.max(dr);
                    bvals.push(kept);
                }
            }
            iterates.push(Iterate { panels: panels_m, ends, ball, sup: Sup { u: su, grad: sg, dropped } });
        }
        let mut differences = Vec::new();
        if with_differences && m_max >= 1 {
            let zero = vec![BoundedValue::ZERO; self.modes().len()];
            // δ₀ = −∫ e^{−(t−s)A} ℙ_C B(ũ₀)
            let b0: Vec<Vec<Tm>> =
                iterates[0].panels.iter().map(|p| self.table.split(self.table.apply(p, p, h), h).0).collect();
            let (p, e) = self.integrate(&zero, |j| b0[j].clone(), panels, h);
            differences.push(Difference { panels: p, ends: e });
            for m in 1..m_max {
                let (um, um1, dl) = (&iterates[m], &iterates[m - 1], &differences[m - 1]);
                let g: Vec<Vec<Tm>> = (0..panels)
                    .map(|j| {
                        let mut a = self.table.split(self.table.apply(&dl.panels[j], &um.panels[j], h), h).0;
                        let b = self.table.split(self.table.apply(&um1.panels[j], &dl.panels[j], h), h).0;
                        for (x, y) in a.iter_mut().zip(&b) {
                            x.add_assign(y);
                        }
                        a
                    })
                    .collect();
                let (p, e) = self.integrate(&zero, |j| g[j].clone(), panels, h);
                differences.push(Difference { panels: p, ends: e });
            }
        }
        Ok(Run { window, panels, iterates, differences })
    }

    /// The iterate at panel end `j` as a pair field with its ball as tails.
    pub fn field_at(&self, it: &Iterate, j: usize) -> PairField {
        let f = self.modes().pair_from_stream(&it.ends[j]);
        with_ball(f, it.ball)
    }

    /// `ℙ_C (u·∇)u` for a band-limited solenoidal `u` (cap-limited), stream form
    /// on the full `2C` grid mapped back to a pair field of cutoff `2C`.
    pub fn nonlinearity_head(&self, u: &PairField) -> PairField {
        let md = self.modes();
        let psi: Vec<Tm> = md.stream_coeffs(u).into_iter().map(|v| Tm::constant(v, 0)).collect();
        let full = self.table.apply(&psi, &psi, 0.0);
        let side = self.table.side();
        let mut f = PairField::zeros(side);
        for (idx, t) in full.iter().enumerate() {
            let (rx, ry) = ((idx / side + 1) as i64, (idx % side + 1) as i64);
            let v = t.c[0] + BoundedValue::symmetric(t.r);
            if v == BoundedValue::ZERO {
                continue;
            }
            let r = BoundedValue::from_i64(rx * rx + ry * ry).sqrt().expect("positive");
            f.set(rx, ry, -(BoundedValue::from_i64(ry) / r) * v, BoundedValue::from_i64(rx) / r * v).expect("inside grid");
        }
        f
    }
}

/// `‖f‖_{H^{6/5}} ≤ 2^{3/5}π^{−6/5}‖A^{3/5}f‖₂` for fields without the `(0,0)` mode.
pub fn h65_from_a35(e3: f64) -> f64 {
    (BoundedValue::point(2.0).pow_rational(&Rational::new(3, 5)).expect("positive")
        / BoundedValue::pi().pow_rational(&Rational::new(6, 5)).expect("positive")
        * bv(e3))
    .hi()
}

/// Folds a ball into component tails: `L₂ ≤ E₀`, `H¹ ≤ (√2/π)E₁`,
/// `H^{6/5} ≤ 2^{3/5}π^{−6/5}E₃` (every mode has `n² + m² ≥ 1`).
pub fn with_ball(f: PairField, b: Ball) -> PairField {
    if b.is_zero() {
        return f;
    }
    let h1 = (BoundedValue::point(2.0).sqrt().expect("positive") / BoundedValue::pi() * bv(b.e1)).hi();
    let h65 = h65_from_a35(b.e3);
    let mut f1 = f.u1().clone();
    let mut f2 = f.u2().clone();
    for c in [&mut f1, &mut f2] {
        c.tail_l2 = up(c.tail_l2, b.e0).max(f64::MIN_POSITIVE);
        c.tail_hs.clear();
        c.tail_hs.insert(Rational::new(1, 2), h1);
        c.tail_hs.insert(Rational::one(), h1);
        c.tail_hs.insert(Rational::new(6, 5), h65);
    }
    PairField::new(f1, f2).expect("pair bases")
}
