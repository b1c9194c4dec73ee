//! Exact differentiation and multiplication of spectral heads.

use super::basis::{sqrt2, Axis, Basis};
use super::field::FourierField;
use crate::approxcore::{BoundedValue, Rational};
use crate::error::{Error, Result};

/// Axis of the product of two 1D factors.
pub fn product_axis(a: Axis, b: Axis) -> Axis {
    if a == b {
        Axis::Cos
    } else {
        Axis::Sin
    }
}

/// Whether the normalized factor of index `n` on `axis` carries `√2`.
fn has_root2(axis: Axis, n: usize) -> bool {
    !(axis == Axis::Cos && n == 0)
}

/// `½ · 2^{e/2}`.
pub fn half_root2_power(e: i32) -> BoundedValue {
    let r2 = sqrt2();
    let half = BoundedValue::point(0.5);
    match e {
        -1 => half / r2,
        0 => half,
        1 => half * r2,
        2 => BoundedValue::ONE,
        _ => unreachable!("exponent out of range"),
    }
}

/// `φ^a_n φ^b_k = Σ w φ^c_p` for normalized 1D factors, `c = product_axis(a, b)`.
/// At most two terms; a zero-index sine never appears.
pub fn product_1d(a: Axis, n: usize, b: Axis, k: usize) -> Vec<(usize, BoundedValue)> {
    if !a.admits(n) || !b.admits(k) {
        return Vec::new();
    }
    let c = product_axis(a, b);
    let lo = n.abs_diff(k);
    let hi = n + k;
    // raw products: s s = ½(c_d − c_s); c c = ½(c_d + c_s); s_n c_k = ½(s_s + sgn(n−k) s_d)
    let (sd, ss) = match (a, b) {
        (Axis::Sin, Axis::Sin) => (1.0, -1.0),
        (Axis::Cos, Axis::Cos) => (1.0, 1.0),
        (Axis::Sin, Axis::Cos) => ((n as f64 - k as f64).signum(), 1.0),
        (Axis::Cos, Axis::Sin) => ((k as f64 - n as f64).signum(), 1.0),
    };
    let base = has_root2(a, n) as i32 + has_root2(b, k) as i32;
    let mut out = Vec::with_capacity(2);
    for (p, sign) in [(lo, sd), (hi, ss)] {
        if sign == 0.0 || !c.admits(p) {
            continue;
        }
        let w = half_root2_power(base - has_root2(c, p) as i32) * BoundedValue::point(sign);
        match out.iter_mut().find(|(q, _): &&mut (usize, BoundedValue)| *q == p) {
            Some((_, v)) => *v = *v + w,
            None => out.push((p, w)),
        }
    }
    out
}

/// Basis of the product of fields in bases `a` and `b`.
pub fn product_basis(a: Basis, b: Basis) -> Result<Basis> {
    match (a, b) {
        (Basis::Trig(a1, a2), Basis::Trig(b1, b2)) => Ok(Basis::Trig(product_axis(a1, b1), product_axis(a2, b2))),
        (Basis::Exp, Basis::Exp) => Ok(Basis::Exp),
        _ => Err(Error::Precondition(format!("cannot multiply {} by {}", a.name(), b.name()))),
    }
}

/// Exact product of two heads (tails must be absent), cutoff `c_f + c_g`.
pub fn multiply_heads(f: &FourierField, g: &FourierField) -> Result<FourierField> {
    if !f.is_band_limited() || !g.is_band_limited() {
        return Err(Error::Precondition("multiply_heads needs band-limited factors".into()));
    }
    let basis = product_basis(f.basis(), g.basis())?;
    let cutoff = f.cutoff() + g.cutoff();
    let mut out = FourierField::zeros(basis, cutoff);
    let nz = |h: &FourierField| -> Vec<(i64, i64, BoundedValue, BoundedValue)> {
        h.modes()
            .filter_map(|(n, m)| {
                let (r, i) = h.coeff(n, m);
                (r != BoundedValue::ZERO || i != BoundedValue::ZERO).then_some((n, m, r, i))
            })
            .collect()
    };
    let (fa, ga) = (nz(f), nz(g));
    let side = basis.side(cutoff);
    let mut re = vec![BoundedValue::ZERO; side * side];
    let mut im = vec![BoundedValue::ZERO; side * side];
    let pos = |n: i64, m: i64| basis.position(cutoff, n).unwrap() * side + basis.position(cutoff, m).unwrap();
    match (f.basis(), g.basis()) {
        (Basis::Trig(a1, a2), Basis::Trig(b1, b2)) => {
            for &(n, m, fr, _) in &fa {
                for &(k, l, gr, _) in &ga {
                    let v = fr * gr;
                    for (p, wx) in product_1d(a1, n as usize, b1, k as usize) {
                        for (q, wy) in product_1d(a2, m as usize, b2, l as usize) {
                            let i = pos(p as i64, q as i64);
                            re[i] = re[i] + v * wx * wy;
                        }
                    }
                }
            }
        }
        _ => {
            for &(n, m, fr, fi) in &fa {
                for &(k, l, gr, gi) in &ga {
                    let i = pos(n + k, m + l);
                    re[i] = re[i] + (fr * gr - fi * gi);
                    im[i] = im[i] + (fr * gi + fi * gr);
                }
            }
        }
    }
    for (p, (n, m)) in out.clone().modes().enumerate() {
        out.set(n, m, re[p], if basis.is_exp() { im[p] } else { BoundedValue::ZERO })?;
    }
    Ok(out)
}

/// `∂/∂x` (`axis = 0`) or `∂/∂y` (`axis = 1`) on the canonical square.
///
/// The head is differentiated exactly; the tail of exponent `s` maps to the
/// tail of exponent `s − 1` scaled by the frequency scale.
pub fn derivative(f: &FourierField, axis: usize) -> Result<FourierField> {
    if axis > 1 {
        return Err(Error::Precondition(format!("axis must be 0 or 1, got {axis}")));
    }
    let basis = f.basis();
    let fs = basis.freq_scale();
    let out_basis = match basis {
        Basis::Trig(a, b) if axis == 0 => Basis::Trig(a.flip(), b),
        Basis::Trig(a, b) => Basis::Trig(a, b.flip()),
        Basis::Exp => Basis::Exp,
    };
    let mut out = FourierField::zeros(out_basis, f.cutoff());
    for (n, m) in f.modes().collect::<Vec<_>>() {
        let (r, i) = f.coeff(n, m);
        let k = if axis == 0 { n } else { m };
        let w = fs * BoundedValue::from_i64(k);
        match basis {
            Basis::Trig(a, b) => {
                let ax = if axis == 0 { a } else { b };
                if k == 0 || !basis.admits(n, m) {
                    continue;
                }
                let sign = if ax == Axis::Sin { BoundedValue::ONE } else { -BoundedValue::ONE };
                out.set(n, m, r * w * sign, BoundedValue::ZERO)?;
            }
            Basis::Exp => out.set(n, m, -(i * w), r * w)?,
        }
    }
    if !f.is_band_limited() {
        let one = Rational::one();
        out.tail_l2 = (fs * BoundedValue::point(f.tail_for(&one)?)).hi();
        for (s, t) in &f.tail_hs {
            if *s > one {
                out.tail_hs.insert(s - &one, (fs * BoundedValue::point(*t)).hi());
            }
        }
    }
    Ok(out)
}
