//! Moments `∫_{−1}^{1} ξ^i cos(θξ) dξ` and `∫_{−1}^{1} ξ^i sin(θξ) dξ`.

use crate::approxcore::BoundedValue;

/// `(C, S)` for `i = 0..=imax`; `C_i` vanishes for odd `i`, `S_i` for even `i`.
pub fn trig_moments(theta: BoundedValue, imax: usize) -> (Vec<BoundedValue>, Vec<BoundedValue>) {
    if theta == BoundedValue::ZERO {
        let c = (0..=imax)
            .map(|i| if i % 2 == 0 { BoundedValue::point(2.0) / BoundedValue::from_i64(i as i64 + 1) } else { BoundedValue::ZERO })
            .collect();
        return (c, vec![BoundedValue::ZERO; imax + 1]);
    }
    if theta.mig() > imax as f64 + 1.0 {
        recurrence(theta, imax)
    } else {
        series(theta, imax)
    }
}

/// Upward recurrence; each step multiplies earlier errors by `i/θ < 1`.
fn recurrence(theta: BoundedValue, imax: usize) -> (Vec<BoundedValue>, Vec<BoundedValue>) {
    let two = BoundedValue::point(2.0);
    let (s, c) = (theta.sin(), theta.cos());
    let mut cm = vec![BoundedValue::ZERO; imax + 1];
    let mut sm = vec![BoundedValue::ZERO; imax + 1];
    cm[0] = two * s / theta;
    for i in 1..=imax {
        let k = BoundedValue::from_i64(i as i64) / theta;
        if i % 2 == 1 {
            sm[i] = -(two * c / theta) + k * cm[i - 1];
        } else {
            cm[i] = two * s / theta - k * sm[i - 1];
        }
    }
    (cm, sm)
}

/// Power series in `θ` with an explicit geometric tail bound.
fn series(theta: BoundedValue, imax: usize) -> (Vec<BoundedValue>, Vec<BoundedValue>) {
    let mag = theta.mag();
    let two = BoundedValue::point(2.0);
    // term_k = θ^k / k!, alternating signs folded in below
    let mut terms = vec![BoundedValue::ONE];
    let mut k = 0usize;
    loop {
        k += 1;
        let next = terms[k - 1] * theta / BoundedValue::from_i64(k as i64);
        terms.push(next);
        let ratio_ok = ((k + 1) * (k + 2)) as f64 >= 2.0 * mag * mag;
        if ratio_ok && k % 2 == 0 && next.mag() < 1e-18 {
            break;
        }
    }
    let kt = k; // even; terms beyond kt bounded geometrically with ratio ≤ 1/2
    let tail_mag = 2.0 * terms[kt].mag() * 2.0 * 1.000001;
    let mut cm = vec![BoundedValue::ZERO; imax + 1];
    let mut sm = vec![BoundedValue::ZERO; imax + 1];
    for i in 0..=imax {
        let mut acc = BoundedValue::ZERO;
        if i % 2 == 0 {
            let mut j = 0;
            while j < kt {
                let sign = if (j / 2) % 2 == 0 { BoundedValue::ONE } else { -BoundedValue::ONE };
                acc = acc + sign * terms[j] * two / BoundedValue::from_i64((i + j + 1) as i64);
                j += 2;
            }
            cm[i] = acc.inflate(tail_mag);
        } else {
            let mut j = 1;
            while j < kt {
                let sign = if (j / 2) % 2 == 0 { BoundedValue::ONE } else { -BoundedValue::ONE };
                acc = acc + sign * terms[j] * two / BoundedValue::from_i64((i + j + 1) as i64);
                j += 2;
            }
            sm[i] = acc.inflate(tail_mag);
        }
    }
    (cm, sm)
}
