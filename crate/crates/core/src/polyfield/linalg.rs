//! Exact linear algebra for the solenoidal constraint system.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::approxcore::Rational;

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn push_row(&mut self, entries: &[(usize, i64)]) {
        let mut row = vec![0; self.cols];
        for &(c, v) in entries {
            row[c] += v;
        }
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|&v| Rational::from_int(v)).collect()).collect()
    }

    /// Exact product with a rational vector.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| **a != 0)
                    .fold(Rational::zero(), |acc, (&a, x)| acc + Rational::from_int(a) * x)
            })
            .collect()
    }
}

/// Index of `a^c_{i,j}` (component `c ∈ {0, 1}`) among the `2(N+1)²` unknowns.
pub fn unknown_index(n: usize, c: usize, i: usize, j: usize) -> usize {
    c * (n + 1) * (n + 1) + i * (n + 1) + j
}

/// Rows of the divergence equations for the interior coefficients, the two
/// edge families of the divergence, then the boundary conditions on `x = ±1`
/// and on `y = ±1` for both components.
pub fn constraint_matrix(n: usize) -> IntMatrix {
    let cols = 2 * (n + 1) * (n + 1);
    let mut m = IntMatrix::zeros(0, cols);
    let u = |c, i, j| unknown_index(n, c, i, j);
    for i in 0..n {
        for j in 0..n {
            m.push_row(&[(u(0, i + 1, j), (i + 1) as i64), (u(1, i, j + 1), (j + 1) as i64)]);
        }
    }
    for i in 0..n {
        m.push_row(&[(u(0, i + 1, n), (i + 1) as i64)]);
    }
    for j in 0..n {
        m.push_row(&[(u(1, n, j + 1), (j + 1) as i64)]);
    }
    // p_c(±1, y) ≡ 0: for every power of y, Σ_i a_{ij} = 0 and Σ_i (−1)^i a_{ij} = 0.
    for c in 0..2 {
        for j in 0..=n {
            let plus: Vec<_> = (0..=n).map(|i| (u(c, i, j), 1)).collect();
            let minus: Vec<_> = (0..=n).map(|i| (u(c, i, j), if i % 2 == 0 { 1 } else { -1 })).collect();
            m.push_row(&plus);
            m.push_row(&minus);
        }
    }
    // p_c(x, ±1) ≡ 0.
    for c in 0..2 {
        for i in 0..=n {
            let plus: Vec<_> = (0..=n).map(|j| (u(c, i, j), 1)).collect();
            let minus: Vec<_> = (0..=n).map(|j| (u(c, i, j), if j % 2 == 0 { 1 } else { -1 })).collect();
            m.push_row(&plus);
            m.push_row(&minus);
        }
    }
    m
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for k in c..cols {
            a[r][k] = &a[r][k] * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for k in c..cols {
                    if !pivot_row[k].is_zero() {
                        row[k] = &row[k] - &f * &pivot_row[k];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &[Vec<Rational>]) -> usize {
    let mut m = a.to_vec();
    rref(&mut m).len()
}

/// Scales a rational vector to a primitive integer vector whose first nonzero entry is positive.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let lead_neg = ints.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
    if lead_neg {
        g = -g;
    }
    ints.into_iter().map(|x| Rational::new(x / &g, BigInt::one())).collect()
}

/// Exact basis of the nullspace, one primitive integer vector per free column.
pub fn kernel_basis(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![None; cols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&c| is_pivot[c].is_none()) {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -&m[r][f];
        }
        basis.push(primitive(&v));
    }
    basis
}

pub fn kernel_basis_int(a: &IntMatrix) -> Vec<Vec<Rational>> {
    kernel_basis(&a.to_rational(), a.cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        assert!(kernel_basis_int(&IntMatrix::identity(4)).is_empty());
        let z = IntMatrix::zeros(2, 3);
        let b = kernel_basis_int(&z);
        assert_eq!(b.len(), 3);
        for (k, v) in b.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == k { Rational::one() } else { Rational::zero() });
            }
        }
    }

    #[test]
    fn divergence_rows_have_two_entries() {
        for n in 1..5 {
            let m = constraint_matrix(n);
            for r in 0..n * n {
                let nz: Vec<i64> = m.row(r).iter().copied().filter(|&v| v != 0).collect();
                assert_eq!(nz.len(), 2);
                let (i, j) = (r / n, r % n);
                assert_eq!(nz[0], (i + 1) as i64);
                assert_eq!(nz[1], (j + 1) as i64);
            }
        }
    }

    #[test]
    fn low_degrees_have_trivial_kernel() {
        for n in 0..4 {
            assert!(kernel_basis_int(&constraint_matrix(n)).is_empty(), "N = {n}");
        }
        assert_eq!(kernel_basis_int(&constraint_matrix(4)).len(), 1);
    }
}
