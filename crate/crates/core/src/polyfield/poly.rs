use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::approxcore::{BoundedValue, Jet, Rational};

/// Bivariate polynomial `Σ a_{ij} x^i y^j`, `0 ≤ i, j ≤ N`, with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct RationalPoly2 {
    n: usize,
    a: Vec<Rational>,
}

impl RationalPoly2 {
    pub fn zero() -> RationalPoly2 {
        RationalPoly2 { n: 0, a: vec![Rational::zero()] }
    }

    /// Builds from a square `(N+1)×(N+1)` grid and tightens the degree.
    pub fn from_grid(grid: Vec<Vec<Rational>>) -> RationalPoly2 {
        let n1 = grid.len().max(grid.iter().map(|r| r.len()).max().unwrap_or(0)).max(1);
        let mut a = vec![Rational::zero(); n1 * n1];
        for (i, row) in grid.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                a[i * n1 + j] = v;
            }
        }
        let mut p = RationalPoly2 { n: n1 - 1, a };
        p.tighten();
        p
    }

    /// Coefficients listed as `(i, j, a_ij)`.
    pub fn from_terms(terms: &[(usize, usize, Rational)]) -> RationalPoly2 {
        let n = terms.iter().map(|t| t.0.max(t.1)).max().unwrap_or(0);
        let mut grid = vec![vec![Rational::zero(); n + 1]; n + 1];
        for (i, j, v) in terms {
            grid[*i][*j] = &grid[*i][*j] + v;
        }
        RationalPoly2::from_grid(grid)
    }

    /// Padded to degree at least `n`.
    pub fn padded_grid(&self, n: usize) -> Vec<Vec<Rational>> {
        let m = n.max(self.n);
        (0..=m).map(|i| (0..=m).map(|j| self.coeff(i, j)).collect()).collect()
    }

    fn tighten(&mut self) {
        while self.n > 0 {
            let n = self.n;
            let edge_zero = (0..=n).all(|k| self.a[n * (n + 1) + k].is_zero() && self.a[k * (n + 1) + n].is_zero());
            if !edge_zero {
                break;
            }
            let mut b = vec![Rational::zero(); n * n];
            for i in 0..n {
                for j in 0..n {
                    b[i * n + j] = self.a[i * (n + 1) + j].clone();
                }
            }
            self.a = b;
            self.n = n - 1;
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|v| v.is_zero())
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        if i > self.n || j > self.n {
            Rational::zero()
        } else {
            self.a[i * (self.n + 1) + j].clone()
        }
    }

    pub fn coeff_ref(&self, i: usize, j: usize) -> &Rational {
        &self.a[i * (self.n + 1) + j]
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        let n1 = self.n + 1;
        self.a.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(k, v)| (k / n1, k % n1, v))
    }

    fn map_terms(&self, f: impl Fn(usize, usize, &Rational) -> Option<(usize, usize, Rational)>) -> RationalPoly2 {
        let t: Vec<_> = self.terms().filter_map(|(i, j, v)| f(i, j, v)).collect();
        RationalPoly2::from_terms(&t)
    }

    pub fn add(&self, o: &RationalPoly2) -> RationalPoly2 {
        let n = self.n.max(o.n);
        let grid = (0..=n).map(|i| (0..=n).map(|j| self.coeff(i, j) + o.coeff(i, j)).collect()).collect();
        RationalPoly2::from_grid(grid)
    }

    pub fn sub(&self, o: &RationalPoly2) -> RationalPoly2 {
        self.add(&o.scale(&Rational::from_int(-1)))
    }

    pub fn scale(&self, k: &Rational) -> RationalPoly2 {
        self.map_terms(|i, j, v| Some((i, j, v * k)))
    }

    pub fn mul(&self, o: &RationalPoly2) -> RationalPoly2 {
        let mut t = Vec::new();
        for (i, j, v) in self.terms() {
            for (k, l, w) in o.terms() {
                t.push((i + k, j + l, v * w));
            }
        }
        RationalPoly2::from_terms(&t)
    }

    pub fn dx(&self) -> RationalPoly2 {
        self.map_terms(|i, j, v| (i > 0).then(|| (i - 1, j, v * Rational::from_int(i as i64))))
    }

    pub fn dy(&self) -> RationalPoly2 {
        self.map_terms(|i, j, v| (j > 0).then(|| (i, j - 1, v * Rational::from_int(j as i64))))
    }

    /// `∫₀^x p(σ, y) dσ`.
    pub fn antideriv_x(&self) -> RationalPoly2 {
        self.map_terms(|i, j, v| Some((i + 1, j, v / Rational::from_int(i as i64 + 1))))
    }

    /// `∫₀^y p(x, τ) dτ`.
    pub fn antideriv_y(&self) -> RationalPoly2 {
        self.map_terms(|i, j, v| Some((i, j + 1, v / Rational::from_int(j as i64 + 1))))
    }

    /// `p(x/s, y/s)`.
    pub fn rescale(&self, s: &Rational) -> RationalPoly2 {
        let inv = s.recip();
        self.map_terms(|i, j, v| Some((i, j, v * inv.powi((i + j) as u32))))
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for i in (0..=self.n).rev() {
            let mut row = Rational::zero();
            for j in (0..=self.n).rev() {
                row = row * y + self.coeff_ref(i, j);
            }
            acc = acc * x + row;
        }
        acc
    }

    /// Polynomial in `y` obtained by fixing `x`.
    pub fn restrict_x(&self, x: &Rational) -> Vec<Rational> {
        (0..=self.n)
            .map(|j| {
                let mut acc = Rational::zero();
                for i in (0..=self.n).rev() {
                    acc = acc * x + self.coeff_ref(i, j);
                }
                acc
            })
            .collect()
    }

    /// Polynomial in `x` obtained by fixing `y`.
    pub fn restrict_y(&self, y: &Rational) -> Vec<Rational> {
        (0..=self.n)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in (0..=self.n).rev() {
                    acc = acc * y + self.coeff_ref(i, j);
                }
                acc
            })
            .collect()
    }

    pub fn to_bounded(&self) -> BoundedPoly2 {
        BoundedPoly2 { n: self.n, a: self.a.iter().map(BoundedValue::from_rational).collect() }
    }

    /// `Σ |a_ij|`, a bound on `sup |p|` over `[−1, 1]²`.
    pub fn abs_sum(&self) -> Rational {
        self.a.iter().fold(Rational::zero(), |acc, v| acc + v.abs())
    }

    /// `∫_{[−1,1]²} p q` exactly.
    pub fn inner_square(&self, o: &RationalPoly2) -> Rational {
        let mom = |k: usize| if k % 2 == 1 { Rational::zero() } else { Rational::new(2, k as i64 + 1) };
        let mut acc = Rational::zero();
        for (i, j, v) in self.terms() {
            for (k, l, w) in o.terms() {
                if (i + k) % 2 == 0 && (j + l) % 2 == 0 {
                    acc = acc + v * w * mom(i + k) * mom(j + l);
                }
            }
        }
        acc
    }
}

/// Interval-coefficient copy of a polynomial, for fast enclosure evaluation.
#[derive(Clone, Debug)]
pub struct BoundedPoly2 {
    n: usize,
    a: Vec<BoundedValue>,
}

impl BoundedPoly2 {
    pub fn eval(&self, x: BoundedValue, y: BoundedValue) -> BoundedValue {
        let n1 = self.n + 1;
        let mut acc = BoundedValue::ZERO;
        for i in (0..n1).rev() {
            let mut row = BoundedValue::ZERO;
            for j in (0..n1).rev() {
                row = row * y + self.a[i * n1 + j];
            }
            acc = acc * x + row;
        }
        acc
    }

    pub fn eval_jet(&self, x: &Jet, y: &Jet) -> Jet {
        let n1 = self.n + 1;
        let mut acc = x.constant_like(BoundedValue::ZERO);
        for i in (0..n1).rev() {
            let mut row = y.constant_like(BoundedValue::ZERO);
            for j in (0..n1).rev() {
                row = (&row * y).add_const(self.a[i * n1 + j]);
            }
            acc = &(&acc * x) + &row;
        }
        acc
    }
}

/// A pair of polynomials, the components of a planar vector field on `(−1, 1)²`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct PolyPair {
    pub p1: RationalPoly2,
    pub p2: RationalPoly2,
}

impl PolyPair {
    pub fn new(p1: RationalPoly2, p2: RationalPoly2) -> PolyPair {
        PolyPair { p1, p2 }
    }

    pub fn zero() -> PolyPair {
        PolyPair { p1: RationalPoly2::zero(), p2: RationalPoly2::zero() }
    }

    pub fn degree(&self) -> usize {
        self.p1.degree().max(self.p2.degree())
    }

    pub fn component(&self, i: usize) -> &RationalPoly2 {
        if i == 0 {
            &self.p1
        } else {
            &self.p2
        }
    }

    pub fn divergence(&self) -> RationalPoly2 {
        self.p1.dx().add(&self.p2.dy())
    }

    pub fn add(&self, o: &PolyPair) -> PolyPair {
        PolyPair { p1: self.p1.add(&o.p1), p2: self.p2.add(&o.p2) }
    }

    pub fn scale(&self, k: &Rational) -> PolyPair {
        PolyPair { p1: self.p1.scale(k), p2: self.p2.scale(k) }
    }

    pub fn is_zero(&self) -> bool {
        self.p1.is_zero() && self.p2.is_zero()
    }

    /// Coefficient vector `(a¹, a²)` in the unknown ordering of the constraint matrix.
    pub fn to_vector(&self, n: usize) -> Vec<Rational> {
        let mut v = Vec::with_capacity(2 * (n + 1) * (n + 1));
        for p in [&self.p1, &self.p2] {
            for i in 0..=n {
                for j in 0..=n {
                    v.push(p.coeff(i, j));
                }
            }
        }
        v
    }

    pub fn from_vector(n: usize, v: &[Rational]) -> PolyPair {
        let n1 = n + 1;
        assert_eq!(v.len(), 2 * n1 * n1);
        let grid = |off: usize| (0..n1).map(|i| (0..n1).map(|j| v[off + i * n1 + j].clone()).collect()).collect();
        PolyPair { p1: RationalPoly2::from_grid(grid(0)), p2: RationalPoly2::from_grid(grid(n1 * n1)) }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct PolyPairJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub a1: Vec<Vec<Rational>>,
    pub a2: Vec<Vec<Rational>>,
}

impl PolyPairJson {
    pub fn from_pair(p: &PolyPair) -> PolyPairJson {
        let n = p.degree();
        PolyPairJson { n, a1: p.p1.padded_grid(n), a2: p.p2.padded_grid(n) }
    }

    pub fn into_pair(self) -> Result<PolyPair, String> {
        let ok = |g: &Vec<Vec<Rational>>| g.len() == self.n + 1 && g.iter().all(|r| r.len() == self.n + 1);
        if !ok(&self.a1) || !ok(&self.a2) {
            return Err(format!("coefficient grids must be {0}x{0}", self.n + 1));
        }
        Ok(PolyPair { p1: RationalPoly2::from_grid(self.a1), p2: RationalPoly2::from_grid(self.a2) })
    }
}

impl Serialize for PolyPair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyPairJson::from_pair(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PolyPairJson::deserialize(d)?.into_pair().map_err(de::Error::custom)
    }
}
