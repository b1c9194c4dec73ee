use std::fmt;
use std::sync::Arc;

use super::rational::Rational;

/// Precision-indexed approximation stream: `refine(k)` is within `2^-k` of the
/// represented point.
pub struct Name<T> {
    query: Arc<dyn Fn(u32) -> T + Send + Sync>,
    exact: bool,
}

impl<T> Clone for Name<T> {
    fn clone(&self) -> Self {
        Name { query: Arc::clone(&self.query), exact: self.exact }
    }
}

impl<T> fmt::Debug for Name<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name {{ exact: {} }}", self.exact)
    }
}

impl<T: 'static> Name<T> {
    pub fn new(query: impl Fn(u32) -> T + Send + Sync + 'static) -> Name<T> {
        Name { query: Arc::new(query), exact: false }
    }

    /// Name of a dense-set element: every query returns the element itself.
    pub fn exact(value: T) -> Name<T>
    where
        T: Clone + Send + Sync,
    {
        Name { query: Arc::new(move |_| value.clone()), exact: true }
    }

    pub fn refine(&self, k: u32) -> T {
        (self.query)(k)
    }

    /// Whether all approximants coincide with the represented point.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// The same point, answering query `k` with approximant `k + shift`.
    pub fn finer(&self, shift: u32) -> Name<T> {
        let q = Arc::clone(&self.query);
        Name { query: Arc::new(move |k| q(k + shift)), exact: self.exact }
    }

    pub fn map<U: 'static>(&self, f: impl Fn(T) -> U + Send + Sync + 'static) -> Name<U> {
        let q = Arc::clone(&self.query);
        Name { query: Arc::new(move |k| f(q(k))), exact: self.exact }
    }
}

/// Name of `Σ terms(i)` given a certified tail bound `Σ_{i≥n} |terms(i)| ≤ tail(n)`.
/// Query `k` returns the shortest partial sum whose tail is at most `2^-k`.
pub fn series_name(
    terms: impl Fn(usize) -> Rational + Send + Sync + 'static,
    tail: impl Fn(usize) -> Rational + Send + Sync + 'static,
) -> Name<Rational> {
    Name::new(move |k| {
        let eps = Rational::pow2(-(k as i64));
        let mut n = 0;
        let mut acc = Rational::zero();
        while tail(n) > eps {
            acc = acc + terms(n);
            n += 1;
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_name_is_constant() {
        let n = Name::exact(Rational::new(3, 7));
        assert!(n.is_exact());
        for k in [0, 5, 40] {
            assert_eq!(n.refine(k), Rational::new(3, 7));
        }
    }

    #[test]
    fn geometric_series_name() {
        // Σ 2^-(i+1) = 1, tail after n terms = 2^-n.
        let n = series_name(|i| Rational::pow2(-(i as i64) - 1), |n| Rational::pow2(-(n as i64)));
        for k in 0..20u32 {
            let a = n.refine(k);
            let d = (Rational::one() - &a).abs();
            assert!(d <= Rational::pow2(-(k as i64)));
            let b = n.refine(k + 3);
            assert!((a - b).abs() <= Rational::pow2(-(k as i64)) + Rational::pow2(-(k as i64) - 3));
        }
    }
}
