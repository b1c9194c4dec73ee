use serde::{Deserialize, Serialize};

use super::bounded::BoundedValue;

/// One consumer of an error budget and the certified amount it used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetLine {
    pub consumer: String,
    /// Budget granted, as the exponent `e` in `2^e`.
    pub allotted_log2: i32,
    /// Certified upper bound on the error actually incurred.
    pub bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub lines: Vec<BudgetLine>,
}

impl Ledger {
    pub fn new() -> Ledger {
        Ledger { lines: Vec::new() }
    }

    pub fn push(&mut self, consumer: impl Into<String>, allotted_log2: i32, bound: f64) {
        assert!(bound >= 0.0 || bound.is_nan(), "negative budget line");
        self.lines.push(BudgetLine { consumer: consumer.into(), allotted_log2, bound });
    }

    pub fn extend(&mut self, prefix: &str, other: &Ledger) {
        for l in &other.lines {
            self.lines.push(BudgetLine {
                consumer: format!("{prefix}/{}", l.consumer),
                allotted_log2: l.allotted_log2,
                bound: l.bound,
            });
        }
    }

    /// Upward-rounded sum of all bounds.
    pub fn total(&self) -> f64 {
        BoundedValue::sum(self.lines.iter().map(|l| BoundedValue::point(l.bound))).hi()
    }

    /// Every line within its allotment and the total within `2^target_log2`.
    pub fn closes(&self, target_log2: i32) -> bool {
        self.lines.iter().all(|l| l.bound <= 2f64.powi(l.allotted_log2)) && self.total() <= 2f64.powi(target_log2)
    }
}

/// A value together with the ledger certifying its error.
#[derive(Clone, Debug)]
pub struct Certified<T> {
    pub value: T,
    pub ledger: Ledger,
}

impl<T> Certified<T> {
    pub fn new(value: T, ledger: Ledger) -> Certified<T> {
        Certified { value, ledger }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_check() {
        let mut l = Ledger::new();
        l.push("a", -3, 0.1);
        l.push("b", -3, 0.1);
        assert!(l.closes(-2));
        assert!(!l.closes(-3));
        l.push("c", -5, 0.1);
        assert!(!l.closes(0));
    }
}
