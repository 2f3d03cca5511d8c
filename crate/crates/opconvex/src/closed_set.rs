//! Closed parameter sets Λ ⊆ [0, ∞]: finite unions of closed intervals and points.

use std::fmt;

use crate::error::{Error, Result};
use crate::param::ExtendedParam;

/// Slack used when deciding membership and inclusion of floating-point endpoints.
const SET_TOL: f64 = 1e-12;

/// A finite union of closed intervals of [0, ∞], normalized to sorted,
/// pairwise-disjoint components. A degenerate interval is a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSet {
    intervals: Vec<(ExtendedParam, ExtendedParam)>,
}

impl ClosedSet {
    pub fn empty() -> Self {
        ClosedSet { intervals: vec![] }
    }

    pub fn point(p: ExtendedParam) -> Self {
        ClosedSet {
            intervals: vec![(p, p)],
        }
    }

    /// The whole parameter space [0, ∞].
    pub fn full() -> Self {
        ClosedSet {
            intervals: vec![(ExtendedParam::Finite(0.0), ExtendedParam::Infinity)],
        }
    }

    pub fn interval(lo: ExtendedParam, hi: ExtendedParam) -> Result<Self> {
        if lo.total_cmp(&hi).is_gt() {
            return Err(Error::InvalidInterval(format!(
                "interval bounds out of order: [{lo}, {hi}]"
            )));
        }
        Ok(ClosedSet {
            intervals: vec![(lo, hi)],
        })
    }

    /// Build from arbitrary closed intervals; normalization merges overlaps.
    pub fn from_intervals(intervals: Vec<(ExtendedParam, ExtendedParam)>) -> Result<Self> {
        for (lo, hi) in &intervals {
            if lo.total_cmp(hi).is_gt() {
                return Err(Error::InvalidInterval(format!(
                    "interval bounds out of order: [{lo}, {hi}]"
                )));
            }
        }
        let mut set = ClosedSet { intervals };
        set.normalize();
        Ok(set)
    }

    fn normalize(&mut self) {
        self.intervals
            .sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(ExtendedParam, ExtendedParam)> = Vec::new();
        for (lo, hi) in self.intervals.drain(..) {
            match merged.last_mut() {
                Some(last) if touches(&last.1, &lo) => {
                    if last.1.total_cmp(&hi).is_lt() {
                        last.1 = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        self.intervals = merged;
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1
            && self.intervals[0].0 == ExtendedParam::Finite(0.0)
            && self.intervals[0].1 == ExtendedParam::Infinity
    }

    pub fn components(&self) -> &[(ExtendedParam, ExtendedParam)] {
        &self.intervals
    }

    pub fn contains(&self, p: &ExtendedParam) -> bool {
        self.intervals
            .iter()
            .any(|(lo, hi)| ge_with_tol(p, lo) && ge_with_tol(hi, p))
    }

    /// Subset test. Components are disjoint after normalization, so a connected
    /// component of `self` is covered iff it fits inside one component of `other`.
    pub fn is_subset_of(&self, other: &ClosedSet) -> bool {
        self.intervals.iter().all(|(lo, hi)| {
            other
                .intervals
                .iter()
                .any(|(olo, ohi)| ge_with_tol(lo, olo) && ge_with_tol(ohi, hi))
        })
    }

    pub fn union(&self, other: &ClosedSet) -> ClosedSet {
        let mut intervals = self.intervals.clone();
        intervals.extend(other.intervals.iter().cloned());
        let mut set = ClosedSet { intervals };
        set.normalize();
        set
    }

    /// Image under λ ↦ 1/λ with 0 ↔ ∞.
    pub fn reciprocal(&self) -> ClosedSet {
        let intervals = self
            .intervals
            .iter()
            .map(|(lo, hi)| (hi.reciprocal(), lo.reciprocal()))
            .collect();
        let mut set = ClosedSet { intervals };
        set.normalize();
        set
    }
}

fn touches(hi: &ExtendedParam, next_lo: &ExtendedParam) -> bool {
    match (hi, next_lo) {
        (ExtendedParam::Infinity, _) => true,
        (ExtendedParam::Finite(_), ExtendedParam::Infinity) => false,
        (ExtendedParam::Finite(a), ExtendedParam::Finite(b)) => *b <= *a + SET_TOL,
    }
}

/// a ≥ b with SET_TOL slack on finite comparisons.
fn ge_with_tol(a: &ExtendedParam, b: &ExtendedParam) -> bool {
    match (a, b) {
        (ExtendedParam::Infinity, _) => true,
        (ExtendedParam::Finite(_), ExtendedParam::Infinity) => false,
        (ExtendedParam::Finite(x), ExtendedParam::Finite(y)) => *x >= *y - SET_TOL,
    }
}

impl fmt::Display for ClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        write!(f, "}}")
    }
}
