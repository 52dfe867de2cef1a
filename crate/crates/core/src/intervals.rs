//! Finite unions of closed real intervals with deterministic set algebra.
//!
//! Intervals are kept sorted and disjoint; neighbours closer than the merge
//! gap 1e−12 are fused so that repeated unions stay canonical. Degenerate
//! (single-point) intervals are allowed — piecewise-constant symbols have
//! essential range of measure zero.

const MERGE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    ivs: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { ivs: Vec::new() }
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        IntervalSet { ivs: vec![(lo, hi)] }
    }

    pub fn from_intervals(mut ivs: Vec<(f64, f64)>) -> Self {
        ivs.retain(|(a, b)| a <= b);
        ivs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(ivs.len());
        for (a, b) in ivs {
            match out.last_mut() {
                Some((_, phi)) if a <= *phi + MERGE_GAP => {
                    if b > *phi {
                        *phi = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        IntervalSet { ivs: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.ivs.first().map(|iv| iv.0)
    }

    pub fn max(&self) -> Option<f64> {
        self.ivs.last().map(|iv| iv.1)
    }

    pub fn measure(&self) -> f64 {
        self.ivs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.ivs.iter().any(|(a, b)| x >= a - tol && x <= b + tol)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut ivs = self.ivs.clone();
        ivs.extend_from_slice(&other.ivs);
        IntervalSet::from_intervals(ivs)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.ivs {
            for &(c, d) in &other.ivs {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    out.push((lo, hi));
                }
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// Set difference self ∖ other (closure of the open difference, so shared
    /// endpoints survive as interval boundaries).
    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.ivs {
            let mut lo = a;
            let mut alive = true;
            for &(c, d) in &other.ivs {
                if d < lo || c > b {
                    continue;
                }
                if c > lo {
                    out.push((lo, c));
                }
                if d >= b {
                    alive = false;
                    break;
                }
                lo = d;
            }
            if alive && lo <= b {
                out.push((lo, b));
            }
        }
        // Degenerate slivers below the merge gap are noise from shared endpoints.
        out.retain(|(a, b)| b - a > MERGE_GAP || a == b);
        IntervalSet::from_intervals(out)
    }

    /// Components with length above the threshold.
    pub fn positive_components(&self, min_len: f64) -> Vec<(f64, f64)> {
        self.ivs.iter().copied().filter(|(a, b)| b - a > min_len).collect()
    }
}
