//! Preimage arcs, channel counts, spectral multiplicity, and the
//! thin/thick/mixed partition of [γ1, γ2].
//!
//! Sign convention: Δ^(+) is where ω′ < 0 and Δ^(−) where ω′ > 0; the
//! preimage arcs δ^(±) are the intersections with ω^{−1}(Λ). On a δ^(−) arc
//! ω increases from lo to hi, on a δ^(+) arc it decreases from hi to lo.

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::symbol::{JumpClass, PiecewiseSymbol, SpectralSets};
use serde::Serialize;
use std::f64::consts::TAU;

/// Tolerance for tangency detection at level-set solutions.
const TANGENT_TOL: f64 = 1e-10;
/// Components thinner than this are treated as measure-zero artifacts.
const THIN_COMPONENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct AdmissibleInterval {
    pub lo: f64,
    pub hi: f64,
    pub margin: f64,
}

impl AdmissibleInterval {
    pub fn new(lo: f64, hi: f64, margin: f64) -> Self {
        assert!(lo < hi && margin > 0.0);
        AdmissibleInterval { lo, hi, margin }
    }
}

/// True iff [lo − margin, hi + margin] misses the exceptional set and (lo, hi)
/// sits strictly inside (γ1, γ2).
pub fn is_admissible(symbol: &PiecewiseSymbol, lo: f64, hi: f64, margin: f64) -> bool {
    if !(lo < hi) || !(margin > 0.0) {
        return false;
    }
    let sets = symbol.spectral_sets();
    is_admissible_with(&sets, lo, hi, margin)
}

pub fn is_admissible_with(sets: &SpectralSets, lo: f64, hi: f64, margin: f64) -> bool {
    if lo <= sets.gamma1 || hi >= sets.gamma2 {
        return false;
    }
    !sets
        .exceptional
        .iter()
        .any(|&v| v >= lo - margin && v <= hi + margin)
}

/// Arcs are (start, end) pairs in unwrapped angle coordinates with
/// end > start; an arc crossing angle 0 has end > 2π.
#[derive(Debug, Clone, Serialize)]
pub struct PreimageArcs {
    /// δ^(−): ω′ > 0, ω runs lo → hi.
    pub minus_arcs: Vec<(f64, f64)>,
    /// δ^(+): ω′ < 0, ω runs hi → lo.
    pub plus_arcs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MultiplicityReport {
    pub n_plus: usize,
    pub n_minus: usize,
    pub s_plus: usize,
    pub s_minus: usize,
    pub m: usize,
}

/// One maximal monotone stretch: piece index plus unwrapped bounds.
pub(crate) struct Segment {
    pub piece: usize,
    pub x0: f64,
    pub x1: f64,
    pub increasing: bool,
}

pub(crate) fn monotone_segments(symbol: &PiecewiseSymbol) -> Vec<Segment> {
    let mut segs = Vec::new();
    for (pi, p) in symbol.pieces().iter().enumerate() {
        if p.is_constant() {
            continue;
        }
        let mut cuts = vec![p.left];
        cuts.extend(p.interior_critical_points());
        cuts.push(p.right);
        for w in cuts.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if x1 - x0 < 1e-13 {
                continue;
            }
            let mid = 0.5 * (x0 + x1);
            let d = p.eval_deriv(mid);
            if d == 0.0 {
                continue; // flat stretch inside a nominally nonconstant piece
            }
            segs.push(Segment { piece: pi, x0, x1, increasing: d > 0.0 });
        }
    }
    segs
}

/// Solve w(x) = target on [x0, x1] where the piece is strictly monotone and
/// the endpoint values bracket the target: safeguarded bisection plus a
/// Newton polish.
pub(crate) fn solve_level(
    symbol: &PiecewiseSymbol,
    seg: &Segment,
    target: f64,
) -> Result<f64> {
    let p = &symbol.pieces()[seg.piece];
    let (mut a, mut b) = (seg.x0, seg.x1);
    let (mut fa, fb) = (p.eval(a) - target, p.eval(b) - target);
    debug_assert!(fa * fb <= 0.0, "level {target} not bracketed");
    let _ = fb;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = p.eval(mid) - target;
        if fm == 0.0 || b - a < 1e-15 {
            a = mid;
            break;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let d = p.eval_deriv(x);
        if d.abs() < TANGENT_TOL {
            return Err(Error::AdmissibilityViolated(format!(
                "tangency at level {target}: |w'| = {} at x = {x}",
                d.abs()
            )));
        }
        x -= (p.eval(x) - target) / d;
        x = x.clamp(seg.x0, seg.x1);
    }
    if p.eval_deriv(x).abs() < TANGENT_TOL {
        return Err(Error::AdmissibilityViolated(format!(
            "tangency at level {target} near x = {x}"
        )));
    }
    Ok(x)
}

/// δ^(±) = Δ^(±) ∩ ω^{−1}((lo, hi)) as maximal arcs, merged across removable
/// piece boundaries.
pub fn preimage_arcs(symbol: &PiecewiseSymbol, band: &AdmissibleInterval) -> Result<PreimageArcs> {
    let sets = symbol.spectral_sets();
    if !is_admissible_with(&sets, band.lo, band.hi, band.margin) {
        return Err(Error::AdmissibilityViolated(format!(
            "({}, {}) with margin {} intersects the exceptional set or leaves ({}, {})",
            band.lo, band.hi, band.margin, sets.gamma1, sets.gamma2
        )));
    }
    let (lo, hi) = (band.lo, band.hi);
    // Collect per-segment sub-arcs in circular traversal order.
    #[derive(Clone, Copy)]
    struct SubArc {
        start: f64,
        end: f64,
        increasing: bool,
        solved_start: bool,
        solved_end: bool,
    }
    let mut subs: Vec<SubArc> = Vec::new();
    for seg in monotone_segments(symbol) {
        let p = &symbol.pieces()[seg.piece];
        let (v0, v1) = (p.eval(seg.x0), p.eval(seg.x1));
        let (vmin, vmax) = (v0.min(v1), v0.max(v1));
        if vmax <= lo || vmin >= hi {
            continue;
        }
        let (start, solved_start, end, solved_end) = if seg.increasing {
            let (s, ss) = if v0 < lo { (solve_level(symbol, &seg, lo)?, true) } else { (seg.x0, false) };
            let (e, se) = if v1 > hi { (solve_level(symbol, &seg, hi)?, true) } else { (seg.x1, false) };
            (s, ss, e, se)
        } else {
            let (s, ss) = if v0 > hi { (solve_level(symbol, &seg, hi)?, true) } else { (seg.x0, false) };
            let (e, se) = if v1 < lo { (solve_level(symbol, &seg, lo)?, true) } else { (seg.x1, false) };
            (s, ss, e, se)
        };
        if end - start < 1e-13 {
            continue;
        }
        subs.push(SubArc { start, end, increasing: seg.increasing, solved_start, solved_end });
    }
    // Merge adjacent sub-arcs meeting at a shared (necessarily removable)
    // boundary, including across the 0 ≡ 2π seam.
    let near = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(TAU);
        d < 1e-11 || d > TAU - 1e-11
    };
    let mut merged: Vec<SubArc> = Vec::new();
    for sub in subs {
        match merged.last_mut() {
            Some(prev)
                if !prev.solved_end
                    && !sub.solved_start
                    && prev.increasing == sub.increasing
                    && near(prev.end, sub.start) =>
            {
                prev.end += sub.end - sub.start;
                prev.solved_end = sub.solved_end;
            }
            _ => merged.push(sub),
        }
    }
    if merged.len() > 1 {
        let first = merged[0];
        let last = merged.last_mut().unwrap();
        if !last.solved_end
            && !first.solved_start
            && last.increasing == first.increasing
            && near(last.end, first.start)
        {
            last.end += first.end - first.start;
            last.solved_end = first.solved_end;
            merged.remove(0);
        }
    }
    let mut minus_arcs = Vec::new();
    let mut plus_arcs = Vec::new();
    for sub in merged {
        debug_assert!(sub.solved_start && sub.solved_end, "open-ended preimage arc");
        if sub.increasing {
            minus_arcs.push((sub.start, sub.end));
        } else {
            plus_arcs.push((sub.start, sub.end));
        }
    }
    Ok(PreimageArcs { minus_arcs, plus_arcs })
}

/// Channel counts over an admissible band, with the exact balance check.
pub fn multiplicity(symbol: &PiecewiseSymbol, band: &AdmissibleInterval) -> Result<MultiplicityReport> {
    let arcs = preimage_arcs(symbol, band)?;
    let n_plus = arcs.plus_arcs.len();
    let n_minus = arcs.minus_arcs.len();
    let mut s_plus = 0;
    let mut s_minus = 0;
    for j in symbol.classify_breakpoints() {
        let contains = band.lo >= j.jump_interval.0 - 1e-12 && band.hi <= j.jump_interval.1 + 1e-12;
        if !contains {
            continue;
        }
        match j.class {
            JumpClass::SPlus => s_plus += 1,
            JumpClass::SMinus => s_minus += 1,
            _ => {}
        }
    }
    if n_plus + s_plus != n_minus + s_minus {
        return Err(Error::BalanceViolation { n_plus, s_plus, n_minus, s_minus });
    }
    Ok(MultiplicityReport {
        n_plus,
        n_minus,
        s_plus,
        s_minus,
        m: n_plus + s_plus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Thin,
    Thick,
    Mixed,
    Exceptional,
    OutsideSpectrum,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub set: PointClass,
    /// The partition component the probe sits in.
    pub component: (f64, f64),
    /// The admissible probe interval actually used.
    pub probe: (f64, f64),
    pub report: MultiplicityReport,
}

#[derive(Debug, Clone)]
pub struct SpectrumPartition {
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma_omega: IntervalSet,
    pub upsilon: IntervalSet,
    pub thin: IntervalSet,
    pub thick: IntervalSet,
    pub mixed: IntervalSet,
    pub exceptional: Vec<f64>,
    pub probes: Vec<ProbeReport>,
}

/// Pick an admissible probe interval inside a partition component: split at
/// interior exceptional values, take the widest clear stretch, then shrink a
/// midpoint-centered interval until admissible.
fn probe_interval(sets: &SpectralSets, comp: (f64, f64)) -> Option<(f64, f64)> {
    let mut cuts = vec![comp.0];
    for &v in &sets.exceptional {
        if v > comp.0 + THIN_COMPONENT && v < comp.1 - THIN_COMPONENT {
            cuts.push(v);
        }
    }
    cuts.push(comp.1);
    let (mut best_lo, mut best_hi) = (comp.0, comp.0);
    for w in cuts.windows(2) {
        if w[1] - w[0] > best_hi - best_lo {
            best_lo = w[0];
            best_hi = w[1];
        }
    }
    let mid = 0.5 * (best_lo + best_hi);
    let mut half = 0.25 * (best_hi - best_lo);
    for _ in 0..60 {
        let margin = (half * 0.1).min(1e-6).max(1e-12);
        if is_admissible_with(sets, mid - half, mid + half, margin) {
            return Some((mid - half, mid + half));
        }
        half *= 0.5;
    }
    None
}

/// Interval-set algebra on [γ1, γ2] plus one multiplicity probe per
/// positive-measure component.
pub fn partition_spectrum(symbol: &PiecewiseSymbol) -> Result<SpectrumPartition> {
    let sets = symbol.spectral_sets();
    let sigma_t = IntervalSet::single(sets.gamma1, sets.gamma2);
    let thin = drop_slivers(sigma_t.subtract(&sets.sigma_omega));
    let thick = drop_slivers(sets.sigma_omega.subtract(&sets.upsilon));
    let mixed = drop_slivers(sets.sigma_omega.intersect(&sets.upsilon));
    let mut probes = Vec::new();
    for (kind, set) in [
        (PointClass::Thin, &thin),
        (PointClass::Thick, &thick),
        (PointClass::Mixed, &mixed),
    ] {
        for comp in set.positive_components(THIN_COMPONENT) {
            if let Some((lo, hi)) = probe_interval(&sets, comp) {
                let band = AdmissibleInterval::new(lo, hi, (1e-6f64).min(0.05 * (hi - lo)));
                let report = multiplicity(symbol, &band)?;
                probes.push(ProbeReport { set: kind, component: comp, probe: (lo, hi), report });
            }
        }
    }
    Ok(SpectrumPartition {
        gamma1: sets.gamma1,
        gamma2: sets.gamma2,
        sigma_omega: sets.sigma_omega.clone(),
        upsilon: sets.upsilon.clone(),
        thin,
        thick,
        mixed,
        exceptional: sets.exceptional.clone(),
        probes,
    })
}

fn drop_slivers(s: IntervalSet) -> IntervalSet {
    IntervalSet::from_intervals(s.positive_components(THIN_COMPONENT))
}

pub fn classify_point(symbol: &PiecewiseSymbol, lambda: f64) -> Result<PointClass> {
    let part = partition_spectrum(symbol)?;
    Ok(classify_point_with(&part, lambda))
}

pub fn classify_point_with(part: &SpectrumPartition, lambda: f64) -> PointClass {
    const TOL: f64 = 1e-9;
    if part.exceptional.iter().any(|&v| (v - lambda).abs() <= TOL) {
        return PointClass::Exceptional;
    }
    if lambda < part.gamma1 - TOL || lambda > part.gamma2 + TOL {
        return PointClass::OutsideSpectrum;
    }
    if part.mixed.contains(lambda, TOL) {
        PointClass::Mixed
    } else if part.thick.contains(lambda, TOL) {
        PointClass::Thick
    } else if part.thin.contains(lambda, TOL) {
        PointClass::Thin
    } else {
        // inside [γ1, γ2] but only in a measure-zero sliver: treat as
        // exceptional rather than guessing
        PointClass::Exceptional
    }
}

/// JSON form of the partition report.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionJson {
    pub gamma: (f64, f64),
    pub sigma_omega: Vec<(f64, f64)>,
    pub upsilon: Vec<(f64, f64)>,
    pub exceptional: Vec<f64>,
    pub thin: Vec<(f64, f64)>,
    pub thick: Vec<(f64, f64)>,
    pub mixed: Vec<(f64, f64)>,
    pub probes: Vec<ProbeJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeJson {
    pub interval: (f64, f64),
    /// (n−, n+)
    pub n: (usize, usize),
    /// (s−, s+)
    pub s: (usize, usize),
    pub m: usize,
}

impl SpectrumPartition {
    pub fn to_report(&self) -> PartitionJson {
        PartitionJson {
            gamma: (self.gamma1, self.gamma2),
            sigma_omega: self.sigma_omega.intervals().to_vec(),
            upsilon: self.upsilon.intervals().to_vec(),
            exceptional: self.exceptional.clone(),
            thin: self.thin.intervals().to_vec(),
            thick: self.thick.intervals().to_vec(),
            mixed: self.mixed.intervals().to_vec(),
            probes: self
                .probes
                .iter()
                .map(|p| ProbeJson {
                    interval: p.probe,
                    n: (p.report.n_minus, p.report.n_plus),
                    s: (p.report.s_minus, p.report.s_plus),
                    m: p.report.m,
                })
                .collect(),
        }
    }
}
