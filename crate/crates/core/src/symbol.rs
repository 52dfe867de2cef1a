//! Piecewise-smooth real symbols on the unit circle.
//!
//! A symbol is a list of pieces tiling [0, 2π); each piece is a polynomial in
//! the angle (degree ≤ 12) or the closed-form cosine, so one-sided limits,
//! derivatives, critical points, and Fourier coefficients are all exact up to
//! rounding. Angles are identified modulo 2π and arcs run counterclockwise.

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::poly::{Poly, MAX_DEGREE};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Tolerance below which a value/derivative mismatch at a breakpoint is
/// treated as continuous.
pub const JUMP_TOL: f64 = 1e-10;

/// Angle in [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(f64);

impl Angle {
    pub fn new(x: f64) -> Self {
        let mut v = x.rem_euclid(TAU);
        // rem_euclid can return TAU itself when x is a tiny negative number.
        if v >= TAU {
            v -= TAU;
        }
        Angle(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Counterclockwise distance from self to other, in [0, 2π).
    pub fn ccw_to(self, other: Angle) -> f64 {
        (other.0 - self.0).rem_euclid(TAU)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    Poly(Poly),
    /// cos x on the full circle; kept closed-form so the canonical regular
    /// example is bit-exact.
    Cos,
}

/// One piece of a symbol on the open arc (left, right), right unwrapped so
/// that right > left always (the wrapping piece has right > 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPiece {
    pub left: f64,
    pub right: f64,
    pub kind: PieceKind,
}

impl PolyPiece {
    pub fn poly(left: f64, right: f64, coeffs: Vec<f64>) -> Self {
        PolyPiece {
            left,
            right,
            kind: PieceKind::Poly(Poly::new(coeffs)),
        }
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    /// Value at the unwrapped coordinate x ∈ [left, right].
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            PieceKind::Poly(p) => p.eval(x - self.left),
            PieceKind::Cos => x.cos(),
        }
    }

    pub fn eval_deriv(&self, x: f64) -> f64 {
        match &self.kind {
            PieceKind::Poly(p) => p.derivative().eval(x - self.left),
            PieceKind::Cos => -x.sin(),
        }
    }

    /// Critical points strictly inside the piece (unwrapped coordinates).
    pub fn interior_critical_points(&self) -> Vec<f64> {
        match &self.kind {
            PieceKind::Poly(p) => {
                let dp = p.derivative();
                if dp.degree() == 0 && dp.coeffs()[0] == 0.0 {
                    return Vec::new(); // constant piece handled by the caller
                }
                dp.real_roots_in(0.0, self.width())
                    .into_iter()
                    .map(|u| self.left + u)
                    .filter(|x| *x > self.left + 1e-12 && *x < self.right - 1e-12)
                    .collect()
            }
            PieceKind::Cos => {
                // roots of sin x in (left, right)
                let mut out = Vec::new();
                let mut k = (self.left / PI).ceil() as i64;
                while (k as f64) * PI < self.right - 1e-12 {
                    let x = k as f64 * PI;
                    if x > self.left + 1e-12 {
                        out.push(x);
                    }
                    k += 1;
                }
                out
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match &self.kind {
            PieceKind::Poly(p) => p.degree() == 0,
            PieceKind::Cos => false,
        }
    }
}

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JumpClass {
    /// ω(η−0) − ω(η+0) > 0: downward jump crossing counterclockwise.
    SPlus,
    /// ω(η−0) − ω(η+0) < 0.
    SMinus,
    /// Equal one-sided values but a derivative jump.
    SZero,
    /// Removable: value and derivative both continuous.
    Smooth,
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpInfo {
    pub eta: f64,
    pub left_limit: f64,
    pub right_limit: f64,
    pub class: JumpClass,
    /// [min, max] of the two one-sided limits.
    pub jump_interval: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct SpectralSets {
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma_omega: IntervalSet,
    pub upsilon: IntervalSet,
    pub crit_values: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub exceptional: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FourierCoeffs {
    pub m: usize,
    /// Coefficients for n ∈ [−2M, 2M], stored with offset 2M.
    pub c: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn coeff(&self, n: i64) -> Complex64 {
        let k = n + 2 * self.m as i64;
        assert!(k >= 0 && (k as usize) < self.c.len(), "mode {n} outside |n| ≤ {}", 2 * self.m);
        self.c[k as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSymbol {
    name: String,
    pieces: Vec<PolyPiece>,
}

impl PiecewiseSymbol {
    /// Build from pieces; validates the tiling, the degree cap, and
    /// non-constancy. Pieces may arrive unsorted; lefts must lie in [0, 2π).
    pub fn new(name: impl Into<String>, mut pieces: Vec<PolyPiece>) -> Result<Self> {
        let name = name.into();
        if pieces.is_empty() {
            return Err(Error::InvalidSymbol("no pieces".into()));
        }
        pieces.sort_by(|a, b| a.left.total_cmp(&b.left));
        let mut width_sum = 0.0;
        for p in &pieces {
            if !(p.left >= 0.0 && p.left < TAU) {
                return Err(Error::InvalidSymbol(format!("piece left {} outside [0, 2π)", p.left)));
            }
            if p.width() <= 0.0 {
                return Err(Error::InvalidSymbol(format!("piece at {} has nonpositive width", p.left)));
            }
            if let PieceKind::Poly(poly) = &p.kind {
                if poly.coeffs().len() - 1 > MAX_DEGREE {
                    return Err(Error::InvalidSymbol(format!(
                        "piece degree {} exceeds cap {MAX_DEGREE}",
                        poly.coeffs().len() - 1
                    )));
                }
                if poly.coeffs().iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidSymbol("non-finite coefficient".into()));
                }
            }
            width_sum += p.width();
        }
        if (width_sum - TAU).abs() > 1e-12 {
            return Err(Error::InvalidSymbol(format!(
                "pieces cover {width_sum} instead of 2π"
            )));
        }
        for i in 0..pieces.len() {
            let next_left = if i + 1 < pieces.len() {
                pieces[i + 1].left
            } else {
                pieces[0].left + TAU
            };
            if (pieces[i].right - next_left).abs() > 1e-9 {
                return Err(Error::InvalidSymbol(format!(
                    "gap or overlap between piece ending at {} and piece starting at {}",
                    pieces[i].right, next_left
                )));
            }
            // Snap so downstream interval arithmetic sees an exact tiling.
            pieces[i].right = next_left;
        }
        let sym = PiecewiseSymbol { name, pieces };
        if sym.is_constant_symbol() {
            return Err(Error::InvalidSymbol("symbol is constant".into()));
        }
        Ok(sym)
    }

    fn is_constant_symbol(&self) -> bool {
        if !self.pieces.iter().all(|p| p.is_constant()) {
            return false;
        }
        let v0 = self.pieces[0].eval(self.pieces[0].left);
        self.pieces
            .iter()
            .all(|p| (p.eval(p.left) - v0).abs() < 1e-12)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pieces(&self) -> &[PolyPiece] {
        &self.pieces
    }

    /// Breakpoints (piece lefts), ascending in [0, 2π).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.left).collect()
    }

    /// Index of the piece whose closed arc contains x, plus the unwrapped
    /// coordinate inside it. Points within 1e−12 of a breakpoint resolve to
    /// the piece on the right.
    fn locate(&self, x: f64) -> (usize, f64) {
        let x = Angle::new(x).value();
        for (i, p) in self.pieces.iter().enumerate() {
            for cand in [x, x + TAU] {
                if cand >= p.left - 1e-12 && cand < p.right - 1e-12 {
                    return (i, cand);
                }
            }
        }
        // x sits within 1e−12 below the first breakpoint: wraps to last piece's
        // right end == first left.
        (0, self.pieces[0].left)
    }

    /// Breakpoint index within 1e−12 of x, if any.
    fn at_breakpoint(&self, x: f64) -> Option<usize> {
        let x = Angle::new(x).value();
        self.pieces.iter().position(|p| {
            (x - p.left).abs() < 1e-12 || (x - p.left - TAU).abs() < 1e-12 || (x - p.left + TAU).abs() < 1e-12
        })
    }

    /// Value with explicit one-sided limits at breakpoints.
    pub fn eval(&self, x: f64, side: Side) -> Result<f64> {
        if let Some(i) = self.at_breakpoint(x) {
            let prev = if i == 0 { self.pieces.len() - 1 } else { i - 1 };
            let left_limit = self.pieces[prev].eval(self.pieces[prev].right);
            let right_limit = self.pieces[i].eval(self.pieces[i].left);
            return match side {
                Side::Left => Ok(left_limit),
                Side::Right => Ok(right_limit),
                Side::Interior => {
                    if (left_limit - right_limit).abs() > JUMP_TOL {
                        Err(Error::SideRequired(self.pieces[i].left))
                    } else {
                        Ok(right_limit)
                    }
                }
            };
        }
        let (i, xu) = self.locate(x);
        Ok(self.pieces[i].eval(xu))
    }

    /// Value taking the right limit at breakpoints; for grid sweeps.
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        let (i, xu) = self.locate(x);
        self.pieces[i].eval(xu)
    }

    /// Derivative taking the right limit at breakpoints.
    pub fn deriv_unchecked(&self, x: f64) -> f64 {
        let (i, xu) = self.locate(x);
        self.pieces[i].eval_deriv(xu)
    }

    /// Classify every piece boundary; removable ones are reported with class
    /// Smooth but do not belong to the breakpoint set proper.
    pub fn classify_breakpoints(&self) -> Vec<JumpInfo> {
        let p = self.pieces.len();
        let mut out = Vec::with_capacity(p);
        for i in 0..p {
            let prev = if i == 0 { p - 1 } else { i - 1 };
            let eta = self.pieces[i].left;
            let left_limit = self.pieces[prev].eval(self.pieces[prev].right);
            let right_limit = self.pieces[i].eval(self.pieces[i].left);
            let jump = left_limit - right_limit;
            let class = if jump > JUMP_TOL {
                JumpClass::SPlus
            } else if jump < -JUMP_TOL {
                JumpClass::SMinus
            } else {
                let ld = self.pieces[prev].eval_deriv(self.pieces[prev].right);
                let rd = self.pieces[i].eval_deriv(self.pieces[i].left);
                if (ld - rd).abs() > JUMP_TOL {
                    JumpClass::SZero
                } else {
                    JumpClass::Smooth
                }
            };
            out.push(JumpInfo {
                eta,
                left_limit,
                right_limit,
                class,
                jump_interval: (left_limit.min(right_limit), left_limit.max(right_limit)),
            });
        }
        out
    }

    /// Essential range, jump-interval union, critical values, thresholds.
    pub fn spectral_sets(&self) -> SpectralSets {
        let mut range_ivs: Vec<(f64, f64)> = Vec::new();
        let mut crit_values: Vec<f64> = Vec::new();
        for p in &self.pieces {
            let mut lo = p.eval(p.left).min(p.eval(p.right));
            let mut hi = p.eval(p.left).max(p.eval(p.right));
            if p.is_constant() {
                // locally constant: every point is critical, the value is an
                // atom of the essential range
                crit_values.push(p.eval(p.left));
            } else {
                for x in p.interior_critical_points() {
                    let v = p.eval(x);
                    crit_values.push(v);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            range_ivs.push((lo, hi));
        }
        let jumps = self.classify_breakpoints();
        let mut thresholds: Vec<f64> = Vec::new();
        let mut jump_ivs: Vec<(f64, f64)> = Vec::new();
        for j in &jumps {
            match j.class {
                JumpClass::SPlus | JumpClass::SMinus => {
                    thresholds.push(j.left_limit);
                    thresholds.push(j.right_limit);
                    jump_ivs.push(j.jump_interval);
                }
                JumpClass::SZero => {
                    thresholds.push(j.right_limit);
                }
                JumpClass::Smooth => {
                    // A removable breakpoint with vanishing derivative is a
                    // genuine critical point of the glued function.
                    let i = self.pieces.iter().position(|p| p.left == j.eta).unwrap();
                    if self.pieces[i].eval_deriv(self.pieces[i].left).abs() < JUMP_TOL {
                        crit_values.push(j.right_limit);
                    }
                }
            }
        }
        let sigma_omega = IntervalSet::from_intervals(range_ivs);
        let upsilon = IntervalSet::from_intervals(jump_ivs);
        let mut exceptional: Vec<f64> = crit_values.iter().chain(&thresholds).copied().collect();
        exceptional.sort_by(f64::total_cmp);
        exceptional.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        SpectralSets {
            gamma1: sigma_omega.min().unwrap(),
            gamma2: sigma_omega.max().unwrap(),
            sigma_omega,
            upsilon,
            crit_values,
            thresholds,
            exceptional,
        }
    }

    /// Single Fourier coefficient ω̂_n = (1/2π)∫ ω(e^{ix}) e^{−inx} dx,
    /// evaluated piece-by-piece in closed form.
    pub fn fourier_coeff(&self, n: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.pieces {
            match &p.kind {
                PieceKind::Cos => {
                    debug_assert!((p.width() - TAU).abs() < 1e-9, "closed-form cos piece must span the circle");
                    if n == 1 || n == -1 {
                        acc += 0.5;
                    }
                }
                PieceKind::Poly(poly) => {
                    let w = p.width();
                    let moments = exp_moments(n, w, poly.coeffs().len());
                    let phase = Complex64::new(0.0, -(n as f64) * p.left).exp();
                    let mut piece_sum = Complex64::new(0.0, 0.0);
                    for (m, &c) in poly.coeffs().iter().enumerate() {
                        piece_sum += c * moments[m];
                    }
                    acc += phase * piece_sum / TAU;
                }
            }
        }
        acc
    }

    /// All coefficients for |n| ≤ 2M.
    pub fn fourier_coeffs(&self, m: usize) -> FourierCoeffs {
        assert!(m >= 1);
        let half = 2 * m as i64;
        let c = (-half..=half).map(|n| self.fourier_coeff(n)).collect();
        FourierCoeffs { m, c }
    }

    /// The symbol ω̃(ζ) = ω(ζ̄), i.e. w̃(x) = w(2π − x).
    pub fn reflect(&self) -> PiecewiseSymbol {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let w = p.width();
            let kind = match &p.kind {
                PieceKind::Cos => PieceKind::Cos,
                PieceKind::Poly(poly) => PieceKind::Poly(poly.compose_affine(w, -1.0)),
            };
            let mut left = TAU - p.right;
            if left < 0.0 {
                left += TAU;
            } else if left >= TAU {
                left -= TAU;
            }
            // Snap angles that should be exact breakpoints.
            if left.abs() < 1e-15 {
                left = 0.0;
            }
            pieces.push(PolyPiece { left, right: left + w, kind });
        }
        PiecewiseSymbol::new(format!("reflect({})", self.name), pieces)
            .expect("reflection preserves a valid tiling")
    }
}

/// I_m(n, W) = ∫_0^W u^m e^{−inu} du for m = 0..deg, via the integration by
/// parts recurrence, with a power-series fallback at small |nW| where the
/// recurrence cancels.
fn exp_moments(n: i64, w: f64, count: usize) -> Vec<Complex64> {
    let nf = n as f64;
    let mut out = Vec::with_capacity(count);
    if n == 0 {
        for m in 0..count {
            out.push(Complex64::new(w.powi(m as i32 + 1) / (m as f64 + 1.0), 0.0));
        }
        return out;
    }
    if (nf * w).abs() <= 4.0 {
        // I_m = Σ_k (−in)^k W^{m+k+1} / (k! (m+k+1))
        for m in 0..count {
            let mut term = Complex64::new(w.powi(m as i32 + 1), 0.0);
            let mut sum = term / (m as f64 + 1.0);
            let z = Complex64::new(0.0, -nf * w);
            for k in 1..60 {
                term = term * z / k as f64;
                let add = term / (m as f64 + k as f64 + 1.0);
                sum += add;
                if add.norm() < 1e-18 * sum.norm().max(1e-30) {
                    break;
                }
            }
            out.push(sum);
        }
        return out;
    }
    let inv_in = Complex64::new(0.0, -1.0 / nf); // 1/(in)
    let e = Complex64::new(0.0, -nf * w).exp();
    let mut prev = (Complex64::new(1.0, 0.0) - e) * inv_in;
    out.push(prev);
    let mut wm = 1.0;
    for m in 1..count {
        wm *= w;
        let cur = (m as f64 * prev - wm * e) * inv_in;
        out.push(cur);
        prev = cur;
    }
    out
}

// ---------------------------------------------------------------------------
// JSON schema and built-ins
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    name: String,
    breakpoints: Vec<f64>,
    pieces: Vec<PieceJson>,
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    coeffs: Vec<f64>,
}

impl PiecewiseSymbol {
    /// Build from ascending breakpoints and per-piece local coefficients;
    /// piece i lives on (x_i, x_{i+1}) with the last piece wrapping to
    /// x_0 + 2π.
    pub fn from_breakpoints(
        name: impl Into<String>,
        breakpoints: &[f64],
        coeffs: &[Vec<f64>],
    ) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != coeffs.len() {
            return Err(Error::InvalidSymbol(
                "breakpoints and pieces must be nonempty and equal in number".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidSymbol("breakpoints must be strictly ascending".into()));
            }
        }
        if breakpoints[0] < 0.0 || *breakpoints.last().unwrap() >= TAU {
            return Err(Error::InvalidSymbol("breakpoints must lie in [0, 2π)".into()));
        }
        let p = breakpoints.len();
        let mut pieces = Vec::with_capacity(p);
        for i in 0..p {
            let left = breakpoints[i];
            let right = if i + 1 < p { breakpoints[i + 1] } else { breakpoints[0] + TAU };
            pieces.push(PolyPiece::poly(left, right, coeffs[i].clone()));
        }
        PiecewiseSymbol::new(name, pieces)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SymbolJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidSymbol(format!("bad symbol JSON: {e}")))?;
        let coeffs: Vec<Vec<f64>> = raw.pieces.into_iter().map(|p| p.coeffs).collect();
        PiecewiseSymbol::from_breakpoints(raw.name, &raw.breakpoints, &coeffs)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut coeffs = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            match &p.kind {
                PieceKind::Poly(poly) => coeffs.push(PieceJson { coeffs: poly.coeffs().to_vec() }),
                PieceKind::Cos => {
                    return Err(Error::InvalidSymbol(
                        "closed-form cosine piece has no polynomial JSON form".into(),
                    ))
                }
            }
        }
        let raw = SymbolJson {
            name: self.name.clone(),
            breakpoints: self.breakpoints(),
            pieces: coeffs,
        };
        Ok(serde_json::to_string_pretty(&raw).unwrap())
    }

    /// Resolve a built-in name: "cosine", "fig3", "indicator:<x1>:<x2>".
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "cosine" => Ok(PiecewiseSymbol {
                name: "cosine".into(),
                pieces: vec![PolyPiece { left: 0.0, right: TAU, kind: PieceKind::Cos }],
            }),
            "fig3" => PiecewiseSymbol::from_breakpoints(
                "fig3",
                &[0.0, 2.0, 4.0],
                &[
                    vec![0.0, 0.5],
                    vec![3.0, 0.5],
                    vec![4.0, -2.0 / (TAU - 4.0)],
                ],
            ),
            other => {
                if let Some(rest) = other.strip_prefix("indicator:") {
                    let parts: Vec<&str> = rest.split(':').collect();
                    if parts.len() != 2 {
                        return Err(Error::InvalidSymbol(format!("bad indicator spec '{other}'")));
                    }
                    let x1: f64 = parts[0]
                        .parse()
                        .map_err(|_| Error::InvalidSymbol(format!("bad angle '{}'", parts[0])))?;
                    let x2: f64 = parts[1]
                        .parse()
                        .map_err(|_| Error::InvalidSymbol(format!("bad angle '{}'", parts[1])))?;
                    PiecewiseSymbol::indicator(x1, x2)
                } else {
                    Err(Error::InvalidSymbol(format!("unknown built-in symbol '{other}'")))
                }
            }
        }
    }

    /// Indicator of the counterclockwise arc from x1 to x2 (value 1 on it).
    pub fn indicator(x1: f64, x2: f64) -> Result<Self> {
        let a1 = Angle::new(x1).value();
        let a2 = Angle::new(x2).value();
        if (a1 - a2).abs() < 1e-12 {
            return Err(Error::InvalidSymbol("indicator arc has zero width".into()));
        }
        let name = format!("indicator:{x1}:{x2}");
        let (bps, vals) = if a1 < a2 {
            (vec![a1, a2], vec![vec![1.0], vec![0.0]])
        } else {
            (vec![a2, a1], vec![vec![0.0], vec![1.0]])
        };
        PiecewiseSymbol::from_breakpoints(name, &bps, &vals)
    }

    /// Seeded random piecewise-polynomial symbol for property sweeps.
    pub fn random(rng: &mut impl Rng, max_pieces: usize, max_degree: usize) -> Self {
        loop {
            let count = rng.random_range(2..=max_pieces.max(2));
            let mut bps: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..TAU)).collect();
            bps.sort_by(f64::total_cmp);
            let min_gap = bps
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(TAU - (bps[count - 1] - bps[0]), f64::min);
            if min_gap < 0.25 {
                continue;
            }
            let coeffs: Vec<Vec<f64>> = (0..count)
                .map(|_| {
                    let deg = rng.random_range(0..=max_degree);
                    (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect()
                })
                .collect();
            match PiecewiseSymbol::from_breakpoints("random", &bps, &coeffs) {
                Ok(s) => return s,
                Err(_) => continue, // constant draw; retry
            }
        }
    }
}
