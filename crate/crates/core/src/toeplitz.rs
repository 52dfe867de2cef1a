//! Truncated Toeplitz and Hankel matrices from exact Fourier coefficients:
//! eigensystems, the eigenvalue counting limit, singular-value decay, the
//! flip equivalence T_−(ω) ≅ T_+(ω̃), and the projection–multiplier
//! commutator.

use crate::classifier::{monotone_segments, solve_level};
use crate::error::{Error, Result};
use crate::symbol::PiecewiseSymbol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::OnceLock;

/// Hermitian n×n section T_{jk} = ω̂_{j−k} with a lazily computed
/// eigensystem shared across all propagation times.
pub struct TruncatedToeplitz {
    n: usize,
    matrix: DMatrix<Complex64>,
    eigen: OnceLock<(Vec<f64>, DMatrix<Complex64>)>,
    eigenvalues_only: OnceLock<Vec<f64>>,
}

/// Toeplitz matrix from an explicit coefficient window c_{−(n−1)}..c_{n−1}.
///
/// Only d ≥ 0 is read; negative diagonals are filled by conjugation so the
/// section is exactly Hermitian.
pub fn toeplitz_from_coeffs(coeff: impl Fn(i64) -> Complex64, n: usize) -> DMatrix<Complex64> {
    let diag: Vec<Complex64> = (0..n as i64).map(&coeff).collect();
    DMatrix::from_fn(n, n, |j, k| {
        if j >= k {
            diag[j - k]
        } else {
            diag[k - j].conj()
        }
    })
}

impl TruncatedToeplitz {
    pub fn build(symbol: &PiecewiseSymbol, n: usize) -> Self {
        assert!(n >= 1);
        let matrix = toeplitz_from_coeffs(|d| symbol.fourier_coeff(d), n);
        TruncatedToeplitz { n, matrix, eigen: OnceLock::new(), eigenvalues_only: OnceLock::new() }
    }

    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols());
        let n = matrix.nrows();
        TruncatedToeplitz { n, matrix, eigen: OnceLock::new(), eigenvalues_only: OnceLock::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Ascending eigenvalues without vectors (cheaper than the full system).
    pub fn eigenvalues(&self) -> &[f64] {
        if let Some((vals, _)) = self.eigen.get() {
            return vals;
        }
        self.eigenvalues_only.get_or_init(|| {
            let mut vals: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
            vals.sort_by(f64::total_cmp);
            vals
        })
    }

    /// Ascending eigenvalues with matching orthonormal eigenvector columns.
    pub fn eigensystem(&self) -> (&[f64], &DMatrix<Complex64>) {
        let (vals, vecs) = self.eigen.get_or_init(|| {
            let se = nalgebra::SymmetricEigen::new(self.matrix.clone());
            let mut order: Vec<usize> = (0..self.n).collect();
            order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
            let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
            let mut vecs = DMatrix::<Complex64>::zeros(self.n, self.n);
            for (col, &i) in order.iter().enumerate() {
                vecs.set_column(col, &se.eigenvectors.column(i));
            }
            (vals, vecs)
        });
        (vals, vecs)
    }

    /// e^{−iTt} v through the cached eigensystem.
    pub fn evolve(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let (vals, vecs) = self.eigensystem();
        let coeffs = vecs.adjoint() * v;
        let phased = DVector::from_iterator(
            self.n,
            coeffs
                .iter()
                .zip(vals)
                .map(|(c, &lam)| c * Complex64::new(0.0, -lam * t).exp()),
        );
        vecs * phased
    }

    /// Spectral projection E_T((lo, hi)) v.
    pub fn spectral_filter(&self, v: &DVector<Complex64>, lo: f64, hi: f64) -> DVector<Complex64> {
        let (vals, vecs) = self.eigensystem();
        let coeffs = vecs.adjoint() * v;
        let masked = DVector::from_iterator(
            self.n,
            coeffs
                .iter()
                .zip(vals)
                .map(|(c, &lam)| if lam > lo && lam < hi { *c } else { Complex64::new(0.0, 0.0) }),
        );
        vecs * masked
    }

    /// Eigenvalues strictly inside (a, b), with 1e−12 slack at the borders.
    pub fn counting_function(&self, a: f64, b: f64) -> usize {
        self.eigenvalues()
            .iter()
            .filter(|&&lam| lam > a + 1e-12 && lam < b - 1e-12)
            .count()
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CountingReport {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub count: usize,
    pub ratio: f64,
    pub limit: f64,
    pub deviation: f64,
}

/// Angular measure of {a < ω < b} divided by 2π, exact through the monotone
/// segment decomposition.
pub fn level_measure(symbol: &PiecewiseSymbol, a: f64, b: f64) -> Result<f64> {
    assert!(a < b);
    for p in symbol.pieces() {
        if p.is_constant() {
            let c = p.eval(p.left);
            if (c - a).abs() < 1e-12 || (c - b).abs() < 1e-12 {
                return Err(Error::BoundaryMassNonzero(c));
            }
        }
    }
    let mut total = 0.0;
    for p in symbol.pieces() {
        if p.is_constant() {
            let c = p.eval(p.left);
            if c > a && c < b {
                total += p.width();
            }
        }
    }
    for seg in monotone_segments(symbol) {
        let p = &symbol.pieces()[seg.piece];
        let (v0, v1) = (p.eval(seg.x0), p.eval(seg.x1));
        let (vmin, vmax) = (v0.min(v1), v0.max(v1));
        let lo = a.max(vmin);
        let hi = b.min(vmax);
        if hi <= lo {
            continue;
        }
        let x_at = |t: f64| -> Result<f64> {
            if t <= vmin {
                Ok(if seg.increasing { seg.x0 } else { seg.x1 })
            } else if t >= vmax {
                Ok(if seg.increasing { seg.x1 } else { seg.x0 })
            } else {
                solve_level(symbol, &seg, t)
            }
        };
        total += (x_at(hi)? - x_at(lo)?).abs();
    }
    Ok(total / TAU)
}

/// Counting-function report at truncation size n against the exact limit.
pub fn szego_limit(symbol: &PiecewiseSymbol, a: f64, b: f64, n: usize) -> Result<CountingReport> {
    let limit = level_measure(symbol, a, b)?;
    let t = TruncatedToeplitz::build(symbol, n);
    let count = t.counting_function(a, b);
    let ratio = count as f64 / n as f64;
    Ok(CountingReport { n, a, b, count, ratio, limit, deviation: (ratio - limit).abs() })
}

/// Hankel section H_{jk} = ω̂_{j+k+1}, the matrix of the off-diagonal corner
/// of the multiplication operator in the Fourier basis.
pub struct HankelBlock {
    n: usize,
    matrix: DMatrix<Complex64>,
    singular: OnceLock<Vec<f64>>,
}

impl HankelBlock {
    pub fn build(symbol: &PiecewiseSymbol, n: usize) -> Self {
        let coeffs: Vec<Complex64> = (1..=(2 * n as i64 - 1)).map(|d| symbol.fourier_coeff(d)).collect();
        let matrix = DMatrix::from_fn(n, n, |j, k| coeffs[j + k]);
        HankelBlock { n, matrix, singular: OnceLock::new() }
    }

    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols());
        let n = matrix.nrows();
        HankelBlock { n, matrix, singular: OnceLock::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Singular values, descending; computed from the Hermitian square.
    pub fn singular_values(&self) -> &[f64] {
        self.singular.get_or_init(|| singular_values_of(&self.matrix))
    }

    pub fn nuclear_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    /// Numerical rank at relative threshold.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = self.singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|&&s| s > rel_tol * top.max(1e-300)).count()
    }
}

pub(crate) fn singular_values_of(m: &DMatrix<Complex64>) -> Vec<f64> {
    let gram = m.adjoint() * m;
    let mut sv: Vec<f64> = gram
        .symmetric_eigenvalues()
        .iter()
        .map(|&e| e.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Least-squares decay exponent of log σ_k vs log k over k ∈ [n/8, n/2]
/// (1-based), a trace-class proxy: σ_k ~ k^{−p} fits slope −p.
pub fn decay_exponent(singular: &[f64]) -> f64 {
    let n = singular.len();
    let k_lo = (n / 8).max(1);
    let k_hi = (n / 2).max(k_lo + 1);
    let pts: Vec<(f64, f64)> = (k_lo..=k_hi)
        .filter(|&k| singular[k - 1] > 1e-300)
        .map(|k| ((k as f64).ln(), singular[k - 1].ln()))
        .collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    -slope
}

/// Max entrywise defect between the flipped section of T_−(ω) (entries
/// ω̂_{k−j} on the negative-mode basis) and the section of T_+(ω̃) with
/// ω̃(ζ) = ω(ζ̄); the two are unitarily equivalent, so the defect is pure
/// rounding.
pub fn flip_equivalence_check(symbol: &PiecewiseSymbol, n: usize) -> f64 {
    assert!(n >= 2);
    let reflected = symbol.reflect();
    // T_−(ω) on basis e_{−1}, …, e_{−n}: entry (p, q) = ω̂_{(−1−p)−(−1−q)}
    // = ω̂_{q−p}; the flip V e_{−1−p} = e_p is the identity on indices.
    let mut defect: f64 = 0.0;
    for p in 0..n as i64 {
        for q in 0..n as i64 {
            let lhs = symbol.fourier_coeff(q - p);
            let rhs = reflected.fourier_coeff(p - q);
            defect = defect.max((lhs - rhs).norm());
        }
    }
    defect
}

/// Nuclear norm of the n×n section of the commutator [P_−, J_φ]: the two
/// Hankel corners coupling nonnegative and negative modes.
pub fn commutator_trace_norm(phi: &PiecewiseSymbol, n: usize) -> f64 {
    let upper = DMatrix::from_fn(n, n, |p, q| phi.fourier_coeff(-1 - (p as i64) - (q as i64)));
    let lower = DMatrix::from_fn(n, n, |p, q| phi.fourier_coeff(1 + (p as i64) + (q as i64)));
    let su: f64 = singular_values_of(&upper).iter().sum();
    let sl: f64 = singular_values_of(&lower).iter().sum();
    su + sl
}
