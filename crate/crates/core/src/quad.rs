//! Gauss–Legendre quadrature: fixed panels for oscillatory integrands and
//! adaptive bisection refinement for smooth ones.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
///
/// Computed by Newton iteration on P_n starting from the Chebyshev-angle
/// estimates; accurate to machine precision for the moderate orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) via the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(16))
}

/// 16-node rule applied to a single panel [a, b].
pub fn panel16<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Complex64 {
    let (nodes, weights) = gl16();
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(c + h * x) * *w;
    }
    acc * h
}

/// Fixed equal panels, 16 nodes each; the workhorse for oscillatory phases
/// where the panel count is chosen from the phase speed.
pub fn fixed_panels<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        acc += panel16(&mut f, a + k as f64 * h, a + (k + 1) as f64 * h);
    }
    acc
}

/// Adaptive bisection to relative tolerance; errors out past `max_depth`.
///
/// The tolerance is taken relative to a coarse estimate of ∫|f| so that
/// oscillatory integrands with heavy cancellation do not demand an absolute
/// tolerance of zero.
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: usize,
) -> Result<Complex64> {
    let mut mass = 0.0;
    let h = (b - a) / 8.0;
    for k in 0..8 {
        mass += panel16(&mut f, a + k as f64 * h, a + (k + 1) as f64 * h).norm();
    }
    let whole = panel16(&mut f, a, b);
    let scale = mass.max(whole.norm()).max(1e-30);
    // Budget halves with each bisection but never drops below roundoff on
    // the global scale, otherwise deep refinements chase noise forever.
    let floor = 1e-16 * scale;
    adaptive_rec(&mut f, a, b, whole, rel_tol * scale, floor, max_depth, 0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: Complex64,
    abs_tol: f64,
    floor: f64,
    max_depth: usize,
    depth: usize,
) -> Result<Complex64> {
    let mid = 0.5 * (a + b);
    let left = panel16(f, a, mid);
    let right = panel16(f, mid, b);
    let refined = left + right;
    let err = (refined - whole).norm();
    if err <= abs_tol.max(floor) {
        return Ok(refined);
    }
    if depth >= max_depth {
        return Err(Error::QuadratureNonConvergence { depth, estimate: err });
    }
    let half_tol = 0.5 * abs_tol;
    let l = adaptive_rec(f, a, mid, left, half_tol, floor, max_depth, depth + 1)?;
    let r = adaptive_rec(f, mid, b, right, half_tol, floor, max_depth, depth + 1)?;
    Ok(l + r)
}

/// Real-valued convenience wrapper around [`adaptive`].
pub fn adaptive_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: usize,
) -> Result<f64> {
    adaptive(|x| Complex64::new(f(x), 0.0), a, b, rel_tol, max_depth).map(|v| v.re)
}
