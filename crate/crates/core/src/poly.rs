//! Real polynomials in one variable, used for the symbol pieces.
//!
//! Coefficients are stored low-to-high: p(x) = c_0 + c_1 x + ... + c_D x^D.
//! Root finding goes through the companion matrix followed by one Newton
//! polish, which is plenty for degree ≤ 12.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Maximum allowed degree for a symbol piece.
pub const MAX_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree after trimming trailing near-zero coefficients.
    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len() - 1;
        while d > 0 && self.coeffs[d] == 0.0 {
            d -= 1;
        }
        d
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, &c)| m as f64 * c)
            .collect();
        Poly::new(coeffs)
    }

    /// Substitute x -> a + b*x, returning the composed polynomial.
    ///
    /// Expansion is by repeated Horner steps on the shifted variable; exact
    /// in exact arithmetic for any degree we allow.
    pub fn compose_affine(&self, a: f64, b: f64) -> Poly {
        // Horner: p(a + b x) built from the top coefficient down.
        let mut acc = vec![*self.coeffs.last().unwrap()];
        for &c in self.coeffs.iter().rev().skip(1) {
            // acc <- acc * (a + b x) + c
            let mut next = vec![0.0; acc.len() + 1];
            for (i, &v) in acc.iter().enumerate() {
                next[i] += v * a;
                next[i + 1] += v * b;
            }
            next[0] += c;
            acc = next;
        }
        Poly::new(acc)
    }

    /// Real roots in [lo − slack, hi + slack], deduplicated and sorted.
    ///
    /// Companion-matrix eigenvalues, one Newton polish each; a root is kept
    /// when its imaginary part is below `im_tol`.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        const IM_TOL: f64 = 1e-10;
        const SLACK: f64 = 1e-12;
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let mut roots: Vec<f64> = Vec::new();
        if d == 1 {
            roots.push(-self.coeffs[0] / self.coeffs[1]);
        } else {
            let lead = self.coeffs[d];
            let mut m = DMatrix::<f64>::zeros(d, d);
            for i in 1..d {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..d {
                m[(i, d - 1)] = -self.coeffs[i] / lead;
            }
            let eigs = m.complex_eigenvalues();
            let dp = self.derivative();
            for ev in eigs.iter() {
                let polished = self.newton_polish(*ev, &dp);
                if polished.im.abs() < IM_TOL {
                    roots.push(polished.re);
                }
            }
        }
        let span = (hi - lo).abs().max(1.0);
        let mut kept: Vec<f64> = roots
            .into_iter()
            .filter(|r| *r >= lo - SLACK && *r <= hi + SLACK)
            .collect();
        kept.sort_by(f64::total_cmp);
        kept.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * span);
        kept
    }

    fn newton_polish(&self, z0: Complex64, dp: &Poly) -> Complex64 {
        let eval_c = |p: &Poly, z: Complex64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &c in p.coeffs.iter().rev() {
                acc = acc * z + c;
            }
            acc
        };
        let d = eval_c(dp, z0);
        if d.norm() < 1e-300 {
            return z0;
        }
        z0 - eval_c(self, z0) / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Poly::new(vec![1.0, -3.0, 2.0]); // 1 - 3x + 2x^2
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(2.0), 3.0);
        let dp = p.derivative();
        assert_eq!(dp.coeffs(), &[-3.0, 4.0]);
    }

    #[test]
    fn roots_quadratic() {
        // roots at 0.5 and 1
        let p = Poly::new(vec![1.0, -3.0, 2.0]);
        let r = p.real_roots_in(0.0, 2.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.5).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roots_window_filter() {
        let p = Poly::new(vec![1.0, -3.0, 2.0]);
        let r = p.real_roots_in(0.6, 2.0);
        assert_eq!(r, vec![1.0]);
    }

    #[test]
    fn roots_complex_rejected() {
        // x^2 + 1: no real roots
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        assert!(p.real_roots_in(-10.0, 10.0).is_empty());
    }

    #[test]
    fn roots_cubic_accurate() {
        // (x-1)(x-2)(x-3) = -6 + 11x - 6x^2 + x^3
        let p = Poly::new(vec![-6.0, 11.0, -6.0, 1.0]);
        let r = p.real_roots_in(0.0, 4.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn compose_affine_matches_direct_eval() {
        let p = Poly::new(vec![2.0, -1.0, 0.5, 3.0]);
        let q = p.compose_affine(0.7, -1.3);
        for k in 0..20 {
            let x = -2.0 + 0.21 * k as f64;
            let direct = p.eval(0.7 - 1.3 * x);
            assert!((q.eval(x) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
    }
}
