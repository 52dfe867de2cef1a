//! Randomized invariants over the symbol/classifier/operator stack.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use toepchan::classifier::{is_admissible_with, multiplicity};
use toepchan::toeplitz::{level_measure, TruncatedToeplitz};
use toepchan::{AdmissibleInterval, PiecewiseSymbol, Side};

fn random_symbol(seed: u64) -> PiecewiseSymbol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PiecewiseSymbol::random(&mut rng, 5, 3)
}

/// Scan for an admissible band inside the essential range, if any exists.
fn find_band(symbol: &PiecewiseSymbol, margin: f64) -> Option<AdmissibleInterval> {
    let sets = symbol.spectral_sets();
    let span = sets.gamma2 - sets.gamma1;
    if span < 10.0 * margin {
        return None;
    }
    let width = 2.0 * margin;
    for k in 0..400 {
        let lo = sets.gamma1 + span * (k as f64 + 0.5) / 400.0;
        let hi = lo + width;
        if hi >= sets.gamma2 {
            break;
        }
        if is_admissible_with(&sets, lo, hi, margin) && sets.sigma_omega.contains(0.5 * (lo + hi), 0.0) {
            return Some(AdmissibleInterval::new(lo, hi, margin));
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pieces_tile_the_circle(seed in any::<u64>()) {
        let sym = random_symbol(seed);
        let total: f64 = sym.pieces().iter().map(|p| p.right - p.left).sum();
        prop_assert!((total - TAU).abs() < 1e-9);
        for w in sym.pieces().windows(2) {
            prop_assert!((w[0].right - w[1].left).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_conjugate_symmetry(seed in any::<u64>()) {
        let sym = random_symbol(seed);
        let coeffs = sym.fourier_coeffs(8);
        for n in 0..=8i64 {
            let a = coeffs.coeff(n);
            let b = coeffs.coeff(-n);
            prop_assert!((a - b.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn toeplitz_hermitian_with_contained_spectrum(seed in any::<u64>()) {
        let sym = random_symbol(seed);
        let op = TruncatedToeplitz::build(&sym, 16);
        let m = op.matrix();
        for i in 0..16 {
            for j in 0..16 {
                prop_assert!((m[(i, j)] - m[(j, i)].conj()).norm() < 1e-9);
            }
        }
        let sets = sym.spectral_sets();
        for &ev in op.eigenvalues() {
            prop_assert!(ev >= sets.gamma1 - 1e-7 && ev <= sets.gamma2 + 1e-7);
        }
    }

    #[test]
    fn arc_balance_on_admissible_bands(seed in any::<u64>()) {
        let sym = random_symbol(seed);
        if let Some(band) = find_band(&sym, 0.02) {
            // multiplicity() errors out internally if the two one-sided
            // counts disagree, so Ok(_) is the balance property itself
            let rep = multiplicity(&sym, &band);
            prop_assert!(rep.is_ok(), "{:?} on {:?}", rep.err(), (band.lo, band.hi));
            let rep = rep.unwrap();
            prop_assert_eq!(rep.n_plus + rep.s_plus, rep.m);
            prop_assert_eq!(rep.n_minus + rep.s_minus, rep.m);
            prop_assert!(rep.m >= 1);
        }
    }

    #[test]
    fn partition_components_disjoint(seed in any::<u64>()) {
        let sym = random_symbol(seed);
        let part = match toepchan::classifier::partition_spectrum(&sym) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let pairs = [
            (&part.thin, &part.thick),
            (&part.thin, &part.mixed),
            (&part.thick, &part.mixed),
        ];
        for (a, b) in pairs {
            prop_assert!(a.intersect(b).measure() < 1e-9);
        }
        for set in [&part.thin, &part.thick, &part.mixed] {
            for &(lo, hi) in set.intervals() {
                prop_assert!(lo >= part.gamma1 - 1e-9 && hi <= part.gamma2 + 1e-9);
            }
        }
    }

    #[test]
    fn level_measure_matches_grid_scan(seed in any::<u64>(), frac_a in 0.05f64..0.45, frac_b in 0.55f64..0.95) {
        let sym = random_symbol(seed);
        let sets = sym.spectral_sets();
        let span = sets.gamma2 - sets.gamma1;
        let a = sets.gamma1 + frac_a * span;
        let b = sets.gamma1 + frac_b * span;
        let exact = match level_measure(&sym, a, b) {
            Ok(v) => v,
            Err(_) => return Ok(()), // boundary value hits a flat piece
        };
        let n = 400_000usize;
        let mut hits = 0usize;
        for j in 0..n {
            let th = TAU * (j as f64 + 0.5) / n as f64;
            let w = sym.eval_unchecked(th);
            if w > a && w < b {
                hits += 1;
            }
        }
        let scan = hits as f64 / n as f64;
        prop_assert!((exact - scan).abs() < 2e-3, "exact {exact} scan {scan}");
    }

    #[test]
    fn counting_function_nested_monotone(seed in any::<u64>()) {
        let sym = random_symbol(seed);
        let sets = sym.spectral_sets();
        let span = sets.gamma2 - sets.gamma1;
        let op = TruncatedToeplitz::build(&sym, 48);
        let inner = (sets.gamma1 + 0.3 * span, sets.gamma1 + 0.6 * span);
        let outer = (sets.gamma1 + 0.2 * span, sets.gamma1 + 0.7 * span);
        prop_assert!(op.counting_function(inner.0, inner.1) <= op.counting_function(outer.0, outer.1));
    }

    #[test]
    fn evolution_unitary_on_random_states(seed in any::<u64>(), t in -30.0f64..30.0) {
        let sym = random_symbol(seed);
        let op = TruncatedToeplitz::build(&sym, 24);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b9);
        let v = DVector::from_fn(24, |_, _| {
            use rand::Rng;
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let w = op.evolve(&v, t);
        prop_assert!((w.norm() - v.norm()).abs() < 1e-10 * v.norm().max(1.0));
    }

    #[test]
    fn one_sided_limits_bracket_jump_interval(seed in any::<u64>()) {
        let sym = random_symbol(seed);
        for info in sym.classify_breakpoints() {
            let l = sym.eval(info.eta, Side::Left).unwrap();
            let r = sym.eval(info.eta, Side::Right).unwrap();
            prop_assert!((l - info.left_limit).abs() < 1e-10);
            prop_assert!((r - info.right_limit).abs() < 1e-10);
            prop_assert!((info.jump_interval.0 - l.min(r)).abs() < 1e-10);
            prop_assert!((info.jump_interval.1 - l.max(r)).abs() < 1e-10);
        }
    }
}
