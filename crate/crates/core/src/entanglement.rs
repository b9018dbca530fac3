//! Entanglement measures: von Neumann entropy and two-qubit concurrence.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{eig_hermitian, kron, ComplexMatrix, LinalgError};

const STATE_TOL: f64 = 1e-10;
const EIGEN_FLOOR: f64 = 1e-14;
const CLIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntanglementError {
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("expected a 4x4 two-qubit state, got {rows}x{cols}")]
    WrongDimension { rows: usize, cols: usize },
    #[error("amplitudes are not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Eigenvalues of a validated density matrix.
fn density_spectrum(rho: &ComplexMatrix) -> Result<Vec<f64>, EntanglementError> {
    if !rho.is_square() {
        return Err(EntanglementError::NotDensityMatrix(format!(
            "{}x{} is not square",
            rho.rows(),
            rho.cols()
        )));
    }
    if !rho.is_hermitian(STATE_TOL) {
        return Err(EntanglementError::NotDensityMatrix("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(EntanglementError::NotDensityMatrix(format!("trace {tr}")));
    }
    let values = eig_hermitian(rho)?.values;
    if values[0] < -STATE_TOL {
        return Err(EntanglementError::NotDensityMatrix(format!(
            "negative eigenvalue {:.3e}",
            values[0]
        )));
    }
    Ok(values)
}

/// `S = −Σ Υ ln Υ` over the eigenvalues of ρ, in nats.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64, EntanglementError> {
    let values = density_spectrum(rho)?;
    let s: f64 = values
        .iter()
        .filter(|&&p| p > EIGEN_FLOOR)
        .map(|&p| -p * p.ln())
        .sum();
    Ok(s.max(0.0))
}

/// Square root of a positive semidefinite matrix.
fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix, EntanglementError> {
    let eig = eig_hermitian(rho)?;
    // Rounding-level eigenvalues would otherwise turn into ~1e-8 roots.
    let floor = EIGEN_FLOOR * eig.values.last().copied().unwrap_or(0.0).max(1.0);
    Ok(eig.map_spectrum(|v| {
        if v <= floor {
            C64::new(0.0, 0.0)
        } else {
            C64::new(v.sqrt(), 0.0)
        }
    }))
}

fn sigma_y_pair() -> ComplexMatrix {
    let sy = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    });
    kron(&sy, &sy).expect("4x4 fits")
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The λ_i are the square roots of the eigenvalues of `√ρ ρ̃ √ρ`, which share
/// their spectrum with `ρ ρ̃` but are Hermitian.
pub fn concurrence_wootters(rho: &ComplexMatrix) -> Result<f64, EntanglementError> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(EntanglementError::WrongDimension {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    density_spectrum(rho)?;
    let yy = sigma_y_pair();
    let tilde = &(&yy * &rho.conj()) * &yy;
    let root = psd_sqrt(rho)?;
    let r = &(&root * &tilde) * &root;
    // Symmetrize away rounding before the Hermitian solver.
    let r = ComplexMatrix::from_fn(4, 4, |i, j| (r[(i, j)] + r[(j, i)].conj()) * 0.5);
    let values = eig_hermitian(&r)?.values;
    // Eigenvalues at rounding level (either sign) are zero; anything more
    // negative than the clip tolerance is clamped as well.
    let noise = EIGEN_FLOOR * values.last().copied().unwrap_or(0.0).max(1.0);
    let mut lambdas: Vec<f64> = values
        .into_iter()
        .map(|v| {
            if v.abs() <= noise || (-CLIP_TOL..0.0).contains(&v) {
                0.0
            } else {
                v.max(0.0).sqrt()
            }
        })
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

fn check_amplitudes(a: &[C64; 4]) -> Result<(), EntanglementError> {
    let norm2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > STATE_TOL {
        return Err(EntanglementError::NotNormalized(norm2));
    }
    Ok(())
}

/// `2|a₁a₄ − a₂a₃|` for a pure state on `{ee, eg, ge, gg}`.
pub fn concurrence_pure(a: &[C64; 4]) -> Result<f64, EntanglementError> {
    check_amplitudes(a)?;
    Ok(2.0 * (a[0] * a[3] - a[1] * a[2]).norm())
}

/// The alternative closed form `2 max(0, |a₁a₃ − a₂|²)`. It does not agree
/// with [`concurrence_pure`] on generic states and is kept only for
/// side-by-side comparison.
pub fn paper_cn(a: &[C64; 4]) -> Result<f64, EntanglementError> {
    check_amplitudes(a)?;
    Ok(2.0 * (a[0] * a[2] - a[1]).norm_sqr().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{exp_hermitian, partial_trace};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ket(a: &[C64]) -> ComplexMatrix {
        ComplexMatrix::column(a)
    }

    fn random_amplitudes(rng: &mut StdRng) -> [C64; 4] {
        let mut a = [c(0.0, 0.0); 4];
        for z in &mut a {
            *z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        a.map(|z| z / n)
    }

    fn random_unitary(rng: &mut StdRng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(2, 2, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        exp_hermitian(&(&a + &a.adjoint()), 1.0).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let pure = ComplexMatrix::projector(&ket(&[c(0.6, 0.0), c(0.0, 0.8)]));
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!((von_neumann_entropy(&half).unwrap() - LN_2).abs() < 1e-12);
        let p = 0.853_553_390_593_273_8;
        let s = von_neumann_entropy(&ComplexMatrix::from_diagonal(&[p, 1.0 - p])).unwrap();
        let oracle = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        assert!((s - oracle).abs() < 1e-14);
        assert!((s - 0.416_50).abs() < 1e-5);
    }

    #[test]
    fn entropy_rejects_non_states() {
        let bad_trace = ComplexMatrix::identity(2);
        assert!(matches!(
            von_neumann_entropy(&bad_trace),
            Err(EntanglementError::NotDensityMatrix(_))
        ));
        let negative = ComplexMatrix::from_diagonal(&[1.2, -0.2]);
        assert!(von_neumann_entropy(&negative).is_err());
    }

    #[test]
    fn bell_and_product_states() {
        let s = FRAC_1_SQRT_2;
        for sign in [1.0, -1.0] {
            let a = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(sign * s, 0.0)];
            let rho = ComplexMatrix::projector(&ket(&a));
            assert!((concurrence_wootters(&rho).unwrap() - 1.0).abs() < 1e-12);
            assert!((concurrence_pure(&a).unwrap() - 1.0).abs() < 1e-12);
        }
        let eg = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(concurrence_wootters(&ComplexMatrix::projector(&ket(&eg))).unwrap() < 1e-12);
        assert_eq!(concurrence_pure(&eg).unwrap(), 0.0);
    }

    #[test]
    fn werner_state() {
        let s = FRAC_1_SQRT_2;
        let phi = ComplexMatrix::projector(&ket(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]));
        for p in [0.2, 0.5, 0.8] {
            let rho =
                &phi.scale(c(p, 0.0)) + &ComplexMatrix::identity(4).scale(c((1.0 - p) / 4.0, 0.0));
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!(
                (concurrence_wootters(&rho).unwrap() - expected).abs() < 1e-9,
                "p = {p}"
            );
        }
    }

    #[test]
    fn wrong_dimension() {
        assert!(matches!(
            concurrence_wootters(&ComplexMatrix::identity(2).scale(c(0.5, 0.0))),
            Err(EntanglementError::WrongDimension { rows: 2, cols: 2 })
        ));
        assert!(matches!(
            concurrence_pure(&[c(1.0, 0.0); 4]),
            Err(EntanglementError::NotNormalized(_))
        ));
    }

    #[test]
    fn pure_formula_matches_wootters() {
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..1000 {
            let a = random_amplitudes(&mut rng);
            let w = concurrence_wootters(&ComplexMatrix::projector(&ket(&a))).unwrap();
            let p = concurrence_pure(&a).unwrap();
            assert!((p - w).abs() < 1e-8, "{p} vs {w}");
        }
    }

    #[test]
    fn paper_cn_examples() {
        let zero = c(0.0, 0.0);
        assert_eq!(paper_cn(&[c(1.0, 0.0), zero, zero, zero]).unwrap(), 0.0);
        let a1 = c(0.5, 0.0);
        let a3 = c(0.5, 0.0);
        let a2 = a1 * a3;
        let a4 = c((1.0 - 0.25 - 0.25 - a2.norm_sqr()).sqrt(), 0.0);
        assert!(paper_cn(&[a1, a2, a3, a4]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..50 {
            let a = random_amplitudes(&mut rng);
            let b = random_amplitudes(&mut rng);
            let rho = &ComplexMatrix::projector(&ket(&a)).scale(c(0.7, 0.0))
                + &ComplexMatrix::projector(&ket(&b)).scale(c(0.3, 0.0));
            let uv = kron(&random_unitary(&mut rng), &random_unitary(&mut rng)).unwrap();
            let moved = &(&uv * &rho) * &uv.adjoint();
            let before = concurrence_wootters(&rho).unwrap();
            let after = concurrence_wootters(&moved).unwrap();
            assert!((before - after).abs() < 1e-8);
            assert!((0.0..=1.0 + 1e-9).contains(&before));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bipartite_pure_entropies_agree(v in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let amps: Vec<C64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let psi = ket(&amps.iter().map(|z| z / norm).collect::<Vec<_>>());
            let rho = ComplexMatrix::projector(&psi);
            let a = partial_trace(&rho, &[2, 3], 0).unwrap();
            let b = partial_trace(&rho, &[2, 3], 1).unwrap();
            let sa = von_neumann_entropy(&a).unwrap();
            let sb = von_neumann_entropy(&b).unwrap();
            prop_assert!((sa - sb).abs() < 1e-9);
            prop_assert!((0.0..=LN_2 + 1e-12).contains(&sa));
            let purity = (&a * &a).trace().re;
            prop_assert_eq!(sa < 1e-9, (purity - 1.0).abs() < 1e-9);
        }
    }
}
