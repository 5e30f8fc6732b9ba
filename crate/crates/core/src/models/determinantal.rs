//! Kernel algebra of determinantal processes on finite spaces.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Field, Matrix};
use crate::scalar::Scalar;

/// Spectral margin: kernels must have spectrum in `[0, 1 - SPECTRAL_MARGIN]`.
pub const SPECTRAL_MARGIN: f64 = 1e-9;

/// `J = K (I - K)^{-1}` without any spectral check; `None` if `I - K` is singular.
pub fn interaction_operator<T: Field>(kernel: &Matrix<T>) -> Option<Matrix<T>> {
    let n = kernel.dim();
    let resolvent = Matrix::identity(n).sub(kernel).inverse()?;
    Some(kernel.mul(&resolvent))
}

/// `K = J (I + J)^{-1}`, the inverse of [`interaction_operator`].
pub fn kernel_from_interaction<T: Field>(interaction: &Matrix<T>) -> Option<Matrix<T>> {
    let n = interaction.dim();
    let resolvent = Matrix::identity(n).add(interaction).inverse()?;
    Some(interaction.mul(&resolvent))
}

/// Checks symmetry and `spec(K) ⊂ [0, 1 - SPECTRAL_MARGIN]`.
pub fn check_kernel<S: Scalar>(kernel: &Matrix<S>) -> Result<()> {
    let scale = kernel.row_major().iter().fold(S::one(), |m, v| m.max(v.abs()));
    if !kernel.is_symmetric_within(&(S::lit(1e-12) * scale)) {
        return Err(Error::InvalidModel("kernel must be symmetric".into()));
    }
    if kernel.row_major().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidModel("kernel entries must be finite".into()));
    }
    // round-off allowance below zero scales with the precision of S
    let negative_slack = S::epsilon().as_f64() * 64.0;
    for ev in symmetric_eigenvalues(kernel) {
        if ev > 1.0 - SPECTRAL_MARGIN || ev < -negative_slack {
            return Err(Error::SpectrumViolation {
                eigenvalue: ev,
                margin: SPECTRAL_MARGIN,
            });
        }
    }
    Ok(())
}

/// The global interaction operator `J = K (I - K)^{-1}` of a symmetric kernel
/// with spectrum in `[0, 1 - SPECTRAL_MARGIN]`.
pub fn build_j<S: Scalar>(kernel: &Matrix<S>) -> Result<Matrix<S>> {
    check_kernel(kernel)?;
    let j = interaction_operator(kernel).ok_or(Error::SpectrumViolation {
        eigenvalue: 1.0,
        margin: SPECTRAL_MARGIN,
    })?;
    Ok(symmetrize(&j))
}

fn symmetrize<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let half = S::lit(0.5);
    let t = m.transpose();
    let mut out = m.add(&t);
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            out[(i, j)] *= half;
        }
    }
    out
}

/// Interaction kernel for a kernel `K` taken with respect to site weights
/// `lambda`: with `D = diag(sqrt(lambda))` and `S = D K D`,
/// `J = D^{-1} S (I - S)^{-1} D^{-1}`, so that `P(xi) ∝ det J_xi · prod lambda`.
pub fn weighted_interaction<S: Scalar>(kernel: &Matrix<S>, weights: &[S]) -> Result<Matrix<S>> {
    if kernel.dim() != weights.len() {
        return Err(Error::InvalidModel(format!(
            "kernel dimension {} does not match {} sites",
            kernel.dim(),
            weights.len()
        )));
    }
    let root: Vec<S> = weights.iter().map(|w| w.sqrt()).collect();
    let mut scaled = kernel.clone();
    for i in 0..kernel.dim() {
        for j in 0..kernel.dim() {
            scaled[(i, j)] = kernel[(i, j)] * root[i] * root[j];
        }
    }
    let js = build_j(&scaled)?;
    let mut out = js;
    for i in 0..kernel.dim() {
        for j in 0..kernel.dim() {
            out[(i, j)] = out[(i, j)] / (root[i] * root[j]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix<f64>, b: &Matrix<f64>, tol: f64) -> bool {
        a.row_major()
            .iter()
            .zip(b.row_major())
            .all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn zero_kernel() {
        let z = Matrix::<f64>::zeros(3);
        assert_eq!(build_j(&z).unwrap(), z);
    }

    #[test]
    fn two_by_two_fixture() {
        let k = Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        let j = build_j(&k).unwrap();
        let want = Matrix::from_rows(vec![vec![5.0 / 3.0, 4.0 / 3.0], vec![4.0 / 3.0, 5.0 / 3.0]]).unwrap();
        assert!(close(&j, &want, 1e-14));
        assert!(close(&kernel_from_interaction(&j).unwrap(), &k, 1e-10));
    }

    #[test]
    fn diagonal_fixture() {
        let k = Matrix::diagonal(&[0.2, 0.5]);
        let j = build_j(&k).unwrap();
        assert!(close(&j, &Matrix::diagonal(&[0.25, 1.0]), 1e-15));
    }

    #[test]
    fn spectrum_violations() {
        let k = Matrix::from_rows(vec![vec![1.2, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(matches!(build_j(&k), Err(Error::SpectrumViolation { .. })));
        let one = Matrix::diagonal(&[1.0, 0.5]);
        assert!(matches!(build_j(&one), Err(Error::SpectrumViolation { .. })));
        let neg = Matrix::diagonal(&[-0.1, 0.5]);
        assert!(matches!(build_j(&neg), Err(Error::SpectrumViolation { .. })));
        let asym = Matrix::from_rows(vec![vec![0.5, 0.1], vec![0.2, 0.5]]).unwrap();
        assert!(matches!(build_j(&asym), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn unit_weights_reduce_to_plain_interaction() {
        let k = Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        let a = weighted_interaction(&k, &[1.0, 1.0]).unwrap();
        assert!(close(&a, &build_j(&k).unwrap(), 1e-15));
    }
}
