//! Pointwise linear algebra of a possibly degenerate metric.
//!
//! At a point the metric `G` maps vectors to covectors; its image is the
//! annihilator space, the only covectors that can be contracted. On that
//! space the inner product is given by the Moore–Penrose pseudo-inverse `G⁺`,
//! and the answer does not depend on how a generalized inverse acts on the
//! kernel directions.

use thiserror::Error;

use crate::chart::{MetricField, PointwiseCovector};
use crate::expr::DomainError;
use crate::linalg::{jacobi_eigen, norm, SquareMatrix};

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ContractionError {
    #[error("covector outside the annihilator space (residuals {left:e}, {right:e} > tol {tol:e})")]
    OutOfImage { left: f64, right: f64, tol: f64 },
    #[error("covector dimension {got} does not match metric dimension {expected}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Clone, Debug)]
pub struct RadicalDecomposition {
    pub point: Vec<f64>,
    pub metric: SquareMatrix,
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: SquareMatrix,
    pub pseudo_inverse: SquareMatrix,
    /// Orthogonal projector onto the image of the metric.
    pub projector: SquareMatrix,
    pub rank_tol: f64,
}

impl RadicalDecomposition {
    pub fn from_matrix(point: Vec<f64>, metric: SquareMatrix, rank_tol: f64) -> Self {
        let n = metric.dim();
        let eig = jacobi_eigen(&metric);
        let max_abs = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let threshold = rank_tol * max_abs;
        let mut pinv = SquareMatrix::zeros(n);
        let mut proj = SquareMatrix::zeros(n);
        let mut rank = 0;
        for (k, &lambda) in eig.values.iter().enumerate() {
            if max_abs == 0.0 || lambda.abs() <= threshold {
                continue;
            }
            rank += 1;
            let q = eig.vector(k);
            for i in 0..n {
                for j in 0..n {
                    let qq = q[i] * q[j];
                    pinv[(i, j)] += qq / lambda;
                    proj[(i, j)] += qq;
                }
            }
        }
        RadicalDecomposition {
            point,
            metric,
            rank,
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
            pseudo_inverse: pinv.symmetrized(),
            projector: proj.symmetrized(),
            rank_tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn is_degenerate(&self) -> bool {
        self.rank < self.dim()
    }

    /// Eigenvectors spanning the radical (kernel) of the metric.
    pub fn kernel_basis(&self) -> Vec<Vec<f64>> {
        let max_abs = self.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| max_abs == 0.0 || l.abs() <= self.rank_tol * max_abs)
            .map(|(k, _)| {
                (0..self.dim())
                    .map(|i| self.eigenvectors[(i, k)])
                    .collect()
            })
            .collect()
    }

    /// `‖(I − P)ω‖`
    pub fn image_residual(&self, omega: &[f64]) -> f64 {
        let p_omega = self.projector.mul_vec(omega);
        norm(
            &omega
                .iter()
                .zip(&p_omega)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        )
    }
}

pub fn decompose(
    g: &MetricField,
    p: &[f64],
    rank_tol: f64,
) -> Result<RadicalDecomposition, DomainError> {
    let m = g.eval(p)?;
    Ok(RadicalDecomposition::from_matrix(p.to_vec(), m, rank_tol))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageCheck {
    pub inside: bool,
    pub residual: f64,
}

pub fn in_image(d: &RadicalDecomposition, omega: &PointwiseCovector, tol: f64) -> ImageCheck {
    in_image_slice(d, &omega.components, tol)
}

pub(crate) fn in_image_slice(d: &RadicalDecomposition, omega: &[f64], tol: f64) -> ImageCheck {
    let residual = d.image_residual(omega);
    ImageCheck {
        inside: residual <= tol * norm(omega).max(1.0),
        residual,
    }
}

/// Covariant contraction `ωᵀ G⁺ τ` together with how far each covector lies
/// outside the annihilator space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionResult {
    pub value: f64,
    pub in_image_residuals: [f64; 2],
}

impl ContractionResult {
    pub fn max_residual(&self) -> f64 {
        self.in_image_residuals[0].max(self.in_image_residuals[1])
    }
}

pub fn cocontract(
    d: &RadicalDecomposition,
    omega: &PointwiseCovector,
    tau: &PointwiseCovector,
) -> ContractionResult {
    cocontract_slices(d, &omega.components, &tau.components)
}

pub(crate) fn cocontract_slices(
    d: &RadicalDecomposition,
    omega: &[f64],
    tau: &[f64],
) -> ContractionResult {
    ContractionResult {
        value: d.pseudo_inverse.bilinear(omega, tau),
        in_image_residuals: [d.image_residual(omega), d.image_residual(tau)],
    }
}

/// Like [`cocontract`] but refuses covectors outside the annihilator space.
pub fn cocontract_strict(
    d: &RadicalDecomposition,
    omega: &PointwiseCovector,
    tau: &PointwiseCovector,
    tol: f64,
) -> Result<ContractionResult, ContractionError> {
    for c in [omega, tau] {
        if c.components.len() != d.dim() {
            return Err(ContractionError::Dimension {
                expected: d.dim(),
                got: c.components.len(),
            });
        }
    }
    let a = in_image(d, omega, tol);
    let b = in_image(d, tau, tol);
    if !(a.inside && b.inside) {
        return Err(ContractionError::OutOfImage {
            left: a.residual,
            right: b.residual,
            tol,
        });
    }
    Ok(cocontract(d, omega, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(rows: &[Vec<f64>]) -> RadicalDecomposition {
        let n = rows.len();
        RadicalDecomposition::from_matrix(
            vec![0.0; n],
            SquareMatrix::from_rows(rows),
            DEFAULT_RANK_TOL,
        )
    }

    fn cov(v: &[f64]) -> PointwiseCovector {
        PointwiseCovector::new(vec![0.0; v.len()], v.to_vec())
    }

    fn close(a: &SquareMatrix, b: &SquareMatrix, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    #[test]
    fn diagonal_rank_one() {
        let d = dec(&[vec![2.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(d.rank, 1);
        assert!(close(&d.pseudo_inverse, &SquareMatrix::diagonal(&[0.5, 0.0]), 1e-15));
        assert!(close(&d.projector, &SquareMatrix::diagonal(&[1.0, 0.0]), 1e-15));
    }

    #[test]
    fn all_ones_rank_one() {
        let d = dec(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(d.rank, 1);
        let expect = SquareMatrix::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]);
        assert!(close(&d.pseudo_inverse, &expect, 1e-15));
    }

    #[test]
    fn minkowski_is_self_inverse() {
        let d = dec(&[vec![-1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(d.rank, 2);
        assert!(close(&d.pseudo_inverse, &SquareMatrix::diagonal(&[-1.0, 1.0]), 1e-15));
    }

    #[test]
    fn zero_metric_has_rank_zero() {
        let d = dec(&[vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]]);
        assert_eq!(d.rank, 0);
        assert_eq!(d.pseudo_inverse, SquareMatrix::zeros(3));
        assert_eq!(d.kernel_basis().len(), 3);
    }

    #[test]
    fn penrose_identities_on_indefinite_degenerate() {
        // rank 2, indefinite
        let a = [1.0, 2.0, 0.5];
        let b = [0.3, -1.0, 2.0];
        let g = SquareMatrix::from_fn(3, |i, j| a[i] * a[j] - b[i] * b[j]);
        let d = RadicalDecomposition::from_matrix(vec![0.0; 3], g.clone(), DEFAULT_RANK_TOL);
        assert_eq!(d.rank, 2);
        let gp = &d.pseudo_inverse;
        let scale = g.frobenius();
        assert!(close(&(&(&g * gp) * &g), &g, 1e-10 * scale));
        assert!(close(&(&(gp * &g) * gp), gp, 1e-10 * gp.frobenius()));
        let p = &d.projector;
        assert!(close(&(p * p), p, 1e-10));
        assert!(p.is_symmetric());
        assert!(close(&(&g * gp), p, 1e-10));
    }

    #[test]
    fn image_membership() {
        let d = dec(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let a = in_image(&d, &cov(&[3.0, 0.0]), 1e-9);
        assert!(a.inside);
        assert_eq!(a.residual, 0.0);
        let b = in_image(&d, &cov(&[0.0, 1.0]), 1e-9);
        assert!(!b.inside);
        assert_eq!(b.residual, 1.0);
        let full = dec(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert!(in_image(&full, &cov(&[0.3, -7.0]), 1e-9).inside);
    }

    #[test]
    fn contraction_examples() {
        let d = dec(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let r = cocontract(&d, &cov(&[3.0, 0.0]), &cov(&[5.0, 0.0]));
        assert_eq!(r.value, 15.0);
        let e = dec(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(cocontract(&e, &cov(&[1.0, 2.0]), &cov(&[3.0, 4.0])).value, 11.0);
        let flagged = cocontract(&d, &cov(&[3.0, 0.0]), &cov(&[0.0, 1.0]));
        assert_eq!(flagged.in_image_residuals, [0.0, 1.0]);
        assert!(matches!(
            cocontract_strict(&d, &cov(&[3.0, 0.0]), &cov(&[0.0, 1.0]), 1e-9),
            Err(ContractionError::OutOfImage { .. })
        ));
        assert!(cocontract_strict(&d, &cov(&[3.0, 0.0]), &cov(&[5.0, 0.0]), 1e-9).is_ok());
    }

    #[test]
    fn rank_is_scale_invariant() {
        let base = [vec![1.0, 0.0, 0.0], vec![0.0, 1e-12, 0.0], vec![0.0, 0.0, -2.0]];
        for s in [1e-6, 1.0, 1e6] {
            let rows: Vec<Vec<f64>> = base.iter().map(|r| r.iter().map(|v| v * s).collect()).collect();
            assert_eq!(dec(&rows).rank, 2);
        }
    }
}
