use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tabular::PreparedDataset;

/// Eigenvalues below `RANK_TOL * largest` count as zero.
const RANK_TOL: f64 = 1e-10;
/// Eigenvalues within this factor above the rank cut are too close to call.
const BORDERLINE: f64 = 1e3;
pub const DEFAULT_LAMBDA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseMethod {
    /// Moore-Penrose pseudo-inverse from the eigendecomposition.
    PseudoInverse,
    /// `(C + λI)^-1`, used when numerical rank is ambiguous.
    Regularized,
}

/// Sample covariance of a set of feature rows and the inverse used by the
/// Mahalanobis distance.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    covariance: DMatrix<f64>,
    inverse: DMatrix<f64>,
    /// Rows `w` with `inverse = Wᵀ W`, so distances are Euclidean after `W`.
    whitener: DMatrix<f64>,
    rank: usize,
    method: InverseMethod,
    lambda: f64,
}

impl CovarianceModel {
    /// A model whose distance is the Euclidean distance.
    pub fn identity(dim: usize) -> Self {
        CovarianceModel {
            covariance: DMatrix::identity(dim, dim),
            inverse: DMatrix::identity(dim, dim),
            whitener: DMatrix::identity(dim, dim),
            rank: dim,
            method: InverseMethod::PseudoInverse,
            lambda: 0.0,
        }
    }

    pub fn from_dataset(ds: &PreparedDataset) -> Result<Self> {
        let (_, rows) = ds.feature_matrix()?;
        covariance(&rows)
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn method(&self) -> InverseMethod {
        self.method
    }

    /// Regularization added to the diagonal; 0 on the pseudo-inverse path.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Maps a row into the space where Mahalanobis distance is Euclidean.
    pub fn whiten(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok((&self.whitener * DVector::from_column_slice(x)).as_slice().to_vec())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            })
        }
    }
}

/// Sample covariance (divisor `n - 1`) of row vectors.
pub fn covariance(rows: &[Vec<f64>]) -> Result<CovarianceModel> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "covariance needs at least 2 rows, got {n}"
        )));
    }
    let m = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: bad.len(),
        });
    }
    let x = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
    let mean = x.row_mean();
    let centered = DMatrix::from_fn(n, m, |i, j| x[(i, j)] - mean[j]);
    let mut c = centered.transpose() * &centered / (n as f64 - 1.0);
    // Exact symmetry, so the eigensolver sees a symmetric input.
    c = (&c + c.transpose()) * 0.5;

    let eig = SymmetricEigen::new(c.clone());
    let largest = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cut = largest * RANK_TOL;
    let borderline = eig
        .eigenvalues
        .iter()
        .any(|&l| l > cut && l <= cut * BORDERLINE);

    let (method, lambda) = if borderline {
        (InverseMethod::Regularized, DEFAULT_LAMBDA)
    } else {
        (InverseMethod::PseudoInverse, 0.0)
    };
    let kept: Vec<usize> = match method {
        InverseMethod::PseudoInverse => (0..m).filter(|&k| eig.eigenvalues[k] > cut).collect(),
        InverseMethod::Regularized => (0..m).collect(),
    };
    let rank = (0..m).filter(|&k| eig.eigenvalues[k] > cut).count();
    let whitener = DMatrix::from_fn(kept.len(), m, |r, j| {
        let k = kept[r];
        let l = eig.eigenvalues[k].max(0.0) + lambda;
        eig.eigenvectors[(j, k)] / l.sqrt()
    });
    let inverse = whitener.transpose() * &whitener;
    Ok(CovarianceModel {
        covariance: c,
        inverse,
        whitener,
        rank,
        method,
        lambda,
    })
}

/// `sqrt((x - y)ᵀ C⁺ (x - y))`.
pub fn mahalanobis(x: &[f64], y: &[f64], model: &CovarianceModel) -> Result<f64> {
    model.check_dim(x)?;
    model.check_dim(y)?;
    let diff = DVector::from_iterator(x.len(), x.iter().zip(y).map(|(a, b)| a - b));
    let q = (diff.transpose() * &model.inverse * &diff)[(0, 0)];
    Ok(q.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    #[test]
    fn identity_is_euclidean() {
        let m = CovarianceModel::identity(2);
        assert!((mahalanobis(&[0.0, 0.0], &[3.0, 4.0], &m).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(mahalanobis(&[1.0, 2.0], &[1.0, 2.0], &m).unwrap(), 0.0);
    }

    #[test]
    fn identical_rows_give_zero_model() {
        let m = covariance(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(max_abs(m.covariance()), 0.0);
        assert_eq!(max_abs(m.inverse()), 0.0);
        assert_eq!(m.rank(), 0);
    }

    #[test]
    fn correlated_columns_take_pseudo_inverse() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![4.0, 8.0]];
        let m = covariance(&rows).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.method(), InverseMethod::PseudoInverse);
        assert_eq!(m.lambda(), 0.0);
        let c = m.covariance();
        let p = m.inverse();
        assert!(max_abs(&(c * p * c - c)) < 1e-8);
        assert!(max_abs(&(p * c * p - p)) < 1e-8);
    }

    #[test]
    fn full_rank_inverse() {
        let rows = vec![
            vec![1.0, 0.0, 2.0],
            vec![0.0, 1.0, 1.0],
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
        ];
        let m = covariance(&rows).unwrap();
        assert_eq!(m.rank(), 3);
        let id = m.covariance() * m.inverse();
        assert!(max_abs(&(id - DMatrix::identity(3, 3))) < 1e-9);
    }

    #[test]
    fn whitening_matches_quadratic_form() {
        let rows = vec![vec![1.0, 0.5], vec![0.0, 1.0], vec![3.0, 1.0], vec![2.0, 2.5]];
        let m = covariance(&rows).unwrap();
        let (a, b) = (m.whiten(&rows[0]).unwrap(), m.whiten(&rows[3]).unwrap());
        let e: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((e - mahalanobis(&rows[0], &rows[3], &m).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(covariance(&[vec![1.0]]), Err(Error::InsufficientData(_))));
        let m = CovarianceModel::identity(2);
        assert!(matches!(
            mahalanobis(&[1.0], &[1.0, 2.0], &m),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
