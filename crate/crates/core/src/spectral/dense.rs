//! Dense symmetric eigendecomposition, used as an independent oracle and as
//! the eigenvector path for periodic operators.

use nalgebra::SymmetricEigen;

use super::operator::PeriodicOperator;
use super::{SpectralData, SpectralMethod};
use crate::error::{invalid, Result};

/// Largest operator handed to the dense solver.
pub const DENSE_LIMIT: usize = 2048;

/// Eigenvalues ascending with unit eigenvectors.
pub fn dense_eigen(op: &PeriodicOperator) -> Result<SpectralData> {
    let n = op.size();
    if n > DENSE_LIMIT {
        return Err(invalid(
            "N",
            format!("dense path limited to N <= {DENSE_LIMIT}, got {n}"),
        ));
    }
    let eig = SymmetricEigen::new(op.to_dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            super::eigvec::fix_sign(&mut v);
            v
        })
        .collect();
    let mut data = SpectralData::from_eigenvalues(values, SpectralMethod::Dense);
    data.set_vectors(vectors);
    Ok(data)
}

/// Eigenvalues of the dense matrix only.
pub fn dense_eigenvalues(op: &PeriodicOperator) -> Result<Vec<f64>> {
    let n = op.size();
    if n > DENSE_LIMIT {
        return Err(invalid(
            "N",
            format!("dense path limited to N <= {DENSE_LIMIT}, got {n}"),
        ));
    }
    let mut v: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}
