//! Finite-volume operators `Δ + ε^{-1}λ^{(m)}`, their spectra and eigenvectors.

pub mod cache;
pub mod decay;
pub mod dense;
pub mod eigvec;
pub mod matching;
pub mod operator;
pub mod sturm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decay::{decay_fit, decay_fit_with, uniform_envelope, DecayFit, DecayRate, RadialProfile};
pub use dense::{dense_eigen, dense_eigenvalues, DENSE_LIMIT};
pub use eigvec::{
    eigenvector_inverse_iteration, localized_eigenpairs, map_eigenpairs, residual, Eigenpair, EigenpairOptions,
};
pub use matching::{eigenvalue_site_matching, localization_center, SiteMatch, SiteMatching};
pub use operator::{build_operator, epsilon_valid, Boundary, PeriodicOperator, PotentialSpec};
pub use sturm::{count_below, default_tolerance, eigenvalues_sturm};

/// How a spectrum was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    SturmBisection,
    CyclicSturmBisection,
    Dense,
}

impl fmt::Display for SpectralMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SturmBisection => "sturm-bisection",
            Self::CyclicSturmBisection => "cyclic-sturm-bisection",
            Self::Dense => "dense",
        })
    }
}

impl FromStr for SpectralMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sturm-bisection" => Ok(Self::SturmBisection),
            "cyclic-sturm-bisection" => Ok(Self::CyclicSturmBisection),
            "dense" => Ok(Self::Dense),
            other => Err(Error::Format(format!("unknown spectral method '{other}'"))),
        }
    }
}

/// Sorted eigenvalues, optionally with unit eigenvectors and their centres.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub centers: Option<Vec<usize>>,
    pub method: SpectralMethod,
}

impl SpectralData {
    pub fn from_eigenvalues(eigenvalues: Vec<f64>, method: SpectralMethod) -> Self {
        Self {
            eigenvalues,
            eigenvectors: None,
            centers: None,
            method,
        }
    }

    /// Store eigenvectors and recompute their centres.
    pub fn set_vectors(&mut self, vectors: Vec<Vec<f64>>) {
        self.centers = Some(vectors.iter().map(|v| localization_center(v)).collect());
        self.eigenvectors = Some(vectors);
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest `‖Hψ - Eψ‖` and largest `|‖ψ‖ - 1|` over stored pairs.
    pub fn max_defects(&self, op: &PeriodicOperator) -> Option<(f64, f64)> {
        let vectors = self.eigenvectors.as_ref()?;
        let mut res = 0.0f64;
        let mut norm = 0.0f64;
        for (v, &e) in vectors.iter().zip(&self.eigenvalues) {
            res = res.max(residual(op, v, e));
            norm = norm.max((v.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs());
        }
        Some((res, norm))
    }

    /// Check sortedness, count, norms and residuals (`1e-8·‖H‖`).
    pub fn validate(&self, op: &PeriodicOperator) -> Result<()> {
        if self.eigenvalues.len() != op.size() {
            return Err(Error::Numerical(format!(
                "{} eigenvalues for an operator of size {}",
                self.eigenvalues.len(),
                op.size()
            )));
        }
        if self.eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Numerical("eigenvalues are not sorted".into()));
        }
        if let Some((res, norm)) = self.max_defects(op) {
            if norm > 1e-12 {
                return Err(Error::Numerical(format!("eigenvector norm defect {norm:e}")));
            }
            if res > 1e-8 * op.scale() {
                return Err(Error::Numerical(format!("eigenpair residual {res:e}")));
            }
        }
        Ok(())
    }
}

/// Eigenvalues only: Sturm bisection at the default tolerance, or the dense
/// solver for periodic operators that fit it.
pub fn spectrum(op: &PeriodicOperator) -> Result<SpectralData> {
    if op.boundary() == Boundary::Periodic && op.size() <= DENSE_LIMIT {
        let values = dense_eigenvalues(op)?;
        return Ok(SpectralData::from_eigenvalues(values, SpectralMethod::Dense));
    }
    eigenvalues_sturm(op, default_tolerance(op))
}
