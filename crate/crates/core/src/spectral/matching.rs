//! Localization centres and the eigenvalue-to-site matching.

use serde::Serialize;

use super::operator::PotentialSpec;
use super::SpectralData;
use crate::error::{invalid, Error, Result};

/// Smallest index attaining `max |ψ(n)|²`.
pub fn localization_center(psi: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &x) in psi.iter().enumerate() {
        let p = x * x;
        if p > best_val {
            best = i;
            best_val = p;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SiteMatch {
    pub index: usize,
    pub site: usize,
    pub eigenvalue: f64,
    /// `λ^{(m)}_{site + offset}`.
    pub lambda: f64,
    /// `|ε·E - λ|`.
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteMatching {
    pub matches: Vec<SiteMatch>,
    pub max_defect: f64,
}

impl SiteMatching {
    /// Largest defect over sites at least `margin` away from both ends.
    pub fn max_defect_bulk(&self, size: usize, margin: usize) -> f64 {
        self.matches
            .iter()
            .filter(|m| m.site >= margin && m.site + margin < size)
            .map(|m| m.defect)
            .fold(0.0, f64::max)
    }

    /// Eigenvalue index for every site.
    pub fn by_site(&self) -> Vec<usize> {
        let mut out = vec![0; self.matches.len()];
        for m in &self.matches {
            out[m.site] = m.index;
        }
        out
    }
}

/// Match eigenvalues to sites through their centres.
pub fn match_centers(eigenvalues: &[f64], centers: &[usize], spec: &PotentialSpec) -> Result<SiteMatching> {
    let n = eigenvalues.len();
    if centers.len() != n {
        return Err(Error::IncompleteEigenvectors {
            have: centers.len(),
            need: n,
        });
    }
    let mut seen = vec![false; n];
    let mut duplicates = 0;
    for &c in centers {
        if c >= n {
            return Err(invalid("centers", format!("centre {c} outside [0, {n})")));
        }
        if std::mem::replace(&mut seen[c], true) {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        return Err(Error::NotBijective { duplicates });
    }
    let seq = spec.sequence();
    let matches: Vec<SiteMatch> = eigenvalues
        .iter()
        .zip(centers)
        .enumerate()
        .map(|(index, (&eigenvalue, &site))| {
            let lambda = seq.value(site as i64 + spec.offset).to_f64();
            SiteMatch {
                index,
                site,
                eigenvalue,
                lambda,
                defect: (spec.coupling * eigenvalue - lambda).abs(),
            }
        })
        .collect();
    let max_defect = matches.iter().map(|m| m.defect).fold(0.0, f64::max);
    Ok(SiteMatching { matches, max_defect })
}

/// Match each eigenvalue of `data` to the centre of its eigenvector.
pub fn eigenvalue_site_matching(data: &SpectralData, spec: &PotentialSpec) -> Result<SiteMatching> {
    let centers = data.centers.as_ref().ok_or(Error::IncompleteEigenvectors {
        have: 0,
        need: data.len(),
    })?;
    match_centers(&data.eigenvalues, centers, spec)
}
