use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DistalSequence, MAX_DEPTH};
use crate::error::{invalid, Error, Result};

/// Largest coupling for which perturbative defects `64 ε²` stay below the
/// level-`m` grid spacing `2^{-m}`: `ε_valid(m) = 2^{-(m+6)/2}`.
pub fn epsilon_valid(depth: u32) -> f64 {
    2f64.powf(-(depth as f64 + 6.0) / 2.0)
}

/// `V = λ^{(m)}(· + offset)` at coupling `ε`, i.e. `H = Δ + ε^{-1} V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub depth: u32,
    pub coupling: f64,
    pub offset: i64,
    /// Set when the caller accepted `ε > ε_valid(depth)`.
    pub overridden: bool,
}

impl PotentialSpec {
    /// Rejects couplings above `ε_valid(depth)`.
    pub fn new(depth: u32, coupling: f64) -> Result<Self> {
        let spec = Self::unchecked(depth, coupling)?;
        if !spec.is_valid() {
            return Err(invalid(
                "epsilon",
                format!(
                    "ε = {coupling} exceeds ε_valid({depth}) = {}; pass an override to proceed",
                    epsilon_valid(depth)
                ),
            ));
        }
        Ok(spec)
    }

    /// Accepts any positive coupling, logging a warning above `ε_valid`.
    pub fn with_override(depth: u32, coupling: f64) -> Result<Self> {
        let mut spec = Self::unchecked(depth, coupling)?;
        if !spec.is_valid() {
            log::warn!(
                "ε = {coupling} exceeds ε_valid({depth}) = {}; eigenvalue defects may cross dyadic boundaries",
                epsilon_valid(depth)
            );
            spec.overridden = true;
        }
        Ok(spec)
    }

    /// The largest valid coupling for `depth`.
    pub fn at_valid_coupling(depth: u32) -> Result<Self> {
        Self::new(depth, epsilon_valid(depth))
    }

    fn unchecked(depth: u32, coupling: f64) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(invalid("depth", format!("must lie in 1..={MAX_DEPTH}, got {depth}")));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(invalid("epsilon", format!("must be positive, got {coupling}")));
        }
        Ok(Self {
            depth,
            coupling,
            offset: 0,
            overridden: false,
        })
    }

    pub fn with_offset(mut self, offset: i64) -> Self {
        self.offset = offset;
        self
    }

    pub fn is_valid(&self) -> bool {
        self.coupling <= epsilon_valid(self.depth)
    }

    pub fn sequence(&self) -> DistalSequence {
        DistalSequence::new(self.depth).expect("depth validated at construction")
    }

    /// `λ^{(m)}_{site + offset}` as a float.
    pub fn lambda_at(&self, site: usize) -> f64 {
        self.sequence().value(site as i64 + self.offset).to_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Dirichlet => "dirichlet",
            Boundary::Periodic => "periodic",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(invalid(
                "boundary",
                format!("expected `dirichlet` or `periodic`, got `{other}`"),
            )),
        }
    }
}

/// `(Hψ)(n) = t ψ(n+1) + t ψ(n-1) + v_n ψ(n)` on `N` sites.
///
/// Under Dirichlet truncation the matrix is tridiagonal; under periodic
/// boundary the corners `(0, N-1)` carry the hopping as well. On two
/// periodic sites both neighbours coincide, so the coupling is `2t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOperator {
    diagonal: Vec<f64>,
    hopping: f64,
    boundary: Boundary,
}

impl PeriodicOperator {
    pub fn new(diagonal: Vec<f64>, hopping: f64, boundary: Boundary) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(invalid("N", "operator needs at least one site"));
        }
        if boundary == Boundary::Periodic && diagonal.len() < 2 {
            return Err(invalid("N", "periodic boundary needs at least two sites"));
        }
        if !hopping.is_finite() || diagonal.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("operator has non-finite entries".into()));
        }
        Ok(Self {
            diagonal,
            hopping,
            boundary,
        })
    }

    /// The discrete Laplacian alone, `V = 0`.
    pub fn free(size: usize, boundary: Boundary) -> Result<Self> {
        if size < 2 {
            return Err(invalid("N", format!("need N >= 2, got {size}")));
        }
        Self::new(vec![0.0; size], 1.0, boundary)
    }

    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Same diagonal, hopping removed.
    pub fn without_hopping(&self) -> Self {
        Self {
            diagonal: self.diagonal.clone(),
            hopping: 0.0,
            boundary: self.boundary,
        }
    }

    /// Leading `k × k` block of a Dirichlet operator.
    pub fn leading_block(&self, k: usize) -> Result<Self> {
        if self.boundary != Boundary::Dirichlet {
            return Err(invalid("boundary", "leading blocks are taken from Dirichlet operators"));
        }
        if k == 0 || k > self.size() {
            return Err(invalid("k", format!("block size {k} outside 1..={}", self.size())));
        }
        Self::new(self.diagonal[..k].to_vec(), self.hopping, Boundary::Dirichlet)
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let radius = match (self.boundary, self.size()) {
            (_, 1) => 0.0,
            (Boundary::Dirichlet, 2) => self.hopping.abs(),
            _ => 2.0 * self.hopping.abs(),
        };
        let lo = self.diagonal.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.diagonal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo - radius, hi + radius)
    }

    /// `max |v_n| + 2|t|`, an upper bound for `‖H‖`.
    pub fn scale(&self) -> f64 {
        let vmax = self.diagonal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (vmax + 2.0 * self.hopping.abs()).max(f64::MIN_POSITIVE)
    }

    /// Coupling between sites 0 and N-1 on top of the tridiagonal part.
    pub(crate) fn corner(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.hopping,
            Boundary::Dirichlet => 0.0,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(x.len(), n, "vector length must match operator size");
        let t = self.hopping;
        let mut y: Vec<f64> = self.diagonal.iter().zip(x).map(|(v, xi)| v * xi).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += t * x[i + 1];
            y[i + 1] += t * x[i];
        }
        if self.boundary == Boundary::Periodic {
            y[0] += t * x[n - 1];
            y[n - 1] += t * x[0];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal));
        for i in 0..n.saturating_sub(1) {
            m[(i, i + 1)] += self.hopping;
            m[(i + 1, i)] += self.hopping;
        }
        if self.boundary == Boundary::Periodic {
            m[(0, n - 1)] += self.hopping;
            m[(n - 1, 0)] += self.hopping;
        }
        m
    }
}

/// Assemble `H = Δ + ε^{-1} λ^{(m)}` on `N` sites.
pub fn build_operator(spec: &PotentialSpec, size: usize, boundary: Boundary) -> Result<PeriodicOperator> {
    if size < 2 {
        return Err(invalid("N", format!("need N >= 2, got {size}")));
    }
    if !spec.is_valid() {
        log::warn!(
            "building operator at ε = {} above ε_valid({}) = {}",
            spec.coupling,
            spec.depth,
            epsilon_valid(spec.depth)
        );
    }
    let period = 1usize << spec.depth.min(62);
    if !size.is_multiple_of(period) {
        log::debug!("N = {size} is not a multiple of the potential period 2^{}", spec.depth);
    }
    let seq = spec.sequence();
    // Divide rather than multiply by 1/ε so entries equal rescaled interval
    // endpoints bit for bit.
    let diagonal = (0..size)
        .map(|n| seq.value(n as i64 + spec.offset).to_f64() / spec.coupling)
        .collect();
    PeriodicOperator::new(diagonal, 1.0, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_diagonal() {
        let spec = PotentialSpec::with_override(1, 1.0).unwrap();
        let op = build_operator(&spec, 4, Boundary::Dirichlet).unwrap();
        assert_eq!(op.diagonal(), &[0.0, 0.5, 0.0, 0.5]);
    }

    #[test]
    fn depth_two_diagonal() {
        let spec = PotentialSpec::with_override(2, 0.125).unwrap();
        let op = build_operator(&spec, 8, Boundary::Dirichlet).unwrap();
        let expected: Vec<f64> = [0.25, 0.75, 0.0, 0.5, 0.25, 0.75, 0.0, 0.5]
            .iter()
            .map(|v| 8.0 * v)
            .collect();
        assert_eq!(op.diagonal(), expected.as_slice());
    }

    #[test]
    fn periodic_hopping_row_sums_are_two() {
        for n in [2usize, 3, 5, 16] {
            let op = PeriodicOperator::free(n, Boundary::Periodic).unwrap();
            let ones = vec![1.0; n];
            assert!(op.apply(&ones).iter().all(|&v| (v - 2.0).abs() < 1e-15), "n={n}");
            let dense = op.to_dense();
            for i in 0..n {
                assert!((dense.row(i).sum() - 2.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn validity_rule() {
        assert_eq!(epsilon_valid(8), 2f64.powi(-7));
        assert_eq!(epsilon_valid(4), 2f64.powi(-5));
        for m in 1..30 {
            assert!(64.0 * epsilon_valid(m).powi(2) <= 2f64.powi(-(m as i32)) * (1.0 + 1e-12));
        }
        assert!(PotentialSpec::new(4, 0.1).is_err());
        let over = PotentialSpec::with_override(4, 0.1).unwrap();
        assert!(over.overridden && !over.is_valid());
        assert!(PotentialSpec::new(4, 0.0).is_err());
        assert!(PotentialSpec::new(0, 0.01).is_err());
    }

    #[test]
    fn rejects_tiny_operators() {
        let spec = PotentialSpec::at_valid_coupling(3).unwrap();
        assert!(build_operator(&spec, 1, Boundary::Dirichlet).is_err());
        assert!(PeriodicOperator::new(vec![1.0], 1.0, Boundary::Periodic).is_err());
        assert!(PeriodicOperator::new(vec![f64::NAN, 1.0], 1.0, Boundary::Dirichlet).is_err());
    }

    #[test]
    fn boundary_parsing() {
        assert_eq!("periodic".parse::<Boundary>().unwrap(), Boundary::Periodic);
        assert!("open".parse::<Boundary>().is_err());
    }
}
