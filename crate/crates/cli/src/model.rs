use std::path::Path;

use clap::Args;
use lpdos::spectral::cache::{load_or_compute, CacheKey};
use lpdos::spectral::{
    build_operator, epsilon_valid, spectrum, Boundary, PeriodicOperator, PotentialSpec, SpectralData,
};

use crate::Failure;

/// Flags shared by every command that builds an operator.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(short = 'm', long = "depth")]
    pub depth: u32,
    /// Coupling ε; defaults to ε_valid(m) = 2^{-(m+6)/2}.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(short = 'N', long = "size")]
    pub size: usize,
    #[arg(long, default_value = "dirichlet")]
    pub boundary: Boundary,
    /// Accept ε above ε_valid(m).
    #[arg(long)]
    pub override_epsilon: bool,
    /// Switch the potential off (ε still rescales energies).
    #[arg(long)]
    pub free: bool,
    /// Site offset of the potential.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub offset: i64,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<PotentialSpec, Failure> {
        let eps = self.epsilon.unwrap_or_else(|| epsilon_valid(self.depth));
        let spec = if self.override_epsilon || self.free {
            PotentialSpec::with_override(self.depth, eps)?
        } else {
            if !(eps > 0.0 && eps <= epsilon_valid(self.depth)) {
                return Err(Failure::Usage(format!(
                    "ε = {eps} is outside (0, ε_valid({}) = {}]; use --override-epsilon to run anyway",
                    self.depth,
                    epsilon_valid(self.depth)
                )));
            }
            PotentialSpec::new(self.depth, eps)?
        };
        if !self.size.is_multiple_of(1usize << self.depth.min(62)) && !self.free {
            log::warn!(
                "N = {} is not a multiple of 2^{}; boundary effects are not periodic-aligned",
                self.size,
                self.depth
            );
        }
        Ok(spec.with_offset(self.offset))
    }

    pub fn operator(&self, spec: &PotentialSpec) -> Result<PeriodicOperator, Failure> {
        Ok(if self.free {
            PeriodicOperator::free(self.size, self.boundary)?
        } else {
            build_operator(spec, self.size, self.boundary)?
        })
    }

    pub fn cache_key(&self, spec: &PotentialSpec) -> CacheKey {
        CacheKey {
            depth: spec.depth,
            epsilon: spec.coupling,
            size: self.size,
            boundary: self.boundary,
            offset: spec.offset,
            free: self.free,
        }
    }

    /// Eigenvalues, read from the cache when one is configured.
    pub fn eigenvalues(
        &self,
        spec: &PotentialSpec,
        op: &PeriodicOperator,
        cache: Option<&Path>,
    ) -> Result<SpectralData, Failure> {
        let Some(dir) = cache else {
            return Ok(spectrum(op)?);
        };
        let (data, hit) = load_or_compute(dir, &self.cache_key(spec), false, || spectrum(op))?;
        log::info!("spectrum cache {}", if hit { "hit" } else { "miss" });
        Ok(data)
    }
}

/// `a..b`, `a..=b`, `a-b`, or `b` for `1..=b`.
pub fn parse_levels(s: &str) -> Result<(u32, u32), String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad level `{t}`: {e}"));
    let (lo, hi) = if let Some((a, b)) = s.split_once("..=") {
        (parse(a)?, parse(b)?)
    } else if let Some((a, b)) = s.split_once("..") {
        (parse(a)?, parse(b)?)
    } else if let Some((a, b)) = s.split_once('-') {
        (parse(a)?, parse(b)?)
    } else {
        (1, parse(s)?)
    };
    if lo == 0 || lo > hi {
        return Err(format!("levels must satisfy 1 <= lo <= hi, got {lo}..{hi}"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("8"), Ok((1, 8)));
        assert_eq!(parse_levels("2..5"), Ok((2, 5)));
        assert_eq!(parse_levels("2..=5"), Ok((2, 5)));
        assert_eq!(parse_levels("3-4"), Ok((3, 4)));
        assert!(parse_levels("0..3").is_err());
        assert!(parse_levels("5..3").is_err());
        assert!(parse_levels("x").is_err());
    }
}
