//! Empirical integrated density of states and its modulus of continuity.

use std::io::Write;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::dyadic::{landing_index, DyadicInterval};
use crate::error::{invalid, Error, Result};
use crate::lattice::DecayProfile;
use crate::spectral::decay::{decay_fit_with, uniform_envelope, DecayRate, RadialProfile};
use crate::spectral::eigvec::{map_eigenpairs, residual, EigenpairOptions};
use crate::spectral::matching::{match_centers, SiteMatching};
use crate::spectral::operator::{PeriodicOperator, PotentialSpec};
use crate::spectral::SpectralData;

/// Half-open energy interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyInterval {
    pub lo: f64,
    pub hi: f64,
}

impl EnergyInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || hi < lo {
            return Err(invalid("interval", format!("need lo <= hi, got [{lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn full() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    /// `ε^{-1} I` for a dyadic interval `I`.
    pub fn rescaled(interval: &DyadicInterval, epsilon: f64) -> Self {
        let (a, b) = interval.bounds_f64();
        Self {
            lo: a / epsilon,
            hi: b / epsilon,
        }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lo <= e && e < self.hi
    }
}

/// Anything that assigns a mass to half-open intervals.
pub trait IntervalMass {
    fn mass(&self, interval: &EnergyInterval) -> f64;
}

/// `k̂(E) = #{i : E_i ≤ E} / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct IDSFunction {
    eigenvalues: Vec<f64>,
}

impl IDSFunction {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(invalid("eigenvalues", "need at least one eigenvalue"));
        }
        if eigenvalues.iter().any(|e| e.is_nan()) || eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("eigenvalues", "eigenvalues must be sorted and finite"));
        }
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `#{E_i < x}`.
    pub fn count_below(&self, x: f64) -> usize {
        self.eigenvalues.partition_point(|&e| e < x)
    }

    pub fn evaluate(&self, e: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v <= e) as f64 / self.size() as f64
    }

    /// Distinct eigenvalues with `k̂` just after each step.
    pub fn step_points(&self) -> Vec<(f64, f64)> {
        let n = self.size() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &e) in self.eigenvalues.iter().enumerate() {
            let k = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = k,
                _ => out.push((e, k)),
            }
        }
        out
    }

    /// CSV with columns `energy,ids`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["energy", "ids"])?;
        for (e, k) in self.step_points() {
            csv.write_record([format!("{e:.16e}"), format!("{k:.16e}")])?;
        }
        csv.flush()?;
        Ok(())
    }
}

impl IntervalMass for IDSFunction {
    fn mass(&self, i: &EnergyInterval) -> f64 {
        (self.count_below(i.hi) - self.count_below(i.lo)) as f64 / self.size() as f64
    }
}

/// Mass of an interval under a cumulative distribution function.
pub struct Cdf<F>(pub F);

impl<F: Fn(f64) -> f64> IntervalMass for Cdf<F> {
    fn mass(&self, i: &EnergyInterval) -> f64 {
        (self.0)(i.hi) - (self.0)(i.lo)
    }
}

pub fn ids_from_spectrum(data: &SpectralData) -> Result<IDSFunction> {
    IDSFunction::new(data.eigenvalues.clone())
}

/// `k̂(b⁻) - k̂(a⁻)`.
pub fn dos_interval_mass(ids: &IDSFunction, interval: &EnergyInterval) -> f64 {
    ids.mass(interval)
}

/// `(1/N) Σ_n Σ_{E_k ∈ I} |ψ_k(n)|²`.
pub fn projection_trace_oracle(data: &SpectralData, interval: &EnergyInterval) -> Result<f64> {
    let n = data.len();
    let vectors = data
        .eigenvectors
        .as_ref()
        .ok_or(Error::IncompleteEigenvectors { have: 0, need: n })?;
    if vectors.len() != n {
        return Err(Error::IncompleteEigenvectors {
            have: vectors.len(),
            need: n,
        });
    }
    let mut sum = 0.0;
    for site in 0..n {
        for (v, &e) in vectors.iter().zip(&data.eigenvalues) {
            if interval.contains(e) {
                sum += v[site] * v[site];
            }
        }
    }
    Ok(sum / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRatio {
    #[serde(rename = "m'")]
    pub level: u32,
    /// `max_j dk̂(ε^{-1}I_{m',j}) / (ε^{-1} 2^{-m'})`.
    pub max_ratio: f64,
    pub argmax_j: u64,
    pub max_mass: f64,
    /// Sum of all interval masses at this level.
    pub total_mass: f64,
    /// `max_ratio / ε`, comparable across couplings.
    pub lambda_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusReport {
    pub levels: Vec<LevelRatio>,
    pub empirical_lipschitz: f64,
    /// `c ε (1 + 1/d)/(1 - 1/d)`; absent without an envelope.
    pub theoretical_bound: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub size: usize,
    pub verdict: Option<Verdict>,
    pub holder_exponent: Option<f64>,
    pub note: String,
}

const FINITE_SCALE_NOTE: &str = "finite-scale certificate: dyadic intervals at the listed levels only; \
below 2^-m the truncated model's IDS is a step function";

/// Allowed excess of the empirical constant over the bound.
pub const VERDICT_SLACK: f64 = 1.1;

impl ModulusReport {
    /// Largest over smallest per-level ratio.
    pub fn level_spread(&self) -> f64 {
        let max = self.levels.iter().map(|l| l.max_ratio).fold(0.0, f64::max);
        let min = self.levels.iter().map(|l| l.max_ratio).fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per level.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([
            "level",
            "max_ratio",
            "argmax_j",
            "max_mass",
            "total_mass",
            "lambda_ratio",
        ])?;
        for l in &self.levels {
            csv.write_record([
                l.level.to_string(),
                format!("{:.16e}", l.max_ratio),
                l.argmax_j.to_string(),
                format!("{:.16e}", l.max_mass),
                format!("{:.16e}", l.total_mass),
                format!("{:.16e}", l.lambda_ratio),
            ])?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Ratio of each level's heaviest rescaled dyadic interval to its length.
pub fn modulus_of_continuity(
    ids: &IDSFunction,
    spec: &PotentialSpec,
    levels: RangeInclusive<u32>,
    envelope: Option<DecayProfile>,
) -> Result<ModulusReport> {
    if levels.is_empty() {
        return Err(invalid("levels", "empty level range"));
    }
    if *levels.end() > spec.depth {
        return Err(invalid(
            "levels",
            format!("level {} exceeds depth {}", levels.end(), spec.depth),
        ));
    }
    let eps = spec.coupling;
    let mut out = Vec::new();
    for level in levels {
        let length = 2f64.powi(-(level as i32)) / eps;
        let mut best = (0.0, 0u64);
        let mut total = 0.0;
        for j in 0..1u64 << level {
            let mass = ids.mass(&EnergyInterval::rescaled(&DyadicInterval::new(level, j)?, eps));
            total += mass;
            if mass > best.0 {
                best = (mass, j);
            }
        }
        let ratio = best.0 / length;
        out.push(LevelRatio {
            level,
            max_ratio: ratio,
            argmax_j: best.1,
            max_mass: best.0,
            total_mass: total,
            lambda_ratio: ratio / eps,
        });
    }
    let empirical = out.iter().map(|l| l.max_ratio).fold(0.0, f64::max);
    let bound = envelope.map(|p| p.c * eps * p.geometric_factor());
    let verdict = bound.map(|b| {
        if empirical <= VERDICT_SLACK * b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    });
    Ok(ModulusReport {
        levels: out,
        empirical_lipschitz: empirical,
        theoretical_bound: bound,
        c: envelope.map(|p| p.c),
        d: envelope.map(|p| p.d),
        epsilon: eps,
        size: ids.size(),
        verdict,
        holder_exponent: None,
        note: FINITE_SCALE_NOTE.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderFit {
    pub exponent: f64,
    /// `(length, max mass)` per scale.
    pub points: Vec<(f64, f64)>,
}

/// Partitions of `[lo, hi)` into `2^l` equal pieces for each level.
pub fn dyadic_family(lo: f64, hi: f64, levels: RangeInclusive<u32>) -> Vec<Vec<EnergyInterval>> {
    levels
        .map(|l| {
            let k = 1u64 << l;
            let h = (hi - lo) / k as f64;
            (0..k)
                .map(|j| EnergyInterval {
                    lo: lo + j as f64 * h,
                    hi: if j + 1 == k { hi } else { lo + (j + 1) as f64 * h },
                })
                .collect()
        })
        .collect()
}

/// Single intervals `[anchor, anchor + len)`, one per scale.
pub fn anchored_family(anchor: f64, lengths: &[f64]) -> Vec<Vec<EnergyInterval>> {
    lengths
        .iter()
        .map(|&len| {
            vec![EnergyInterval {
                lo: anchor,
                hi: anchor + len,
            }]
        })
        .collect()
}

/// Slope of `ln(max mass)` against `ln(length)` over scales.
pub fn holder_probe<M: IntervalMass + ?Sized>(measure: &M, family: &[Vec<EnergyInterval>]) -> Result<HolderFit> {
    if family.len() < 3 {
        return Err(invalid(
            "family",
            format!("need at least 3 scales, got {}", family.len()),
        ));
    }
    let mut points = Vec::new();
    for scale in family {
        let Some(first) = scale.first() else {
            return Err(invalid("family", "empty scale"));
        };
        let max = scale.iter().map(|i| measure.mass(i)).fold(0.0, f64::max);
        if max > 0.0 {
            points.push((first.length(), max));
        }
    }
    if points.len() < 3 {
        return Err(invalid("family", "fewer than 3 scales carry mass"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("family", "all scales have the same length"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(HolderFit {
        exponent: sxy / sxx,
        points,
    })
}

/// Where an eigenvalue is placed before testing membership in `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LandingConvention {
    /// `ε·E`.
    Exact,
    /// `ε·E + 2^{-m-1}`: the centre of the level-`m` cell that `λ^{(m)}` opens.
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandingReport {
    pub level: u32,
    pub index: u64,
    pub landing_index: u64,
    pub expected: usize,
    pub observed: usize,
    /// Sites expected but not observed.
    pub missing: Vec<usize>,
    /// Sites observed but not expected.
    pub extra: Vec<usize>,
    pub symmetric_difference: usize,
}

/// Compare the centres of eigenvectors with eigenvalue in `ε^{-1}I` against
/// the residue class `landing_index(I) + 2^{level}ℤ`.
pub fn landing_verification(
    eigenvalues: &[f64],
    centers: &[usize],
    spec: &PotentialSpec,
    interval: &DyadicInterval,
    convention: LandingConvention,
) -> Result<LandingReport> {
    let n = eigenvalues.len();
    if centers.len() != n {
        return Err(Error::IncompleteEigenvectors {
            have: centers.len(),
            need: n,
        });
    }
    let level = interval.level();
    if level > spec.depth {
        return Err(invalid(
            "interval",
            format!("level {level} exceeds depth {}", spec.depth),
        ));
    }
    let ell = landing_index(level, interval.index())? as i64;
    let period = 1i64 << level;
    // Compare in energy units, as the modulus scan does.
    let window = EnergyInterval::rescaled(interval, spec.coupling);
    let shift = match convention {
        LandingConvention::Exact => 0.0,
        LandingConvention::Midpoint => 2f64.powi(-(spec.depth as i32) - 1) / spec.coupling,
    };
    let mut observed = vec![false; n];
    for (&e, &c) in eigenvalues.iter().zip(centers) {
        if window.contains(e + shift) && c < n {
            observed[c] = true;
        }
    }
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    let mut expected_count = 0;
    for (site, &obs) in observed.iter().enumerate() {
        let expected = (site as i64 + spec.offset - ell).rem_euclid(period) == 0;
        expected_count += usize::from(expected);
        match (expected, obs) {
            (true, false) => missing.push(site),
            (false, true) => extra.push(site),
            _ => {}
        }
    }
    Ok(LandingReport {
        level,
        index: interval.index(),
        landing_index: ell as u64,
        expected: expected_count,
        observed: observed.iter().filter(|&&o| o).count(),
        symmetric_difference: missing.len() + extra.len(),
        missing,
        extra,
    })
}

/// Decay data for one eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorDecay {
    pub index: usize,
    pub site: usize,
    pub eigenvalue: f64,
    /// Bound-minimising envelope.
    pub c: f64,
    pub d: f64,
    /// Smallest prefactor at the reference base.
    pub c_at_reference: f64,
    pub residual: f64,
}

/// Site matching plus certified decay envelopes for every eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub matching: SiteMatching,
    pub vectors: Vec<VectorDecay>,
    pub reference_base: f64,
    pub bulk_margin: usize,
    /// One envelope valid for every bulk vector.
    pub envelope: DecayProfile,
    pub max_residual: f64,
    pub max_norm_defect: f64,
}

impl DecayCertificate {
    pub fn is_bulk(&self, site: usize) -> bool {
        site >= self.bulk_margin && site + self.bulk_margin < self.vectors.len()
    }

    pub fn bulk(&self) -> impl Iterator<Item = &VectorDecay> {
        self.vectors.iter().filter(|v| self.is_bulk(v.site))
    }
}

/// Compute every eigenvector of `op`, match it to its site and certify its
/// decay. Vectors are discarded after use.
pub fn certify_decay(
    op: &PeriodicOperator,
    spec: &PotentialSpec,
    eigenvalues: &[f64],
    bulk_margin: usize,
    reference_base: f64,
) -> Result<DecayCertificate> {
    let n = op.size();
    if 2 * bulk_margin >= n {
        return Err(invalid(
            "bulk_margin",
            format!("margin {bulk_margin} leaves no bulk in N = {n}"),
        ));
    }
    let per_vector = map_eigenpairs(op, eigenvalues, &EigenpairOptions::default(), |p| {
        let profile = RadialProfile::new(p.vector, p.center)?;
        let fit = decay_fit_with(p.vector, p.center, DecayRate::MinimizeBound)?;
        let norm = p.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        let vd = VectorDecay {
            index: p.index,
            site: p.center,
            eigenvalue: p.value,
            c: fit.profile.c,
            d: fit.profile.d,
            c_at_reference: profile.prefactor(reference_base),
            residual: residual(op, p.vector, p.value),
        };
        Ok::<_, Error>((vd, profile, (norm - 1.0).abs()))
    })?;
    let mut vectors = Vec::with_capacity(n);
    let mut profiles = Vec::with_capacity(n);
    let mut max_norm_defect = 0.0f64;
    for item in per_vector {
        let (vd, profile, nd) = item?;
        max_norm_defect = max_norm_defect.max(nd);
        vectors.push(vd);
        profiles.push(profile);
    }
    let centers: Vec<usize> = vectors.iter().map(|v| v.site).collect();
    let matching = match_centers(eigenvalues, &centers, spec)?;
    let bulk: Vec<RadialProfile> = profiles
        .into_iter()
        .filter(|p| p.center() >= bulk_margin && p.center() + bulk_margin < n)
        .collect();
    let envelope = uniform_envelope(&bulk)?;
    let max_residual = vectors.iter().map(|v| v.residual).fold(0.0, f64::max);
    Ok(DecayCertificate {
        matching,
        vectors,
        reference_base,
        bulk_margin,
        envelope,
        max_residual,
        max_norm_defect,
    })
}
