//! Certified exponential envelopes `|ψ(n)|² ≤ c·d^{-|n - center|}`.
//!
//! For a fixed base `d` the smallest admissible prefactor is
//! `c(d) = max_n |ψ(n)|² d^{|n - center|}`. Only the upper convex hull of
//! the points `(t, ln P(t))`, with `P(t)` the larger of the two values at
//! distance `t`, can attain that maximum, so it is all we keep.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice::{DecayProfile, MIN_DECAY_BASE};

/// Cap on the decay base, reached by vectors supported on a single site.
pub const MAX_DECAY_BASE: f64 = 1e6;

/// Sites with `|ψ(n)|²` at or below this are ignored by the slope fit.
pub const FIT_FLOOR: f64 = 1e-14;

/// Upper hull of `(|n - center|, ln |ψ(n)|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    center: usize,
    hull: Vec<(f64, f64)>,
}

impl RadialProfile {
    pub fn new(psi: &[f64], center: usize) -> Result<Self> {
        if center >= psi.len() {
            return Err(invalid("center", format!("centre {center} outside [0, {})", psi.len())));
        }
        let reach = center.max(psi.len() - 1 - center);
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for t in 0..=reach {
            let left = center.checked_sub(t).map_or(0.0, |i| psi[i] * psi[i]);
            let right = psi.get(center + t).map_or(0.0, |x| x * x);
            let p = left.max(right);
            if !(p > 0.0) {
                continue;
            }
            let pt = (t as f64, p.ln());
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // Drop the middle point unless it lies strictly above the chord.
                if (y2 - y1) * (pt.0 - x1) <= (pt.1 - y1) * (x2 - x1) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        if hull.is_empty() {
            return Err(invalid("psi", "vector is identically zero"));
        }
        Ok(Self { center, hull })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// `ln c(d)` for `d = e^u`.
    pub fn log_prefactor(&self, u: f64) -> f64 {
        self.hull
            .iter()
            .map(|&(t, y)| y + t * u)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest `c` with `|ψ(n)|² ≤ c d^{-|n - center|}` everywhere.
    pub fn prefactor(&self, d: f64) -> f64 {
        self.log_prefactor(d.ln()).exp()
    }
}

/// How the decay base is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayRate {
    /// Least-squares slope of `ln |ψ(n)|²` against `|n - center|`.
    LeastSquares,
    Fixed(f64),
    /// Minimise `c(d)·(1 + 1/d)/(1 - 1/d)`.
    MinimizeBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub profile: DecayProfile,
    pub center: usize,
    /// RMS gap between `ln` of the envelope and `ln |ψ(n)|²` on fitted sites.
    pub residual: f64,
}

/// `ln((1 + e^{-u}) / (1 - e^{-u}))`.
fn log_geometric_factor(u: f64) -> f64 {
    (1.0 + 2.0 / u.exp_m1()).ln()
}

/// Minimise a convex function of `u = ln d` over the admissible bases.
fn golden_min(f: impl Fn(f64) -> f64) -> f64 {
    let mut a = MIN_DECAY_BASE.ln().max(1e-8);
    let mut b = MAX_DECAY_BASE.ln();
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

fn least_squares_base(psi: &[f64], center: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = psi
        .iter()
        .enumerate()
        .filter(|(_, x)| *x * *x > FIT_FLOOR)
        .map(|(n, x)| (n.abs_diff(center) as f64, (x * x).ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx == 0.0 {
        return Ok(MAX_DECAY_BASE);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let d = (-sxy / sxx).exp();
    if !(d > 1.0) {
        return Err(Error::NotLocalized(d));
    }
    Ok(d.min(MAX_DECAY_BASE))
}

/// Envelope with the least-squares base.
pub fn decay_fit(psi: &[f64], center: usize) -> Result<DecayFit> {
    decay_fit_with(psi, center, DecayRate::LeastSquares)
}

pub fn decay_fit_with(psi: &[f64], center: usize, rate: DecayRate) -> Result<DecayFit> {
    let norm2: f64 = psi.iter().map(|x| x * x).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-8 {
        return Err(invalid(
            "psi",
            format!("expected a unit vector, norm is {}", norm2.sqrt()),
        ));
    }
    let profile = RadialProfile::new(psi, center)?;
    let d = match rate {
        DecayRate::LeastSquares => least_squares_base(psi, center)?,
        DecayRate::Fixed(d) => {
            if !(d > 1.0) {
                return Err(Error::NotLocalized(d));
            }
            d
        }
        DecayRate::MinimizeBound => golden_min(|u| profile.log_prefactor(u) + log_geometric_factor(u)).exp(),
    };
    let ln_c = profile.log_prefactor(d.ln());
    let ln_d = d.ln();
    let gaps: Vec<f64> = psi
        .iter()
        .enumerate()
        .filter(|(_, x)| *x * *x > FIT_FLOOR)
        .map(|(n, x)| ln_c - n.abs_diff(center) as f64 * ln_d - (x * x).ln())
        .collect();
    let residual = (gaps.iter().map(|g| g * g).sum::<f64>() / gaps.len().max(1) as f64).sqrt();
    Ok(DecayFit {
        profile: DecayProfile::new(ln_c.exp(), d)?,
        center,
        residual,
    })
}

/// One `(c, d)` valid for every profile, with `d` minimising
/// `max_k c_k(d)·(1 + 1/d)/(1 - 1/d)`.
pub fn uniform_envelope(profiles: &[RadialProfile]) -> Result<DecayProfile> {
    if profiles.is_empty() {
        return Err(invalid("profiles", "need at least one profile"));
    }
    let worst = |u: f64| {
        profiles
            .iter()
            .map(|p| p.log_prefactor(u))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let u = golden_min(|u| worst(u) + log_geometric_factor(u));
    DecayProfile::new(worst(u).exp(), u.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normalized(mut v: Vec<f64>) -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        v
    }

    #[test]
    fn delta_vector() {
        let mut v = vec![0.0; 9];
        v[4] = 1.0;
        let fit = decay_fit(&v, 4).unwrap();
        assert_eq!(fit.profile.d, MAX_DECAY_BASE);
        assert_eq!(fit.profile.c, 1.0);
        for d in [1.01, 2.0, 50.0] {
            assert_eq!(RadialProfile::new(&v, 4).unwrap().prefactor(d), 1.0);
        }
    }

    #[test]
    fn geometric_vector() {
        let k = 20usize;
        let v = normalized((0..41).map(|n| 2f64.powf(-(n as f64 - k as f64).abs() / 2.0)).collect());
        let fit = decay_fit(&v, k).unwrap();
        assert!((fit.profile.d - 2.0).abs() < 0.1, "{}", fit.profile.d);
        let norm = 1.0 + 2.0 * (1.0 - 0.5f64.powi(20));
        assert!(
            (fit.profile.c - 1.0 / norm).abs() < 1e-6 * fit.profile.c,
            "{}",
            fit.profile.c
        );
    }

    #[test]
    fn envelope_dominates_every_site() {
        let v = normalized((0..30).map(|n| ((n * 37 % 11) as f64 - 4.0) * 0.8f64.powi(n)).collect());
        let c = crate::spectral::localization_center(&v);
        for rate in [DecayRate::LeastSquares, DecayRate::MinimizeBound, DecayRate::Fixed(1.3)] {
            let Ok(fit) = decay_fit_with(&v, c, rate) else { continue };
            for (n, x) in v.iter().enumerate() {
                assert!(fit.profile.at(n.abs_diff(c) as u64) * (1.0 + 1e-12) >= x * x);
            }
        }
    }

    #[test]
    fn growing_vector_rejected() {
        let v = normalized((0..10).map(|n| 1.5f64.powi(n)).collect());
        assert!(matches!(decay_fit(&v, 0), Err(Error::NotLocalized(_))));
    }

    #[test]
    fn bound_minimiser_beats_grid() {
        let v = normalized((0..61).map(|n| 0.6f64.powf((n as f64 - 30.0).abs()) + 1e-9).collect());
        let p = RadialProfile::new(&v, 30).unwrap();
        let fit = decay_fit_with(&v, 30, DecayRate::MinimizeBound).unwrap();
        let best = fit.profile.c * fit.profile.geometric_factor();
        for i in 1..400 {
            let d = 1.0 + i as f64 * 0.01;
            let g = (1.0 + 1.0 / d) / (1.0 - 1.0 / d);
            assert!(best <= p.prefactor(d) * g * (1.0 + 1e-9));
        }
    }

    #[test]
    fn uniform_envelope_covers_all() {
        let a = normalized((0..20).map(|n| 0.5f64.powf((n as f64 - 5.0).abs())).collect());
        let b = normalized((0..20).map(|n| 0.7f64.powf((n as f64 - 12.0).abs())).collect());
        let pa = RadialProfile::new(&a, 5).unwrap();
        let pb = RadialProfile::new(&b, 12).unwrap();
        let env = uniform_envelope(&[pa.clone(), pb.clone()]).unwrap();
        assert!(env.c >= pa.prefactor(env.d) * (1.0 - 1e-12));
        assert!(env.c >= pb.prefactor(env.d) * (1.0 - 1e-12));
    }
}
