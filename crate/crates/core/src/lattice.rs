//! Geometric lattice sums `Σ_j d^{-|x - jΔ|}` and their Cesàro averages.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Below this the closed form divides by `1 - d^{-Δ} ≈ 0`.
pub const MIN_DECAY_BASE: f64 = 1.0 + 1e-9;

/// Envelope `|ψ(n)|² ≤ c·d^{-|n - center|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayProfile {
    pub c: f64,
    pub d: f64,
}

impl DecayProfile {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(invalid("c", format!("prefactor must be positive, got {c}")));
        }
        if !(d > 1.0) {
            return Err(invalid("d", format!("decay base must exceed 1, got {d}")));
        }
        Ok(Self { c, d })
    }

    pub fn at(&self, distance: u64) -> f64 {
        // Log space: `d^{-t}` alone underflows long before the product does.
        (self.c.ln() - distance as f64 * self.d.ln()).exp()
    }

    /// `(1 + d^{-1}) / (1 - d^{-1})`.
    pub fn geometric_factor(&self) -> f64 {
        let q = self.d.recip();
        (1.0 + q) / (1.0 - q)
    }
}

fn check_base(d: f64) -> Result<()> {
    if !(d >= MIN_DECAY_BASE) || !d.is_finite() {
        return Err(invalid(
            "d",
            format!("decay base must be finite and >= 1 + 1e-9, got {d}"),
        ));
    }
    Ok(())
}

fn check_spacing(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid("delta", format!("spacing must be positive, got {delta}")));
    }
    Ok(())
}

/// `dist(x, Δℤ)` with a floored modulus.
pub fn lattice_distance(delta: f64, x: f64) -> f64 {
    let r = x.rem_euclid(delta);
    r.min(delta - r)
}

/// `Σ_{j∈ℤ} d^{-|x - jΔ|} = (d^{-s} + d^{-(Δ-s)}) / (1 - d^{-Δ})`, `s = dist(x, Δℤ)`.
pub fn lattice_sum_closed(d: f64, delta: f64, x: f64) -> Result<f64> {
    check_base(d)?;
    check_spacing(delta)?;
    let s = lattice_distance(delta, x);
    let ln_d = d.ln();
    let num = (-s * ln_d).exp() + (-(delta - s) * ln_d).exp();
    Ok(num / -(-delta * ln_d).exp_m1())
}

/// `Σ_{|j| ≤ J} d^{-|x - jΔ|}`.
pub fn lattice_sum_bruteforce(d: f64, delta: f64, x: f64, radius: u32) -> Result<f64> {
    if radius == 0 {
        return Err(invalid("J", "truncation radius must be >= 1"));
    }
    check_base(d)?;
    check_spacing(delta)?;
    let j_max = radius as i64;
    // Smallest terms first.
    let mut terms: Vec<f64> = (-j_max..=j_max)
        .map(|j| d.powf(-(x - j as f64 * delta).abs()))
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum())
}

/// Tail bound `2 d^{-(JΔ - |x|)} / (1 - d^{-Δ})` for [`lattice_sum_bruteforce`].
pub fn bruteforce_tail_bound(d: f64, delta: f64, x: f64, radius: u32) -> f64 {
    2.0 * d.powf(-(radius as f64 * delta - x.abs())) / (1.0 - d.powf(-delta))
}

/// `2^{-m} (1 + d^{-1}) / (1 - d^{-1})`.
pub fn average_limit_closed(d: f64, m: u32) -> Result<f64> {
    check_base(d)?;
    if m == 0 || m > 62 {
        return Err(invalid("m", format!("need 1 <= m <= 62, got {m}")));
    }
    let q = d.recip();
    Ok(2f64.powi(-(m as i32)) * (1.0 + q) / (1.0 - q))
}

/// `(1/N) Σ_{n<N} Σ_{j∈ℤ} d^{-|n - ℓ - j 2^m|}`.
pub fn average_bruteforce(d: f64, m: u32, ell: i64, n_sites: u64) -> Result<f64> {
    if n_sites == 0 {
        return Err(invalid("N", "need N >= 1"));
    }
    if m == 0 || m > 62 {
        return Err(invalid("m", format!("need 1 <= m <= 62, got {m}")));
    }
    let delta = 2f64.powi(m as i32);
    // Neumaier summation over every site.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 0..n_sites {
        let v = lattice_sum_closed(d, delta, n as f64 - ell as f64)?;
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    Ok((sum + comp) / n_sites as f64)
}

/// `Σ_{n=0}^{2^m - 1} φ(n)`, one period of the summand.
pub fn period_sum(d: f64, m: u32, ell: i64) -> Result<f64> {
    let p = 1u64 << m;
    Ok(average_bruteforce(d, m, ell, p)? * p as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert!((lattice_sum_closed(2.0, 1.0, 0.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((lattice_sum_closed(2.0, 2.0, 1.0).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        let e = std::f64::consts::E;
        let closed = lattice_sum_closed(e, 3.0, 0.7).unwrap();
        let brute = lattice_sum_bruteforce(e, 3.0, 0.7, 200).unwrap();
        assert!((closed - brute).abs() < 1e-13 * closed);
    }

    #[test]
    fn bruteforce_examples() {
        assert!((lattice_sum_bruteforce(2.0, 1.0, 0.0, 60).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(lattice_sum_bruteforce(2.0, 1.0, 0.0, 1).unwrap(), 2.0);
        let mut prev = 0.0;
        for radius in 1..40 {
            let v = lattice_sum_bruteforce(1.7, 0.6, -2.3, radius).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(lattice_sum_bruteforce(2.0, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(lattice_sum_closed(1.0, 1.0, 0.0).is_err());
        assert!(lattice_sum_closed(1.0 + 1e-12, 1.0, 0.0).is_err());
        assert!(lattice_sum_closed(2.0, 0.0, 0.0).is_err());
        assert!(lattice_sum_closed(2.0, -1.0, 0.0).is_err());
        assert!(average_limit_closed(0.5, 3).is_err());
    }

    #[test]
    fn negative_x_uses_floored_distance() {
        assert!((lattice_distance(4.0, -1.0) - 1.0).abs() < 1e-15);
        assert!((lattice_distance(4.0, -3.0) - 1.0).abs() < 1e-15);
        let a = lattice_sum_closed(3.0, 4.0, -1.0).unwrap();
        let b = lattice_sum_closed(3.0, 4.0, 1.0).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn average_examples() {
        assert!((average_limit_closed(2.0, 1).unwrap() - 1.5).abs() < 1e-15);
        assert!((average_limit_closed(3.0, 4).unwrap() - 0.125).abs() < 1e-15);
        assert!((average_bruteforce(2.0, 1, 0, 2).unwrap() - 1.5).abs() < 1e-14);
        let lim = average_limit_closed(2.0, 3).unwrap();
        assert!((average_bruteforce(2.0, 3, 0, 1 << 10).unwrap() - lim).abs() < 1e-10);
        let n = (1u64 << 10) + 1;
        let off = (average_bruteforce(2.0, 3, 0, n).unwrap() - lim).abs();
        assert!(off <= 0.125 * 6.0 / n as f64, "{off}");
    }

    #[test]
    fn average_is_ell_independent() {
        let n = 1u64 << 16;
        let a = average_bruteforce(2.0, 1, 0, n).unwrap();
        let b = average_bruteforce(2.0, 1, 5, n).unwrap();
        assert!((a - b).abs() <= 0.5 * 40.0 / n as f64);
        assert!((a - 1.5).abs() < 1e-12);
    }

    #[test]
    fn decay_profile_validation() {
        assert!(DecayProfile::new(1.0, 1.0).is_err());
        assert!(DecayProfile::new(0.0, 2.0).is_err());
        let p = DecayProfile::new(2.0, 3.0).unwrap();
        assert!((p.geometric_factor() - 2.0).abs() < 1e-15);
        assert!((p.at(2) - 2.0 / 9.0).abs() < 1e-15);
    }
}
