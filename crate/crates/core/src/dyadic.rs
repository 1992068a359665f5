//! Exact combinatorics of the dyadic distal sequence.
//!
//! The sets `A_j` are unions of half-periods of length `2^{j-1}`:
//! for even `j` the lower half `[N·2^j, N·2^j + 2^{j-1})`, for odd `j` the
//! upper half. Writing `a_j` for the indicator of `A_j`, the sequence is
//! `λ_n = Σ_j a_j(n) 2^{-j}` and its depth-`m` truncation `λ^{(m)}` is a
//! `2^m`-periodic sequence of dyadic rationals with denominator `2^m`.
//!
//! Since `a_i(n)` only looks at `n mod 2^i`, it equals bit `i-1` of `n`
//! (flipped when `i` is even). Everything in this module is integer
//! arithmetic; no floating point enters until [`Dyadic::to_f64`].

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};

/// Largest truncation depth; numerators are stored in a `u64`.
pub const MAX_DEPTH: u32 = 62;

/// Largest depth for exhaustive distality scans (one `u32` per residue).
pub const MAX_SCAN_DEPTH: u32 = 26;

/// Bits `1, 3, 5, …` of a residue are flipped to obtain `(a_1, a_2, …)`.
const EVEN_LEVEL_MASK: u64 = 0xAAAA_AAAA_AAAA_AAAA;

fn low_mask(m: u32) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

fn check_depth(name: &'static str, m: u32) -> Result<()> {
    if m == 0 || m > MAX_DEPTH {
        return Err(invalid(name, format!("must lie in 1..={MAX_DEPTH}, got {m}")));
    }
    Ok(())
}

/// `n mod 2^m` as a floored residue.
fn residue(n: i64, m: u32) -> u64 {
    (n as i128).rem_euclid(1i128 << m) as u64
}

/// A non-negative dyadic rational `num / 2^log2_den`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Dyadic {
    pub num: u64,
    pub log2_den: u32,
}

impl Dyadic {
    pub fn new(num: u64, log2_den: u32) -> Self {
        Self { num, log2_den }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    /// Lowest terms: odd numerator or zero denominator exponent.
    pub fn reduced(self) -> Self {
        if self.num == 0 {
            return Self::zero();
        }
        let shift = self.num.trailing_zeros().min(self.log2_den);
        Self::new(self.num >> shift, self.log2_den - shift)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / 2f64.powi(self.log2_den as i32)
    }

    /// `self ≥ p/q` decided exactly.
    pub fn at_least(self, p: u64, q: u64) -> bool {
        (self.num as u128) * (q as u128) >= (p as u128) << self.log2_den
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.reduced();
        let b = other.reduced();
        let e = a.log2_den.max(b.log2_den);
        let lhs = (a.num as u128) << (e - a.log2_den);
        let rhs = (b.num as u128) << (e - b.log2_den);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.log2_den == 0 {
            write!(f, "{}", r.num)
        } else {
            write!(f, "{}/{}", r.num, 1u128 << r.log2_den)
        }
    }
}

/// `a_j(n)`: membership of `n` in `A_j`.
pub fn indicator(j: u32, n: i64) -> Result<bool> {
    if j == 0 {
        return Err(invalid("j", "level index must be >= 1"));
    }
    if j > 126 {
        return Err(invalid("j", format!("level index {j} exceeds 126")));
    }
    let period = 1i128 << j;
    let half = period >> 1;
    let r = (n as i128).rem_euclid(period);
    Ok(if j.is_multiple_of(2) { r < half } else { r >= half })
}

/// A finite bit string `(b_1, …, b_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BitPattern {
    bits: Vec<bool>,
}

impl BitPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// The binary expansion of an interval index, least significant first.
    pub fn from_index(index: u64, m: u32) -> Result<Self> {
        check_depth("m", m)?;
        if index > low_mask(m) {
            return Err(invalid("j", format!("index {index} outside [0, 2^{m})")));
        }
        Ok(Self::new((0..m).map(|i| (index >> i) & 1 == 1).collect()))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `j = Σ b_i 2^{i-1}`.
    pub fn index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }
}

impl fmt::Display for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `(a_1(n), …, a_m(n))`.
pub fn residue_pattern(n: i64, m: u32) -> Result<BitPattern> {
    check_depth("m", m)?;
    BitPattern::from_index(pattern_index(residue(n, m), m), m)
}

/// `m`-bit reversal.
fn reverse_low(x: u64, m: u32) -> u64 {
    x.reverse_bits() >> (64 - m)
}

/// Index `Σ a_i(r) 2^{i-1}` of the pattern of a residue `r < 2^m`.
fn pattern_index(r: u64, m: u32) -> u64 {
    (r ^ EVEN_LEVEL_MASK) & low_mask(m)
}

/// The depth-`m` truncation `λ^{(m)}` of the distal sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DistalSequence {
    depth: u32,
}

impl DistalSequence {
    pub fn new(depth: u32) -> Result<Self> {
        check_depth("depth", depth)?;
        Ok(Self { depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn period(&self) -> u64 {
        1u64 << self.depth
    }

    /// `2^m · λ^{(m)}_n`, an integer in `[0, 2^m)`.
    pub fn numerator(&self, n: i64) -> u64 {
        let m = self.depth;
        let idx = pattern_index(residue(n, m), m);
        // a_j carries weight 2^{m-j}: reverse the m-bit pattern index.
        reverse_low(idx, m)
    }

    pub fn value(&self, n: i64) -> Dyadic {
        Dyadic::new(self.numerator(n), self.depth)
    }

    pub fn pattern(&self, n: i64) -> BitPattern {
        let m = self.depth;
        BitPattern::from_index(pattern_index(residue(n, m), m), m).expect("depth validated at construction")
    }

    /// Numerators over one full period `n = 0, …, 2^m - 1`.
    pub fn period_numerators(&self) -> Vec<u64> {
        (0..self.period() as i64).map(|n| self.numerator(n)).collect()
    }
}

/// `λ^{(m)}_n` as an exact dyadic rational.
pub fn lambda_value(seq: &DistalSequence, n: i64) -> Dyadic {
    seq.value(n)
}

/// The half-open dyadic interval `[j 2^{-m}, (j+1) 2^{-m})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicInterval {
    level: u32,
    index: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, index: u64) -> Result<Self> {
        check_depth("level", level)?;
        if index > low_mask(level) {
            return Err(invalid("j", format!("index {index} outside [0, 2^{level})")));
        }
        Ok(Self { level, index })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn left(&self) -> Dyadic {
        Dyadic::new(self.index, self.level)
    }

    pub fn right(&self) -> Dyadic {
        Dyadic::new(self.index + 1, self.level)
    }

    pub fn bounds_f64(&self) -> (f64, f64) {
        (self.left().to_f64(), self.right().to_f64())
    }

    pub fn length(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    /// Binary digits `(b_1, …, b_m)` of the left endpoint, `j = Σ b_i 2^{m-i}`;
    /// `λ_k` lies in the interval iff `a_i(k) = b_i` for `i ≤ m`.
    pub fn pattern(&self) -> BitPattern {
        BitPattern::from_index(reverse_low(self.index, self.level), self.level).expect("validated at construction")
    }

    pub fn contains(&self, x: Dyadic) -> bool {
        x >= self.left() && x < self.right()
    }

    /// The two halves at level `level + 1`.
    pub fn children(&self) -> Result<[Self; 2]> {
        Ok([
            Self::new(self.level + 1, 2 * self.index)?,
            Self::new(self.level + 1, 2 * self.index + 1)?,
        ])
    }

    /// All `2^m` intervals of a level, in increasing order.
    pub fn level_partition(level: u32) -> Result<Vec<Self>> {
        check_depth("level", level)?;
        Ok((0..=low_mask(level)).map(|index| Self { level, index }).collect())
    }
}

/// The unique residue `ℓ ∈ [0, 2^m)` with `λ_ℓ ∈ I_{m,j}`, by bit construction.
pub fn landing_index(m: u32, j: u64) -> Result<u64> {
    let interval = DyadicInterval::new(m, j)?;
    // pattern_index is an involution on m-bit words.
    Ok(pattern_index(reverse_low(interval.index(), m), m))
}

/// Same as [`landing_index`], found by scanning all residues.
pub fn landing_index_scan(m: u32, j: u64) -> Result<u64> {
    let target = DyadicInterval::new(m, j)?.pattern();
    (0..1i64 << m)
        .find(|&l| residue_pattern(l, m).map(|p| p == target).unwrap_or(false))
        .map(|l| l as u64)
        .ok_or_else(|| invalid("j", "no residue carries this pattern"))
}

/// Whether the untruncated `λ_k` lies in `interval`.
///
/// Decided from the first `interval.level()` bits of the pattern of `k`,
/// which the truncation carries exactly; the full expansion never ends in
/// an infinite run of ones.
pub fn interval_membership(seq: &DistalSequence, k: i64, interval: &DyadicInterval) -> Result<bool> {
    if interval.level() > seq.depth() {
        return Err(invalid(
            "interval",
            format!("level {} exceeds sequence depth {}", interval.level(), seq.depth()),
        ));
    }
    let shift = seq.depth() - interval.level();
    Ok(seq.numerator(k) >> shift == interval.index())
}

/// `max(20, ⌈log2|k|⌉ + 10)`.
pub fn default_margin_depth(k: i64) -> u32 {
    let a = k.unsigned_abs();
    let ceil_log2 = if a <= 1 { 0 } else { 64 - (a - 1).leading_zeros() };
    (ceil_log2 + 10).max(20)
}

/// Lower bound on `inf_n |λ_n - λ_{n-k}|` certified from a truncation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistalityMargin {
    pub k: i64,
    pub depth: u32,
    /// `min_n |λ^{(depth)}_n - λ^{(depth)}_{n-k}|` over one period.
    pub truncated_min: Dyadic,
    /// `max(0, truncated_min - 2^{1-depth})`.
    pub margin: Dyadic,
}

impl DistalityMargin {
    /// `margin ≥ 1/(16|k|)`, decided exactly.
    pub fn meets_poschel_bound(&self) -> bool {
        self.margin.at_least(1, 16 * self.k.unsigned_abs())
    }

    /// Whether the truncation slack `2^{1-depth}` alone reaches `1/(16|k|)`.
    pub fn slack_dominates(&self) -> bool {
        Dyadic::new(2, self.depth).at_least(1, 16 * self.k.unsigned_abs())
    }
}

/// Exhaustive scanner over one period of `λ^{(depth)}`; reuse it for many `k`.
#[derive(Debug, Clone)]
pub struct DistalityScanner {
    depth: u32,
    table: Vec<u32>,
}

impl DistalityScanner {
    pub fn new(depth: u32) -> Result<Self> {
        if depth == 0 || depth > MAX_SCAN_DEPTH {
            return Err(invalid(
                "depth",
                format!("scan depth must lie in 1..={MAX_SCAN_DEPTH}, got {depth}"),
            ));
        }
        let seq = DistalSequence::new(depth)?;
        let table = (0..seq.period() as i64)
            .into_par_iter()
            .map(|n| seq.numerator(n) as u32)
            .collect();
        Ok(Self { depth, table })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn margin(&self, k: i64) -> Result<DistalityMargin> {
        if k == 0 {
            return Err(invalid("k", "shift must be nonzero"));
        }
        let p = self.table.len();
        let shift = (k as i128).rem_euclid(p as i128) as usize;
        // λ_{n-k} for n in [shift, p) is table[n - shift]; wrap for n < shift.
        let (head, tail) = self.table.split_at(shift);
        let wrapped = head.iter().zip(&self.table[p - shift..]).map(|(&a, &b)| a.abs_diff(b));
        let straight = tail.iter().zip(&self.table[..p - shift]).map(|(&a, &b)| a.abs_diff(b));
        let min = wrapped.chain(straight).min().unwrap_or(0) as u64;
        Ok(DistalityMargin {
            k,
            depth: self.depth,
            truncated_min: Dyadic::new(min, self.depth),
            margin: Dyadic::new(min.saturating_sub(2), self.depth),
        })
    }
}

/// Certified lower bound on `inf_n |λ_n - λ_{n-k}|` at the given depth.
pub fn distality_margin(k: i64, depth: u32) -> Result<DistalityMargin> {
    if k == 0 {
        return Err(invalid("k", "shift must be nonzero"));
    }
    DistalityScanner::new(depth)?.margin(k)
}

/// `Ω(r) = A·r^α`; the concrete sequence satisfies the bound with `A = 16`, `α = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproximationProfile {
    pub exponent: f64,
    pub prefactor: f64,
}

/// Truncated evaluation of the product bound on `Ψ(t)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PsiBound {
    pub value: f64,
    pub log_value: f64,
    pub terms: usize,
    /// Upper bound on the absolute log-contribution of the dropped factors.
    pub log_tail_bound: f64,
}

impl ApproximationProfile {
    pub fn new(exponent: f64, prefactor: f64) -> Result<Self> {
        if !(exponent >= 0.0 && exponent.is_finite()) {
            return Err(invalid("exponent", format!("need α >= 0, got {exponent}")));
        }
        if !(prefactor > 0.0 && prefactor.is_finite()) {
            return Err(invalid("prefactor", format!("need A > 0, got {prefactor}")));
        }
        Ok(Self { exponent, prefactor })
    }

    pub fn power_law(exponent: f64) -> Result<Self> {
        Self::new(exponent, 1.0)
    }

    /// `Ω(r) = 16 r`, the distality bound of the concrete sequence.
    pub fn poschel() -> Self {
        Self {
            exponent: 1.0,
            prefactor: 16.0,
        }
    }

    pub fn omega(&self, r: f64) -> f64 {
        if self.exponent == 0.0 {
            self.prefactor
        } else {
            self.prefactor * r.powf(self.exponent)
        }
    }

    fn ln_phi(&self, t: f64) -> f64 {
        let a = self.exponent;
        let sup = if a == 0.0 {
            0.0
        } else {
            a * (a / (std::f64::consts::E * t)).ln()
        };
        self.prefactor.ln() - 4.0 * t.ln() + sup
    }

    /// `t^{-4} sup_r Ω(r) e^{-tr}`, attained at `r = α/t`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("need t > 0, got {t}")));
        }
        Ok(self.ln_phi(t).exp())
    }

    /// Upper bound on `Ψ(t)` from the admissible sequence `t_j = t 2^{-j-1}`,
    /// each factor `Φ(t_j)` raised to the power `2^{-j-1}`.
    pub fn psi_upper(&self, t: f64) -> Result<PsiBound> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("need t > 0, got {t}")));
        }
        let mut log_sum = 0.0;
        let mut weight_sum = 0.0;
        let mut terms = 0;
        let mut j = 0i32;
        while weight_sum <= 1.0 - 1e-12 {
            let weight = 2f64.powi(-j - 1);
            let tj = t * weight;
            let term = weight * self.ln_phi(tj);
            if !term.is_finite() {
                return Err(crate::Error::Numerical(format!(
                    "Ψ product factor {j} is not finite at t = {t}"
                )));
            }
            log_sum += term;
            weight_sum += weight;
            terms += 1;
            j += 1;
        }
        // ln Φ(t_j) = ln Φ(t) + (4+α)(j+1) ln 2, so the dropped factors j ≥ J
        // contribute ln Φ(t) 2^{-J} + (4+α) ln 2 (J+2) 2^{-J}.
        let c0 = self.ln_phi(t);
        let big_j = terms as f64;
        let tail =
            (c0.abs() + (4.0 + self.exponent) * std::f64::consts::LN_2 * (big_j + 2.0)) * 2f64.powi(-(terms as i32));
        log::debug!("psi_upper(t={t}): {terms} factors, log tail bound {tail:e}");
        let value = log_sum.exp();
        if !value.is_finite() {
            return Err(crate::Error::Numerical(format!("Ψ upper bound overflows at t = {t}")));
        }
        Ok(PsiBound {
            value,
            log_value: log_sum,
            terms,
            log_tail_bound: tail,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_examples() {
        assert!(indicator(1, 3).unwrap());
        assert!(indicator(2, 0).unwrap());
        assert!(indicator(3, 4).unwrap());
        assert!(!indicator(2, -1).unwrap());
        assert!(indicator(0, 5).is_err());
    }

    #[test]
    fn indicator_matches_union_definition_on_window() {
        // Enumerate A_j ∩ [-64, 64) directly from the unions of blocks.
        for j in 1..=5u32 {
            let p = 1i64 << j;
            let h = p / 2;
            let mut members = std::collections::BTreeSet::new();
            for big_n in -40..40i64 {
                let (lo, hi) = if j % 2 == 0 {
                    (big_n * p, big_n * p + h)
                } else {
                    (big_n * p + h, (big_n + 1) * p)
                };
                members.extend(lo..hi);
            }
            for n in -64..64 {
                assert_eq!(indicator(j, n).unwrap(), members.contains(&n), "j={j} n={n}");
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let s2 = DistalSequence::new(2).unwrap();
        assert_eq!(s2.value(0), Dyadic::new(1, 2));
        let s30 = DistalSequence::new(30).unwrap();
        assert!((s30.value(0).to_f64() - 1.0 / 3.0).abs() <= 2f64.powi(-30));
        assert!((s30.value(1).to_f64() - 5.0 / 6.0).abs() <= 2f64.powi(-30));
    }

    #[test]
    fn numerator_matches_indicator_sum() {
        for m in 1..=12u32 {
            let seq = DistalSequence::new(m).unwrap();
            for n in -300..300i64 {
                let direct: u64 = (1..=m).map(|j| u64::from(indicator(j, n).unwrap()) << (m - j)).sum();
                assert_eq!(seq.numerator(n), direct, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn residue_pattern_examples() {
        assert_eq!(residue_pattern(0, 2).unwrap().bits(), &[false, true]);
        assert_eq!(residue_pattern(3, 2).unwrap().bits(), &[true, false]);
        assert_eq!(residue_pattern(5, 1).unwrap().bits(), &[true]);
        assert!(residue_pattern(5, 0).is_err());
    }

    #[test]
    fn landing_examples_and_routes_agree() {
        assert_eq!(landing_index(1, 0).unwrap(), 0);
        assert_eq!(landing_index(1, 1).unwrap(), 1);
        // λ_0 = 1/3 lies in [1/4, 1/2); λ_3 starts 0.10… and lies in [1/2, 3/4).
        assert_eq!(landing_index(2, 1).unwrap(), 0);
        assert_eq!(landing_index(2, 2).unwrap(), 3);
        assert_eq!(
            residue_pattern(3, 2).unwrap(),
            DyadicInterval::new(2, 2).unwrap().pattern()
        );
        let full = DistalSequence::new(40).unwrap();
        for m in 1..=8 {
            for j in 0..1u64 << m {
                let l = landing_index(m, j).unwrap() as i64;
                assert!(interval_membership(&full, l, &DyadicInterval::new(m, j).unwrap()).unwrap());
            }
        }
        for m in 1..=10 {
            for j in 0..1u64 << m {
                assert_eq!(landing_index(m, j).unwrap(), landing_index_scan(m, j).unwrap());
            }
        }
        assert!(landing_index(3, 8).is_err());
    }

    #[test]
    fn membership_examples() {
        let seq = DistalSequence::new(30).unwrap();
        assert!(interval_membership(&seq, 0, &DyadicInterval::new(2, 1).unwrap()).unwrap());
        assert!(!interval_membership(&seq, 0, &DyadicInterval::new(2, 0).unwrap()).unwrap());
        let shallow = DistalSequence::new(3).unwrap();
        assert!(interval_membership(&shallow, 0, &DyadicInterval::new(4, 0).unwrap()).is_err());
    }

    #[test]
    fn margin_symmetry_and_errors() {
        let scan = DistalityScanner::new(16).unwrap();
        for k in [1i64, 3, 6, 40] {
            assert_eq!(scan.margin(k).unwrap().margin, scan.margin(-k).unwrap().margin);
        }
        assert!(scan.margin(0).is_err());
        assert!(distality_margin(0, 20).is_err());
    }

    #[test]
    fn margin_k1_depth20() {
        let m = distality_margin(1, 20).unwrap();
        assert!(m.margin.to_f64() >= 1.0 / 16.0);
        assert!(m.meets_poschel_bound());
    }

    #[test]
    fn default_depth_heuristic() {
        assert_eq!(default_margin_depth(1), 20);
        assert_eq!(default_margin_depth(1024), 20);
        assert_eq!(default_margin_depth(1025), 21);
        assert_eq!(default_margin_depth(-(1 << 14)), 24);
    }

    #[test]
    fn phi_examples() {
        let flat = ApproximationProfile::power_law(0.0).unwrap();
        assert!((flat.phi(2.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        let lin = ApproximationProfile::power_law(1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((lin.phi(1.0).unwrap() - 1.0 / e).abs() < 1e-14);
        assert!((lin.phi(0.5).unwrap() - 32.0 / e).abs() < 1e-12);
        assert!(lin.phi(0.0).is_err());
        assert!(lin.phi(-1.0).is_err());
    }

    #[test]
    fn psi_flat_profile_is_256() {
        let flat = ApproximationProfile::power_law(0.0).unwrap();
        let b = flat.psi_upper(1.0).unwrap();
        assert!((b.value - 256.0).abs() / 256.0 < 1e-9, "{b:?}");
        assert!(b.log_tail_bound < 1e-9);
        assert!(flat.psi_upper(0.0).is_err());
    }

    #[test]
    fn dyadic_display_and_order() {
        assert_eq!(Dyadic::new(2, 3).to_string(), "1/4");
        assert_eq!(Dyadic::new(0, 5).to_string(), "0");
        assert_eq!(Dyadic::new(3, 2).to_string(), "3/4");
        assert!(Dyadic::new(1, 1) > Dyadic::new(3, 3));
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
    }
}
