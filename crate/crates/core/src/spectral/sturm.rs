//! Eigenvalue counts from pivots of `H - x` and bisection on top of them.
//!
//! For a tridiagonal matrix the pivots are the Sturm sequence ratios; by
//! Sylvester's law of inertia the number of negative pivots equals the
//! number of eigenvalues below `x`. The periodic case eliminates the first
//! `N-1` rows of the cyclic matrix, carrying the fill in the last column.

use rayon::prelude::*;

use super::operator::{Boundary, PeriodicOperator};
use super::{SpectralData, SpectralMethod};
use crate::error::{invalid, Error, Result};

fn pivmin(op: &PeriodicOperator) -> f64 {
    f64::MIN_POSITIVE * op.hopping().powi(2).max(1.0)
}

fn guard(q: f64, floor: f64) -> f64 {
    if q.abs() < floor {
        -floor
    } else {
        q
    }
}

/// Number of eigenvalues strictly below `x`.
pub fn count_below(op: &PeriodicOperator, x: f64) -> usize {
    match op.boundary() {
        Boundary::Dirichlet => sturm_count(op.diagonal(), op.hopping(), x, pivmin(op)),
        Boundary::Periodic => cyclic_count(op, x),
    }
}

fn sturm_count(diag: &[f64], t: f64, x: f64, floor: f64) -> usize {
    let t2 = t * t;
    let mut q = guard(diag[0] - x, floor);
    let mut count = usize::from(q < 0.0);
    for &a in &diag[1..] {
        q = guard(a - x - t2 / q, floor);
        count += usize::from(q < 0.0);
    }
    count
}

fn cyclic_count(op: &PeriodicOperator, x: f64) -> usize {
    let diag = op.diagonal();
    let n = diag.len();
    let t = op.hopping();
    let floor = pivmin(op);
    let last = n - 1;
    // Original coupling of row i (< N-1) to column N-1.
    let border = |i: usize| -> f64 {
        let mut b = 0.0;
        if i == 0 {
            b += op.corner();
        }
        if i + 2 == n {
            b += t;
        }
        b
    };
    let mut q = guard(diag[0] - x, floor);
    let mut u = border(0);
    let mut count = usize::from(q < 0.0);
    let mut schur = u * u / q;
    for (i, &a) in diag.iter().enumerate().take(last).skip(1) {
        let l = t / q;
        q = guard(a - x - t * l, floor);
        u = border(i) - l * u;
        count += usize::from(q < 0.0);
        schur += u * u / q;
    }
    let tail = diag[last] - x - schur;
    count + usize::from(guard(tail, floor) < 0.0 || tail.is_nan())
}

/// All eigenvalues, each within `tol`, by bisection on [`count_below`].
///
/// The Gershgorin range is cut into fixed chunks that are refined
/// independently; the output does not depend on the thread count.
///
/// Periodic counts lose accuracy at eigenvalues that are exactly
/// degenerate (shared with the leading `N-1` block), where the error grows
/// to about `√ε_mach·‖H‖`; [`super::spectrum`] uses the dense solver for
/// periodic operators up to [`super::DENSE_LIMIT`].
pub fn eigenvalues_sturm(op: &PeriodicOperator, tol: f64) -> Result<SpectralData> {
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("tolerance must be positive, got {tol}")));
    }
    let n = op.size();
    let (g_lo, g_hi) = op.gershgorin();
    let pad = tol + 4.0 * f64::EPSILON * op.scale();
    let (lo, hi) = (g_lo - pad, g_hi + pad);
    if !(lo.is_finite() && hi.is_finite()) || op.diagonal().iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite Gershgorin bounds".into()));
    }
    if count_below(op, lo) != 0 || count_below(op, hi) != n {
        return Err(Error::Numerical(
            "eigenvalue counts at the Gershgorin bounds are inconsistent".into(),
        ));
    }

    let chunks = n.clamp(1, 64);
    let edges: Vec<f64> = (0..=chunks)
        .map(|i| {
            if i == chunks {
                hi
            } else {
                lo + (hi - lo) * i as f64 / chunks as f64
            }
        })
        .collect();
    let counts: Vec<usize> = edges.par_iter().map(|&x| count_below(op, x)).collect();
    if counts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Numerical("eigenvalue count is not monotone".into()));
    }

    let parts: Vec<Result<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::with_capacity(counts[i + 1] - counts[i]);
            refine(op, edges[i], edges[i + 1], counts[i], counts[i + 1], tol, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut values = Vec::with_capacity(n);
    for part in parts {
        values.extend(part?);
    }
    if values.len() != n {
        return Err(Error::Numerical(format!(
            "bisection located {} of {n} eigenvalues",
            values.len()
        )));
    }
    let method = match op.boundary() {
        Boundary::Dirichlet => SpectralMethod::SturmBisection,
        Boundary::Periodic => SpectralMethod::CyclicSturmBisection,
    };
    Ok(SpectralData::from_eigenvalues(values, method))
}

fn refine(
    op: &PeriodicOperator,
    lo: f64,
    hi: f64,
    c_lo: usize,
    c_hi: usize,
    tol: f64,
    out: &mut Vec<f64>,
) -> Result<()> {
    if c_hi == c_lo {
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    if hi - lo <= tol || mid <= lo || mid >= hi {
        out.extend(std::iter::repeat_n(mid, c_hi - c_lo));
        return Ok(());
    }
    // Counts can be non-monotone at rounding level next to eigenvalues of
    // the leading block; keep the bracket consistent.
    let c_mid = count_below(op, mid).clamp(c_lo, c_hi);
    refine(op, lo, mid, c_lo, c_mid, tol, out)?;
    refine(op, mid, hi, c_mid, c_hi, tol, out)
}

/// Default absolute tolerance, `1e-13 · ‖H‖`.
pub fn default_tolerance(op: &PeriodicOperator) -> f64 {
    1e-13 * op.scale()
}
