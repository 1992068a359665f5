//! Eigenvectors by inverse iteration.
//!
//! Eigenvalues are split into groups separated by relative gaps of at least
//! `group_gap`. Each group gets block inverse iteration from unit vectors at
//! the sites whose diagonal entries lie closest to the group, followed by a
//! Rayleigh–Ritz step. Inside a group, Ritz values closer than
//! `degenerate_gap` span a numerically degenerate subspace; there the basis
//! is rotated to diagonalise the position operator, which picks the
//! localized representatives. Every vector is finally polished by inverse
//! iteration from the unit vector at its own centre, which keeps its tails
//! free of rounding noise from the rotations.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::dense::{dense_eigen, DENSE_LIMIT};
use super::matching::localization_center;
use super::operator::{Boundary, PeriodicOperator};
use super::SpectralData;
use crate::error::{invalid, Error, Result};

const SHIFT_RETRIES: usize = 3;

/// LU factorisation of `T - σ` with partial pivoting (LAPACK `gttrf` layout).
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// `None` when a pivot is exactly zero.
    pub fn factor(diag: &[f64], hopping: f64, shift: f64) -> Option<Self> {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = vec![hopping; n.saturating_sub(1)];
        let mut du = vec![hopping; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d.iter().any(|&p| p == 0.0 || !p.is_finite()) {
            return None;
        }
        Some(Self {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Factor `H - σ`, nudging `σ` by `1e-12·‖H‖` when a pivot vanishes.
fn factor_shifted(op: &PeriodicOperator, shift: f64) -> Result<(TridiagonalLu, f64)> {
    factor_shifted_diag(op.diagonal(), op, shift)
}

/// As [`factor_shifted`] with `diag` in place of the operator's diagonal.
fn factor_shifted_diag(diag: &[f64], op: &PeriodicOperator, shift: f64) -> Result<(TridiagonalLu, f64)> {
    let nudge = 1e-12 * op.scale();
    let mut s = shift;
    for _ in 0..=SHIFT_RETRIES {
        if let Some(lu) = TridiagonalLu::factor(diag, op.hopping(), s) {
            return Ok((lu, s));
        }
        s += nudge;
    }
    Err(Error::IllConditioned {
        shift,
        retries: SHIFT_RETRIES,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> bool {
    let n = norm(v);
    if !(n > 0.0 && n.is_finite()) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Make the largest-magnitude entry positive (smallest index on ties).
pub(crate) fn fix_sign(v: &mut [f64]) {
    let c = localization_center(v);
    if v[c] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// `‖Hψ - Eψ‖`.
pub fn residual(op: &PeriodicOperator, psi: &[f64], eigenvalue: f64) -> f64 {
    let h = op.apply(psi);
    h.iter()
        .zip(psi)
        .map(|(a, b)| (a - eigenvalue * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Sites ordered by `|v_n - E|`, ties broken by index.
fn nearest_sites(op: &PeriodicOperator, energy: f64, count: usize) -> Vec<usize> {
    let diag = op.diagonal();
    let mut sites: Vec<usize> = (0..diag.len()).collect();
    let key = |i: usize| (diag[i] - energy).abs();
    if count < sites.len() {
        sites.select_nth_unstable_by(count, |&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
        sites.truncate(count);
    }
    sites.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    sites
}

fn unit(n: usize, site: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[site] = 1.0;
    v
}

/// Fixed, dense fallback start vector.
fn spread_start(n: usize, site: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| 1e-2 * (0.7 * i as f64 + 0.3).sin()).collect();
    v[site] += 1.0;
    v
}

fn iterate_from(
    lu: &TridiagonalLu,
    op: &PeriodicOperator,
    eigenvalue: f64,
    mut x: Vec<f64>,
) -> Option<(Vec<f64>, f64)> {
    let scale = op.scale();
    let mut res = f64::INFINITY;
    for it in 0..10 {
        lu.solve_in_place(&mut x);
        if !normalize(&mut x) {
            return None;
        }
        res = residual(op, &x, eigenvalue);
        if it >= 1 && res <= 1e-11 * scale {
            break;
        }
    }
    Some((x, res))
}

/// Unit eigenvector for an eigenvalue of `op` by shifted inverse iteration.
///
/// The start is the unit vector at the site whose diagonal entry is
/// closest to `eigenvalue` (smallest index on ties); a fixed spread-out
/// start is tried if that one is orthogonal to the target. Periodic
/// operators use the dense solver.
pub fn eigenvector_inverse_iteration(op: &PeriodicOperator, eigenvalue: f64) -> Result<Vec<f64>> {
    let (lo, hi) = op.gershgorin();
    let pad = 1e-10 * op.scale();
    if !(eigenvalue >= lo - pad && eigenvalue <= hi + pad) {
        return Err(invalid(
            "eigenvalue",
            format!("{eigenvalue} outside the Gershgorin range [{lo}, {hi}]"),
        ));
    }
    let n = op.size();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    if op.boundary() == Boundary::Periodic {
        let data = dense_eigen(op)?;
        let idx = data
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - eigenvalue).abs().total_cmp(&(b.1 - eigenvalue).abs()))
            .map(|(i, _)| i)
            .expect("nonempty spectrum");
        return Ok(data.eigenvectors.expect("dense path stores vectors")[idx].clone());
    }
    let (lu, _) = factor_shifted(op, eigenvalue)?;
    let site = nearest_sites(op, eigenvalue, 1)[0];
    let tol = 1e-8 * op.scale();
    for start in [unit(n, site), spread_start(n, site)] {
        if let Some((mut x, res)) = iterate_from(&lu, op, eigenvalue, start) {
            if res <= tol {
                fix_sign(&mut x);
                return Ok(x);
            }
        }
    }
    Err(Error::IllConditioned {
        shift: eigenvalue,
        retries: SHIFT_RETRIES,
    })
}

/// Tuning for the grouped eigenvector computation.
#[derive(Debug, Clone, Copy)]
pub struct EigenpairOptions {
    /// Relative gap (times `‖H‖`) that separates eigenvalue groups.
    pub group_gap: f64,
    /// Relative Ritz-value gap below which vectors are treated as degenerate.
    pub degenerate_gap: f64,
    /// Groups larger than this are split.
    pub max_group: usize,
}

impl Default for EigenpairOptions {
    fn default() -> Self {
        Self {
            group_gap: 1e-7,
            degenerate_gap: 1e-10,
            max_group: 512,
        }
    }
}

/// One computed eigenpair, handed to [`map_eigenpairs`] callbacks.
#[derive(Debug, Clone, Copy)]
pub struct Eigenpair<'a> {
    pub index: usize,
    pub value: f64,
    pub vector: &'a [f64],
    pub center: usize,
}

fn groups(values: &[f64], gap: f64, max_group: usize) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || values[i] - values[i - 1] > gap || i - start >= max_group;
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Modified Gram–Schmidt, applied twice. Collapsed columns are replaced.
fn orthonormalize(q: &mut [Vec<f64>]) {
    let n = q.first().map_or(0, Vec::len);
    for j in 0..q.len() {
        for _pass in 0..2 {
            for i in 0..j {
                let (head, tail) = q.split_at_mut(j);
                let c = dot(&head[i], &tail[0]);
                tail[0].iter_mut().zip(&head[i]).for_each(|(x, y)| *x -= c * y);
            }
        }
        let before = norm(&q[j]);
        if !(before > 1e-12) || !normalize(&mut q[j]) {
            q[j] = spread_start(n, (j * 7919) % n.max(1));
            for i in 0..j {
                let (head, tail) = q.split_at_mut(j);
                let c = dot(&head[i], &tail[0]);
                tail[0].iter_mut().zip(&head[i]).for_each(|(x, y)| *x -= c * y);
            }
            normalize(&mut q[j]);
        }
    }
}

/// `columns · coeffs`, with `coeffs` an `r × r` matrix.
fn combine(columns: &[Vec<f64>], coeffs: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = columns[0].len();
    (0..coeffs.ncols())
        .map(|k| {
            let mut v = vec![0.0; n];
            for (i, col) in columns.iter().enumerate() {
                let c = coeffs[(i, k)];
                if c != 0.0 {
                    v.iter_mut().zip(col).for_each(|(x, y)| *x += c * y);
                }
            }
            v
        })
        .collect()
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let r = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(r, r, |i, k| eig.eigenvectors[(i, order[k])]);
    (values, vectors)
}

/// Rotate numerically degenerate runs of `(values, vectors)` onto
/// eigenvectors of the position operator; each run is ordered by centre.
/// Returns the runs of length at least two.
fn localize_degenerate(values: &[f64], vectors: &mut [Vec<f64>], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i < values.len() && values[i] - values[i - 1] <= gap {
            continue;
        }
        if i - start > 1 {
            let block = &vectors[start..i];
            let r = block.len();
            let position = DMatrix::from_fn(r, r, |a, b| {
                block[a]
                    .iter()
                    .zip(&block[b])
                    .enumerate()
                    .map(|(site, (x, y))| site as f64 * x * y)
                    .sum()
            });
            let (_, rot) = sorted_eigen(position);
            let rotated = combine(block, &rot);
            vectors[start..i].clone_from_slice(&rotated);
            vectors[start..i].sort_by_key(|v| localization_center(v));
            runs.push(start..i);
        }
        start = i;
    }
    runs
}

/// Block inverse iteration with Rayleigh–Ritz. Returns Ritz pairs and
/// whether they converged onto `values`.
fn subspace_iteration(
    op: &PeriodicOperator,
    lu: &TridiagonalLu,
    mut q: Vec<Vec<f64>>,
    values: &[f64],
    max_iter: usize,
) -> (Vec<f64>, Vec<Vec<f64>>, bool) {
    let r = q.len();
    let scale = op.scale();
    let mut ritz_values = Vec::new();
    let mut ritz_vectors = Vec::new();
    for _ in 0..max_iter {
        q.iter_mut().for_each(|col| lu.solve_in_place(col));
        orthonormalize(&mut q);
        let hq: Vec<Vec<f64>> = q.iter().map(|col| op.apply(col)).collect();
        let projected = DMatrix::from_fn(r, r, |i, j| 0.5 * (dot(&q[i], &hq[j]) + dot(&q[j], &hq[i])));
        let (theta, w) = sorted_eigen(projected);
        ritz_vectors = combine(&q, &w);
        let worst = ritz_vectors
            .iter()
            .zip(&theta)
            .map(|(v, &t)| residual(op, v, t))
            .fold(0.0f64, f64::max);
        let on_target = theta.iter().zip(values).all(|(t, e)| (t - e).abs() <= 1e-9 * scale);
        ritz_values = theta;
        if worst <= 1e-10 * scale && on_target {
            return (ritz_values, ritz_vectors, true);
        }
        q = ritz_vectors.clone();
    }
    (ritz_values, ritz_vectors, false)
}

fn group_vectors(op: &PeriodicOperator, values: &[f64], opts: &EigenpairOptions) -> Result<Vec<Vec<f64>>> {
    let n = op.size();
    let r = values.len();
    let scale = op.scale();
    let sigma = values.iter().sum::<f64>() / r as f64;
    let (lu, sigma) = factor_shifted(op, sigma)?;
    let mut starts = nearest_sites(op, sigma, r);
    starts.sort_unstable();
    let q = starts.iter().map(|&site| unit(n, site)).collect();
    let (mut ritz_values, mut ritz_vectors, converged) = subspace_iteration(op, &lu, q, values, 8);
    if !converged {
        // The unit starts can be (numerically) orthogonal to the targets,
        // e.g. for states pushed off their diagonal value by a boundary.
        let q = (0..r)
            .map(|k| (0..n).map(|i| (0.7 * i as f64 + 0.3 + 1.3 * k as f64).sin()).collect())
            .collect();
        let (theta, y, ok) = subspace_iteration(op, &lu, q, values, 40);
        if !ok {
            return Err(Error::Numerical(format!(
                "inverse iteration did not converge for {r} eigenvalues near {sigma}"
            )));
        }
        ritz_values = theta;
        ritz_vectors = y;
    }
    let runs = localize_degenerate(&ritz_values, &mut ritz_vectors, opts.degenerate_gap * scale);
    let centers: Vec<usize> = ritz_vectors.iter().map(|v| localization_center(v)).collect();
    let mut run_of = vec![None; r];
    for run in &runs {
        for k in run.clone() {
            run_of[k] = Some(run.clone());
        }
    }

    // Ritz values of a localized run were reordered with the vectors;
    // recompute each vector's Rayleigh quotient for the polishing shift.
    let mut out = Vec::with_capacity(r);
    for (k, v) in ritz_vectors.into_iter().enumerate() {
        let theta = dot(&v, &op.apply(&v));
        let others: Vec<usize> = run_of[k]
            .clone()
            .map(|run| run.filter(|&i| i != k).map(|i| centers[i]).collect())
            .unwrap_or_default();
        out.push(polish(op, v, theta, &others)?);
    }
    Ok(out)
}

/// Inverse iteration from the unit vector at the centre of `v`. Sites in
/// `detuned` (centres of degenerate partners) are raised by `1e-6·‖H‖` so
/// the iteration cannot drift into their copies.
fn polish(op: &PeriodicOperator, mut v: Vec<f64>, theta: f64, detuned: &[usize]) -> Result<Vec<f64>> {
    fix_sign(&mut v);
    let center = localization_center(&v);
    let mut diag = op.diagonal().to_vec();
    for &site in detuned {
        if site != center {
            diag[site] += 1e-6 * op.scale();
        }
    }
    let Ok((lu, _)) = factor_shifted_diag(&diag, op, theta) else {
        return Ok(v);
    };
    let mut w = unit(v.len(), center);
    for _ in 0..2 {
        lu.solve_in_place(&mut w);
        if !normalize(&mut w) {
            return Ok(v);
        }
    }
    fix_sign(&mut w);
    let keeps_center = localization_center(&w) == center;
    let overlap = dot(&w, &v).abs();
    let better = residual(op, &w, theta) <= residual(op, &v, theta).max(1e-10 * op.scale());
    if keeps_center && overlap >= 0.999 && better {
        Ok(w)
    } else {
        Ok(v)
    }
}

fn check_sorted(values: &[f64], n: usize) -> Result<()> {
    if values.len() != n {
        return Err(invalid(
            "eigenvalues",
            format!("expected {n} eigenvalues, got {}", values.len()),
        ));
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("eigenvalues", "eigenvalues must be sorted"));
    }
    Ok(())
}

/// Compute every eigenvector and hand each pair to `f`; results come back
/// in eigenvalue order. Vectors are not retained.
pub fn map_eigenpairs<T, F>(op: &PeriodicOperator, eigenvalues: &[f64], opts: &EigenpairOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Eigenpair<'_>) -> T + Sync,
{
    let n = op.size();
    check_sorted(eigenvalues, n)?;
    let scale = op.scale();

    if op.boundary() == Boundary::Periodic {
        if n > DENSE_LIMIT {
            return Err(invalid(
                "N",
                format!("periodic eigenvectors use the dense path, limited to N <= {DENSE_LIMIT}"),
            ));
        }
        let dense = dense_eigen(op)?;
        let mut vectors = dense.eigenvectors.expect("dense path stores vectors");
        localize_degenerate(&dense.eigenvalues, &mut vectors, opts.degenerate_gap * scale);
        return Ok(vectors
            .iter_mut()
            .enumerate()
            .map(|(index, v)| {
                fix_sign(v);
                f(Eigenpair {
                    index,
                    value: eigenvalues[index],
                    vector: v,
                    center: localization_center(v),
                })
            })
            .collect());
    }

    let ranges = groups(eigenvalues, opts.group_gap * scale, opts.max_group);
    let parts: Vec<Result<Vec<T>>> = ranges
        .into_par_iter()
        .map(|range| {
            let vectors = group_vectors(op, &eigenvalues[range.clone()], opts)?;
            Ok(vectors
                .iter()
                .zip(range)
                .map(|(v, index)| {
                    f(Eigenpair {
                        index,
                        value: eigenvalues[index],
                        vector: v,
                        center: localization_center(v),
                    })
                })
                .collect())
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Eigenvalues of `data` completed with localized eigenvectors and centres.
pub fn localized_eigenpairs(op: &PeriodicOperator, data: &SpectralData) -> Result<SpectralData> {
    let pairs = map_eigenpairs(op, &data.eigenvalues, &EigenpairOptions::default(), |p| {
        (p.vector.to_vec(), p.center)
    })?;
    let (vectors, centers): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let mut out = data.clone();
    out.eigenvectors = Some(vectors);
    out.centers = Some(centers);
    Ok(out)
}
