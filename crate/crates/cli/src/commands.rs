use std::fs;
use std::io::{self, Write};
use std::path::Path;

use lpdos::dyadic::{
    interval_membership, landing_index, residue_pattern, DistalSequence, DistalityScanner, DyadicInterval,
};
use lpdos::ids::{
    certify_decay, dyadic_family, holder_probe, ids_from_spectrum, landing_verification, modulus_of_continuity,
    EnergyInterval, IDSFunction, LandingConvention, ModulusReport, Verdict,
};
use lpdos::lattice::{
    average_bruteforce, average_limit_closed, bruteforce_tail_bound, lattice_sum_bruteforce, lattice_sum_closed,
};
use lpdos::spectral::cache::{load_or_compute, write_spectrum, TOOL_VERSION};
use lpdos::spectral::{
    decay_fit_with, localized_eigenpairs, map_eigenpairs, DecayRate, EigenpairOptions, PotentialSpec, SpectralData,
};
use serde_json::json;

use crate::model::ModelArgs;
use crate::{Failure, Outcome};

/// Base at which every bulk envelope prefactor is reported.
const REFERENCE_BASE: f64 = 1.2;

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_stdout() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Numerical(format!("csv output: {e}"))
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

pub fn sequence(depth: u32, start: i64, end: Option<i64>) -> Outcome {
    let seq = DistalSequence::new(depth)?;
    let end = end.unwrap_or(start + seq.period() as i64);
    if end <= start {
        return Err(Failure::Usage(format!("empty range {start}..{end}")));
    }
    let mut w = csv_stdout();
    w.write_record(["n", "pattern", "lambda", "decimal"]).map_err(csv_err)?;
    for n in start..end {
        let v = seq.value(n);
        w.write_record([
            n.to_string(),
            residue_pattern(n, depth)?.to_string(),
            v.to_string(),
            f(v.to_f64()),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn distal(kmax: i64, depth: u32, symmetric: bool) -> Outcome {
    if kmax < 1 {
        return Err(Failure::Usage(format!("--kmax must be at least 1, got {kmax}")));
    }
    let scanner = DistalityScanner::new(depth)?;
    let ks: Vec<i64> = if symmetric {
        (-kmax..=kmax).filter(|&k| k != 0).collect()
    } else {
        (1..=kmax).collect()
    };
    let mut w = csv_stdout();
    w.write_record(["k", "margin", "margin_decimal", "threshold", "pass"])
        .map_err(csv_err)?;
    let mut failed = Vec::new();
    let mut slack_warned = false;
    for k in ks {
        let m = scanner.margin(k)?;
        if m.slack_dominates() && !slack_warned {
            eprintln!(
                "warning: truncation slack 2^{} reaches 1/(16|k|) at k = {k}; increase --depth",
                1 - depth as i32
            );
            slack_warned = true;
        }
        let pass = m.meets_poschel_bound();
        if !pass {
            failed.push(k);
        }
        let threshold = 1.0 / (16.0 * k.unsigned_abs() as f64);
        w.write_record([
            k.to_string(),
            m.margin.to_string(),
            f(m.margin.to_f64()),
            f(threshold),
            if pass { "PASS" } else { "FAIL" }.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("margin below 1/(16|k|) for k in {failed:?}")))
    }
}

pub fn landing(depth: u32, index: u64, periods: i64) -> Outcome {
    if periods < 1 {
        return Err(Failure::Usage(format!("--periods must be at least 1, got {periods}")));
    }
    let interval = DyadicInterval::new(depth, index)?;
    let ell = landing_index(depth, index)?;
    let seq = DistalSequence::new(depth)?;
    let period = 1i64 << depth;
    let (lo, hi) = (-period, (periods - 1) * period);
    let mut members = Vec::new();
    let mut verified = true;
    for k in lo..hi {
        let inside = interval_membership(&seq, k, &interval)?;
        if inside {
            members.push(k.to_string());
        }
        verified &= inside == ((k - ell as i64).rem_euclid(period) == 0);
    }
    let mut w = csv_stdout();
    w.write_record(["m", "j", "interval", "landing_index", "window", "members", "verified"])
        .map_err(csv_err)?;
    w.write_record([
        depth.to_string(),
        index.to_string(),
        format!("[{}, {})", interval.left(), interval.right()),
        ell.to_string(),
        format!("[{lo}, {hi})"),
        members.join(";"),
        verified.to_string(),
    ])
    .map_err(csv_err)?;
    w.flush()?;
    if verified {
        Ok(())
    } else {
        Err(Failure::Verdict("membership differs from the residue class".into()))
    }
}

pub fn lattice(base: f64, delta: Option<f64>, x: f64, depth: Option<u32>, radius: u32) -> Outcome {
    let mut w = csv_stdout();
    match (delta, depth) {
        (_, Some(m)) => {
            let limit = average_limit_closed(base, m)?;
            let n_sites = (1u64 << m) * 16;
            let avg = average_bruteforce(base, m, 0, n_sites)?;
            w.write_record(["mode", "closed", "bruteforce", "difference", "sites"])
                .map_err(csv_err)?;
            w.write_record([
                "average".into(),
                f(limit),
                f(avg),
                f((limit - avg).abs()),
                n_sites.to_string(),
            ])
            .map_err(csv_err)?;
        }
        (Some(delta), None) => {
            let closed = lattice_sum_closed(base, delta, x)?;
            let brute = lattice_sum_bruteforce(base, delta, x, radius)?;
            w.write_record(["mode", "closed", "bruteforce", "difference", "tail_bound"])
                .map_err(csv_err)?;
            w.write_record([
                "sum".into(),
                f(closed),
                f(brute),
                f((closed - brute).abs()),
                f(bruteforce_tail_bound(base, delta, x, radius)),
            ])
            .map_err(csv_err)?;
        }
        (None, None) => return Err(Failure::Usage("give either --delta or --depth".into())),
    }
    w.flush()?;
    Ok(())
}

pub fn spectrum(model: &ModelArgs, cache: Option<&Path>, vectors: bool, out: Option<&Path>) -> Outcome {
    let spec = model.spec()?;
    let op = model.operator(&spec)?;
    let key = model.cache_key(&spec);
    let compute = || -> lpdos::Result<SpectralData> {
        let data = lpdos::spectral::spectrum(&op)?;
        if vectors {
            localized_eigenpairs(&op, &data)
        } else {
            Ok(data)
        }
    };
    let data = match cache {
        Some(dir) => load_or_compute(dir, &key, vectors, compute)?.0,
        None => compute()?,
    };
    data.validate(&op)?;
    if let Some(dir) = out {
        let path = key.path_in(dir, vectors);
        write_spectrum(&path, &key, &data)?;
        println!("wrote {}", path.display());
    }
    println!("method={}", data.method);
    println!("N={}", data.len());
    println!("min={}", f(data.eigenvalues[0]));
    println!("max={}", f(data.eigenvalues[data.len() - 1]));
    if let Some((res, norm)) = data.max_defects(&op) {
        println!("max_residual={}", f(res));
        println!("max_norm_defect={}", f(norm));
    }
    Ok(())
}

pub fn ids(model: &ModelArgs, cache: Option<&Path>, out: &Path) -> Outcome {
    let spec = model.spec()?;
    let op = model.operator(&spec)?;
    let data = model.eigenvalues(&spec, &op, cache)?;
    let ids = ids_from_spectrum(&data)?;
    let mut eigs = format!("# method={}\n", data.method);
    for e in ids.eigenvalues() {
        eigs.push_str(&f(*e));
        eigs.push('\n');
    }
    write_file(out, "eigenvalues.txt", eigs.as_bytes())?;
    let mut csv = Vec::new();
    ids.write_csv(&mut csv)?;
    write_file(out, "ids.csv", &csv)?;
    println!(
        "wrote {} and {}",
        out.join("eigenvalues.txt").display(),
        out.join("ids.csv").display()
    );
    Ok(())
}

pub fn localization(model: &ModelArgs, sites: &[usize]) -> Outcome {
    if let Some(&k) = sites.iter().find(|&&k| k >= model.size) {
        return Err(Failure::Usage(format!("site {k} outside [0, {})", model.size)));
    }
    let spec = model.spec()?;
    let op = model.operator(&spec)?;
    let data = lpdos::spectral::spectrum(&op)?;
    let rows = map_eigenpairs(&op, &data.eigenvalues, &EigenpairOptions::default(), |p| {
        if !sites.contains(&p.center) {
            return None;
        }
        let fit = decay_fit_with(p.vector, p.center, DecayRate::MinimizeBound);
        Some((p.center, p.index, p.value, fit))
    })?;
    let mut found: Vec<_> = rows.into_iter().flatten().collect();
    found.sort_by_key(|r| (r.0, r.1));
    let mut w = csv_stdout();
    w.write_record(["k", "index", "eigenvalue", "c", "d", "defect"])
        .map_err(csv_err)?;
    for &k in sites {
        let lambda = if model.free { 0.0 } else { spec.lambda_at(k) };
        let mut any = false;
        for (_, index, value, fit) in found.iter().filter(|r| r.0 == k) {
            any = true;
            let fit = fit.as_ref().map_err(|e| Failure::Numerical(e.to_string()))?;
            w.write_record([
                k.to_string(),
                index.to_string(),
                f(*value),
                f(fit.profile.c),
                f(fit.profile.d),
                f((spec.coupling * value - lambda).abs()),
            ])
            .map_err(csv_err)?;
        }
        if !any {
            w.write_record([
                k.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])
            .map_err(csv_err)?;
            log::warn!("no eigenvector is centred at site {k}");
        }
    }
    w.flush()?;
    Ok(())
}

/// Exponent fitted over the report's own rescaled dyadic levels.
fn level_holder(ids: &IDSFunction, spec: &PotentialSpec, lo: u32, hi: u32) -> Option<f64> {
    let family: Vec<Vec<EnergyInterval>> = (lo..=hi)
        .map(|level| {
            (0..1u64 << level)
                .filter_map(|j| DyadicInterval::new(level, j).ok())
                .map(|i| EnergyInterval::rescaled(&i, spec.coupling))
                .collect()
        })
        .collect();
    holder_probe(ids, &family).ok().map(|h| h.exponent)
}

struct Pipeline {
    spec: PotentialSpec,
    report: ModulusReport,
    extra: serde_json::Value,
}

fn pipeline(
    model: &ModelArgs,
    cache: Option<&Path>,
    levels: Option<(u32, u32)>,
    bulk_margin: usize,
    with_landing: bool,
) -> Result<Pipeline, Failure> {
    let spec = model.spec()?;
    let (lo, hi) = levels.unwrap_or((1, spec.depth));
    if hi > spec.depth {
        return Err(Failure::Usage(format!("level {hi} exceeds depth {}", spec.depth)));
    }
    let op = model.operator(&spec)?;
    let data = model.eigenvalues(&spec, &op, cache)?;
    let ids = ids_from_spectrum(&data)?;
    let spectrum_summary = json!({
        "method": data.method.to_string(),
        "min": data.eigenvalues[0],
        "max": data.eigenvalues[data.len() - 1],
    });
    if model.free {
        let mut report = modulus_of_continuity(&ids, &spec, lo..=hi, None)?;
        let exponent = holder_probe(&ids, &dyadic_family(-2.0, 2.0, 3..=10))?.exponent;
        report.holder_exponent = Some(exponent);
        report.verdict = Some(Verdict::Fail);
        report.note = format!(
            "{}; free operator: eigenvectors are extended, so no decay envelope and no Lipschitz bound exist; \
             fitted Hölder exponent {exponent:.3} over dyadic partitions of [-2, 2) (square-root band edges)",
            report.note
        );
        return Ok(Pipeline {
            spec,
            report,
            extra: json!({ "spectrum": spectrum_summary }),
        });
    }
    let cert = certify_decay(&op, &spec, &data.eigenvalues, bulk_margin, REFERENCE_BASE)?;
    let mut report = modulus_of_continuity(&ids, &spec, lo..=hi, Some(cert.envelope))?;
    report.holder_exponent = level_holder(&ids, &spec, lo, hi);
    let bulk: Vec<_> = cert.bulk().collect();
    let mut extra = json!({
        "spectrum": spectrum_summary,
        "matching": {
            "bijective": true,
            "max_defect": cert.matching.max_defect,
            "max_defect_bulk": cert.matching.max_defect_bulk(op.size(), bulk_margin),
            "defect_limit": 64.0 * spec.coupling * spec.coupling,
        },
        "decay": {
            "envelope": { "c": cert.envelope.c, "d": cert.envelope.d },
            "bulk_vectors": bulk.len(),
            "reference_base": REFERENCE_BASE,
            "max_c_at_reference": bulk.iter().map(|v| v.c_at_reference).fold(0.0, f64::max),
            "min_fitted_d": bulk.iter().map(|v| v.d).fold(f64::INFINITY, f64::min),
            "max_residual": cert.max_residual,
            "max_norm_defect": cert.max_norm_defect,
        },
    });
    if with_landing {
        let centers: Vec<usize> = cert.vectors.iter().map(|v| v.site).collect();
        let mut totals = json!({});
        for (name, convention) in [
            ("exact", LandingConvention::Exact),
            ("midpoint", LandingConvention::Midpoint),
        ] {
            let mut sum = 0usize;
            for j in 0..1u64 << spec.depth {
                let interval = DyadicInterval::new(spec.depth, j)?;
                sum += landing_verification(&data.eigenvalues, &centers, &spec, &interval, convention)?
                    .symmetric_difference;
            }
            totals[name] = json!(sum);
        }
        extra["landing"] = json!({ "level": spec.depth, "symmetric_difference": totals });
    }
    Ok(Pipeline { spec, report, extra })
}

fn verdict(report: &ModulusReport) -> Outcome {
    match (report.verdict, report.theoretical_bound) {
        (Some(Verdict::Fail), Some(bound)) => Err(Failure::Verdict(format!(
            "empirical constant {:e} exceeds 1.1 x bound {bound:e}",
            report.empirical_lipschitz
        ))),
        (Some(Verdict::Fail), None) => Err(Failure::Verdict(format!(
            "no Lipschitz bound: eigenvectors are not localized (Hölder exponent {})",
            report.holder_exponent.map_or("n/a".into(), |h| format!("{h:.3}"))
        ))),
        _ => Ok(()),
    }
}

pub fn modulus(
    model: &ModelArgs,
    cache: Option<&Path>,
    levels: Option<(u32, u32)>,
    bulk_margin: usize,
    out: &Path,
) -> Outcome {
    let run = pipeline(model, cache, levels, bulk_margin, false)?;
    write_file(out, "modulus.json", (run.report.to_json()? + "\n").as_bytes())?;
    let mut csv = Vec::new();
    run.report.write_csv(&mut csv)?;
    write_file(out, "modulus.csv", &csv)?;
    let r = &run.report;
    println!(
        "empirical={} bound={} verdict={}",
        f(r.empirical_lipschitz),
        r.theoretical_bound.map_or("none".into(), f),
        match r.verdict {
            Some(Verdict::Pass) => "PASS",
            _ => "FAIL",
        }
    );
    verdict(r)
}

pub fn report(
    model: &ModelArgs,
    cache: Option<&Path>,
    levels: Option<(u32, u32)>,
    bulk_margin: usize,
    out: &Path,
) -> Outcome {
    let run = pipeline(model, cache, levels, bulk_margin, true)?;
    let mut doc = json!({
        "tool_version": TOOL_VERSION,
        "config": {
            "depth": run.spec.depth,
            "epsilon": run.spec.coupling,
            "epsilon_valid": run.spec.is_valid(),
            "N": model.size,
            "boundary": model.boundary.to_string(),
            "offset": run.spec.offset,
            "free": model.free,
            "bulk_margin": bulk_margin,
        },
        "modulus": serde_json::to_value(&run.report).map_err(|e| Failure::Numerical(e.to_string()))?,
    });
    if let (Some(obj), Some(extra)) = (doc.as_object_mut(), run.extra.as_object()) {
        for (k, v) in extra {
            obj.insert(k.clone(), v.clone());
        }
    }
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Numerical(e.to_string()))?;
    write_file(out, "report.json", (text + "\n").as_bytes())?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "wrote {}", out.join("report.json").display())?;
    verdict(&run.report)
}
