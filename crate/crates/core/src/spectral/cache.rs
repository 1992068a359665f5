//! Plain-text spectrum files.
//!
//! ```text
//! # lpdos-spectrum
//! # tool_version=0.1.0
//! # depth=8
//! # epsilon=7.8125e-3
//! # size=8192
//! # boundary=dirichlet
//! # offset=0
//! # free=false
//! # method=sturm-bisection
//! # eigenvectors=false
//! -1.9999999999999998e0
//! ...
//! # vectors
//! <one line per eigenvector, space separated>
//! ```
//!
//! Numbers use 17 significant digits and read back bit-exactly.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::operator::Boundary;
use super::{SpectralData, SpectralMethod};
use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const MAGIC: &str = "# lpdos-spectrum";

/// Everything that determines a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheKey {
    pub depth: u32,
    pub epsilon: f64,
    pub size: usize,
    pub boundary: Boundary,
    pub offset: i64,
    /// Potential switched off.
    pub free: bool,
}

impl CacheKey {
    pub fn file_name(&self, with_vectors: bool) -> String {
        format!(
            "spectrum-m{}-e{:016x}-n{}-{}-o{}{}{}-v{}.txt",
            self.depth,
            self.epsilon.to_bits(),
            self.size,
            self.boundary,
            self.offset,
            if self.free { "-free" } else { "" },
            if with_vectors { "-vec" } else { "" },
            TOOL_VERSION
        )
    }

    pub fn path_in(&self, dir: &Path, with_vectors: bool) -> PathBuf {
        dir.join(self.file_name(with_vectors))
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_spectrum(path: &Path, key: &CacheKey, data: &SpectralData) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "# tool_version={TOOL_VERSION}")?;
        writeln!(w, "# depth={}", key.depth)?;
        writeln!(w, "# epsilon={:e}", key.epsilon)?;
        writeln!(w, "# size={}", key.size)?;
        writeln!(w, "# boundary={}", key.boundary)?;
        writeln!(w, "# offset={}", key.offset)?;
        writeln!(w, "# free={}", key.free)?;
        writeln!(w, "# method={}", data.method)?;
        writeln!(w, "# eigenvectors={}", data.eigenvectors.is_some())?;
        for &e in &data.eigenvalues {
            writeln!(w, "{}", fmt_f64(e))?;
        }
        if let Some(vectors) = &data.eigenvectors {
            writeln!(w, "# vectors")?;
            for v in vectors {
                let line: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Format(format!("bad number '{s}'")))
}

pub fn read_spectrum(path: &Path) -> Result<(CacheKey, SpectralData)> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(l)) if l == MAGIC => {}
        _ => return Err(Error::Format("missing header line".into())),
    }
    let mut header = std::collections::HashMap::new();
    let mut values = Vec::new();
    let mut vectors: Option<Vec<Vec<f64>>> = None;
    for line in lines {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# ") {
            if rest == "vectors" {
                vectors = Some(Vec::new());
            } else if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.to_string(), v.to_string());
            } else {
                return Err(Error::Format(format!("bad header line '{line}'")));
            }
        } else if let Some(vs) = vectors.as_mut() {
            vs.push(line.split(' ').map(parse_f64).collect::<Result<_>>()?);
        } else {
            values.push(parse_f64(&line)?);
        }
    }
    let get = |k: &str| {
        header
            .get(k)
            .ok_or_else(|| Error::Format(format!("missing header field '{k}'")))
    };
    let bad = |k: &str| Error::Format(format!("bad header field '{k}'"));
    if get("tool_version")? != TOOL_VERSION {
        return Err(Error::Format("written by a different tool version".into()));
    }
    let key = CacheKey {
        depth: get("depth")?.parse().map_err(|_| bad("depth"))?,
        epsilon: get("epsilon")?.parse().map_err(|_| bad("epsilon"))?,
        size: get("size")?.parse().map_err(|_| bad("size"))?,
        boundary: get("boundary")?.parse().map_err(|_| bad("boundary"))?,
        offset: get("offset")?.parse().map_err(|_| bad("offset"))?,
        free: get("free")?.parse().map_err(|_| bad("free"))?,
    };
    let method: SpectralMethod = get("method")?.parse()?;
    if values.len() != key.size {
        return Err(Error::Format(format!(
            "expected {} eigenvalues, found {}",
            key.size,
            values.len()
        )));
    }
    let mut data = SpectralData::from_eigenvalues(values, method);
    if let Some(vs) = vectors {
        if vs.len() != key.size || vs.iter().any(|v| v.len() != key.size) {
            return Err(Error::Format("eigenvector block has the wrong shape".into()));
        }
        data.set_vectors(vs);
    }
    Ok((key, data))
}

/// Read the cached spectrum for `key` from `dir`, or compute and store it.
/// A file whose header disagrees with `key` is recomputed.
pub fn load_or_compute(
    dir: &Path,
    key: &CacheKey,
    with_vectors: bool,
    compute: impl FnOnce() -> Result<SpectralData>,
) -> Result<(SpectralData, bool)> {
    let path = key.path_in(dir, with_vectors);
    if path.exists() {
        match read_spectrum(&path) {
            Ok((k, data)) if k == *key && data.eigenvectors.is_some() == with_vectors => {
                return Ok((data, true));
            }
            Ok(_) => log::warn!("cache file {} does not match the request", path.display()),
            Err(e) => log::warn!("ignoring unreadable cache file {}: {e}", path.display()),
        }
    }
    let data = compute()?;
    write_spectrum(&path, key, &data)?;
    Ok((data, false))
}
