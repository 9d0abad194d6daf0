//! Plain-text spectral snapshots.
//!
//! ```text
//! # zonalsphere-spectral v1 K=<K>
//! k khat re im
//! ```
//!
//! One coefficient per line, 17 significant digits. Coefficients with
//! magnitude below `1e-300` are omitted and read back as zero.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{SpectralField, WaveVector};
use crate::error::{Error, Result};

const MAGIC: &str = "# zonalsphere-spectral v1 K=";
const OMIT_BELOW: f64 = 1e-300;

pub fn write_snapshot<W: Write>(field: &SpectralField, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}{}", field.truncation())?;
    for (wv, c) in field.modes() {
        if c.norm() < OMIT_BELOW {
            continue;
        }
        writeln!(out, "{} {} {:.16e} {:.16e}", wv.degree(), wv.order(), c.re, c.im)?;
    }
    Ok(())
}

/// Reads a snapshot. The field is flagged real when the stored
/// coefficients satisfy the real-field symmetry exactly.
pub fn read_snapshot<R: BufRead>(input: R) -> Result<SpectralField> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Snapshot("empty input".into()))??;
    let truncation: usize = header
        .trim()
        .strip_prefix(MAGIC)
        .ok_or_else(|| Error::Snapshot(format!("bad header {header:?}")))?
        .trim()
        .parse()
        .map_err(|e| Error::Snapshot(format!("bad truncation: {e}")))?;
    let mut field = SpectralField::zeros(truncation, false);
    for (n, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Snapshot(format!("line {}: {what}", n + 2));
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(bad("expected `k khat re im`"));
        }
        let k: usize = parts[0].parse().map_err(|_| bad("degree"))?;
        let m: isize = parts[1].parse().map_err(|_| bad("order"))?;
        let re: f64 = parts[2].parse().map_err(|_| bad("real part"))?;
        let im: f64 = parts[3].parse().map_err(|_| bad("imaginary part"))?;
        let wv = WaveVector::new(k, m).map_err(|_| bad("order out of range"))?;
        if k > truncation {
            return Err(bad("degree beyond truncation"));
        }
        field.set(wv, Complex64::new(re, im));
    }
    if field.symmetry_defect() == 0.0 {
        field.set_real_flag(true);
    }
    Ok(field)
}

pub fn save_snapshot(field: &SpectralField, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_snapshot(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<SpectralField> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}
