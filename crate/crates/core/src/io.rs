//! CSV and JSON output with atomic replacement of finished files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::bifurcation::EquilibriumBranch;
use crate::error::{Error, Result};
use crate::network::SimRecord;

/// Header of the time-series CSV written for simulations and mean-field runs.
pub const SERIES_HEADER: &str = "time,zr_re,zr_im,znr_re,znr_im,f_nr";

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename, so readers never see a partial file.
/// Fails when `path` exists unless `force` is set.
pub fn write_atomic(path: &Path, contents: &[u8], force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::OutputExists(path.display().to_string()));
    }
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T, force: bool) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes(), force)
}

/// Time series of a simulation record as CSV (`.` decimals, `\n` endings).
pub fn series_csv(record: &SimRecord) -> String {
    let mut out = String::with_capacity(64 * record.times.len() + 64);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for i in 0..record.times.len() {
        let zr = record.z_r_series[i];
        let znr = record.z_nr_series[i];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            record.times[i], zr.re, zr.im, znr.re, znr.im, record.f_nr_series[i]
        );
    }
    out
}

/// Branch points as CSV: `param,<components>,f_nr,stable,eig_re_1,eig_im_1,…`.
/// Branches are written one after another in the order given.
pub fn branch_csv(branches: &[EquilibriumBranch], components: &[&str]) -> String {
    let dim = components.len();
    let mut out = String::new();
    out.push_str("param");
    for c in components {
        out.push(',');
        out.push_str(c);
    }
    out.push_str(",f_nr,stable");
    for k in 1..=dim {
        let _ = write!(out, ",eig_re_{k},eig_im_{k}");
    }
    out.push('\n');
    for branch in branches {
        for p in &branch.points {
            let _ = write!(out, "{}", p.param);
            for v in &p.state {
                let _ = write!(out, ",{v}");
            }
            let _ = write!(out, ",{},{}", p.f_nr, u8::from(p.stable));
            for e in &p.eigenvalues {
                let _ = write!(out, ",{},{}", e.re, e.im);
            }
            out.push('\n');
        }
    }
    out
}
