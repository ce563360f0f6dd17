//! File formats: space descriptions, strata files, CSV tables and atomic
//! output.

mod space_file;
mod tables;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub use space_file::{parse_space, parse_strata, LinkSection, SpaceFile, StrataFile, WarpSection};
pub use tables::{
    read_solution_csv, write_continuation_csv, write_fit_csv, write_solution_csv, write_spectrum_csv, FitRow,
    SolutionTable,
};

/// Full-precision float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
