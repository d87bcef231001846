//! Number formatting and atomic file output shared by the CSV writers.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// 17 significant digits, enough for an exact `f64` round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `path` by filling a sibling temp file and renaming it over the
/// target, so readers never see a partial file.
pub fn write_atomic<F>(path: &Path, fill: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let file = fs::File::create(&tmp)?;
        let mut buf = io::BufWriter::new(file);
        fill(&mut buf)?;
        buf.flush()?;
        buf.get_ref().sync_all()?;
    }
    fs::rename(&tmp, path)
}
