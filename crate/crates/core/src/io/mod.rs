//! File formats: CSV measurement/plane datasets, legacy-VTK volume export,
//! JSON result records. All writes are atomic (write to a temp file in the
//! same directory, then rename).

mod csv;
mod result;
mod vtk;

pub use csv::{ingest_measurements, read_plane_csv, write_plane_csv, UNIT_TAG};
pub use result::{write_result_json, ResultRecord};
pub use vtk::{read_vtk_volume, write_vtk_volume};

use std::path::Path;

use crate::error::Result;

/// Write `contents` to `path` atomically.
pub(crate) fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = path.to_path_buf();
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    tmp.set_file_name(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
