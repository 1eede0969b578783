//! Legacy-VTK structured-points export of the recovered coefficient.
//!
//! Values are printed in shortest round-trip form so a re-import reproduces
//! the field bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::PermittivityField;
use crate::grid::Domain;

pub fn write_vtk_volume(path: &Path, eps: &PermittivityField) -> Result<()> {
    let d = &eps.domain;
    let mut out = String::new();
    writeln!(out, "# vtk DataFile Version 3.0").unwrap();
    writeln!(out, "epsrec reconstructed relative permittivity").unwrap();
    writeln!(out, "ASCII").unwrap();
    writeln!(out, "DATASET STRUCTURED_POINTS").unwrap();
    writeln!(out, "DIMENSIONS {} {} {}", d.nx, d.ny, d.nz).unwrap();
    writeln!(out, "ORIGIN {} {} {}", d.x_min, d.y_min, d.z_min).unwrap();
    writeln!(out, "SPACING {} {} {}", d.dx(), d.dy(), d.dz()).unwrap();
    writeln!(out, "POINT_DATA {}", d.len()).unwrap();
    writeln!(out, "SCALARS eps_r double 1").unwrap();
    writeln!(out, "LOOKUP_TABLE default").unwrap();
    for v in &eps.data {
        writeln!(out, "{v}").unwrap();
    }
    super::atomic_write(path, &out)
}

pub fn read_vtk_volume(path: &Path) -> Result<PermittivityField> {
    let text = std::fs::read_to_string(path)?;
    parse_vtk_volume(&text)
}

fn parse_vtk_volume(text: &str) -> Result<PermittivityField> {
    let mut lines = text.lines();
    let mut expect = |prefix: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("missing \"{prefix}\" line")))?;
        if !line.starts_with(prefix) {
            return Err(Error::Schema(format!(
                "expected \"{prefix}\", got \"{line}\""
            )));
        }
        Ok(line[prefix.len()..].trim().to_string())
    };

    expect("# vtk DataFile Version")?;
    let _title = lines.next();
    let format = lines.next().unwrap_or_default();
    if format.trim() != "ASCII" {
        return Err(Error::Schema("only ASCII VTK is supported".into()));
    }
    let dataset = lines.next().unwrap_or_default();
    if dataset.trim() != "DATASET STRUCTURED_POINTS" {
        return Err(Error::Schema("expected STRUCTURED_POINTS dataset".into()));
    }

    let mut expect = |prefix: &str| -> Result<Vec<String>> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("missing \"{prefix}\" line")))?;
        let rest = line
            .strip_prefix(prefix)
            .ok_or_else(|| Error::Schema(format!("expected \"{prefix}\", got \"{line}\"")))?;
        Ok(rest.split_whitespace().map(|s| s.to_string()).collect())
    };

    let dims = expect("DIMENSIONS")?;
    let origin = expect("ORIGIN")?;
    let spacing = expect("SPACING")?;
    let point_data = expect("POINT_DATA")?;
    let scalars = expect("SCALARS")?;
    if scalars.first().map(String::as_str) != Some("eps_r") {
        return Err(Error::Schema("scalar field must be named eps_r".into()));
    }
    let _lookup = expect("LOOKUP_TABLE")?;

    let parse_n = |v: &str| -> Result<usize> {
        v.parse()
            .map_err(|e| Error::Schema(format!("bad integer \"{v}\": {e}")))
    };
    let parse_f = |v: &str| -> Result<f64> {
        v.parse()
            .map_err(|e| Error::Schema(format!("bad float \"{v}\": {e}")))
    };
    if dims.len() != 3 || origin.len() != 3 || spacing.len() != 3 {
        return Err(Error::Schema("malformed geometry lines".into()));
    }
    let (nx, ny, nz) = (parse_n(&dims[0])?, parse_n(&dims[1])?, parse_n(&dims[2])?);
    let (ox, oy, oz) = (parse_f(&origin[0])?, parse_f(&origin[1])?, parse_f(&origin[2])?);
    let (sx, sy, sz) = (
        parse_f(&spacing[0])?,
        parse_f(&spacing[1])?,
        parse_f(&spacing[2])?,
    );
    let n_points = parse_n(&point_data[0])?;
    if n_points != nx * ny * nz {
        return Err(Error::Schema("POINT_DATA count mismatch".into()));
    }

    let domain = Domain::new(
        (ox, ox + sx * (nx - 1) as f64),
        (oy, oy + sy * (ny - 1) as f64),
        (oz, oz + sz * (nz - 1) as f64),
        (nx, ny, nz),
    )?;

    let mut data = Vec::with_capacity(n_points);
    for line in lines {
        for tok in line.split_whitespace() {
            data.push(parse_f(tok)?);
        }
    }
    if data.len() != n_points {
        return Err(Error::Schema(format!(
            "expected {n_points} values, found {}",
            data.len()
        )));
    }
    Ok(PermittivityField { domain, data })
}
