//! Measurement CSV schema.
//!
//! ```text
//! # epsrec plane dataset v1
//! # unit: dimensionless-0.1m
//! # kind: scattered
//! # plane: x_min=-2.5 x_max=2.5 nx=26 y_min=-2.5 y_max=2.5 ny=26 z_level=-0.75
//! # freq_count: 300
//! freq_ghz,x,y,re,im
//! 1.0,-2.5,-2.5,0.0012,-0.0034
//! ...
//! ```
//!
//! Rows are emitted frequency-major, then y, then x (x fastest). Ingest
//! accepts any row order but requires every `(freq, x, y)` lattice point to
//! appear exactly once. Floats are printed in shortest round-trip form, so
//! write → read → write is byte-stable and complex samples survive exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::plane::{FieldKind, PlaneDataset, PlaneGeometry};

pub const UNIT_TAG: &str = "dimensionless-0.1m";
const HEADER_MAGIC: &str = "# epsrec plane dataset v1";

pub fn write_plane_csv(path: &Path, ds: &PlaneDataset) -> Result<()> {
    let mut out = String::new();
    let g = &ds.geometry;
    writeln!(out, "{HEADER_MAGIC}").unwrap();
    writeln!(out, "# unit: {UNIT_TAG}").unwrap();
    writeln!(out, "# kind: {}", ds.kind.tag()).unwrap();
    writeln!(
        out,
        "# plane: x_min={} x_max={} nx={} y_min={} y_max={} ny={} z_level={}",
        g.x_min, g.x_max, g.nx, g.y_min, g.y_max, g.ny, g.z_level
    )
    .unwrap();
    writeln!(out, "# freq_count: {}", ds.freqs_ghz.len()).unwrap();
    writeln!(out, "freq_ghz,x,y,re,im").unwrap();
    for (fi, freq) in ds.freqs_ghz.iter().enumerate() {
        let row = &ds.rows[fi];
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let v = row[g.index(ix, iy)];
                writeln!(out, "{},{},{},{},{}", freq, g.x(ix), g.y(iy), v.re, v.im).unwrap();
            }
        }
    }
    super::atomic_write(path, &out)
}

struct Header {
    kind: FieldKind,
    geometry: PlaneGeometry,
    freq_count: usize,
}

fn parse_header(lines: &mut std::str::Lines) -> Result<Header> {
    let magic = lines
        .next()
        .ok_or_else(|| Error::Schema("empty file".into()))?;
    if magic.trim() != HEADER_MAGIC {
        return Err(Error::Schema(format!("unexpected first line \"{magic}\"")));
    }
    let mut unit = None;
    let mut kind = None;
    let mut plane = None;
    let mut freq_count = None;
    for _ in 0..4 {
        let line = lines
            .next()
            .ok_or_else(|| Error::Schema("truncated header".into()))?;
        let line = line
            .strip_prefix('#')
            .ok_or_else(|| Error::Schema(format!("expected header comment, got \"{line}\"")))?
            .trim();
        if let Some(v) = line.strip_prefix("unit:") {
            unit = Some(v.trim().to_string());
        } else if let Some(v) = line.strip_prefix("kind:") {
            kind = Some(FieldKind::parse(v.trim())?);
        } else if let Some(v) = line.strip_prefix("plane:") {
            plane = Some(parse_plane_spec(v.trim())?);
        } else if let Some(v) = line.strip_prefix("freq_count:") {
            freq_count = Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Schema(format!("bad freq_count: {e}")))?,
            );
        }
    }
    let unit = unit.ok_or_else(|| Error::Schema("missing unit tag".into()))?;
    if unit != UNIT_TAG {
        return Err(Error::Unit {
            expected: UNIT_TAG.into(),
            found: unit,
        });
    }
    Ok(Header {
        kind: kind.ok_or_else(|| Error::Schema("missing kind".into()))?,
        geometry: plane.ok_or_else(|| Error::Schema("missing plane spec".into()))?,
        freq_count: freq_count.ok_or_else(|| Error::Schema("missing freq_count".into()))?,
    })
}

fn parse_plane_spec(spec: &str) -> Result<PlaneGeometry> {
    let mut kv = BTreeMap::new();
    for part in spec.split_whitespace() {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Schema(format!("bad plane field \"{part}\"")))?;
        kv.insert(key.to_string(), value.to_string());
    }
    let get_f = |key: &str| -> Result<f64> {
        kv.get(key)
            .ok_or_else(|| Error::Schema(format!("plane spec missing {key}")))?
            .parse()
            .map_err(|e| Error::Schema(format!("bad {key}: {e}")))
    };
    let get_n = |key: &str| -> Result<usize> {
        kv.get(key)
            .ok_or_else(|| Error::Schema(format!("plane spec missing {key}")))?
            .parse()
            .map_err(|e| Error::Schema(format!("bad {key}: {e}")))
    };
    PlaneGeometry::new(
        (get_f("x_min")?, get_f("x_max")?),
        (get_f("y_min")?, get_f("y_max")?),
        get_n("nx")?,
        get_n("ny")?,
        get_f("z_level")?,
    )
}

/// Read a measurement CSV into a dataset (wavenumbers derived from the GHz
/// sweep labels).
pub fn ingest_measurements(path: &Path) -> Result<PlaneDataset> {
    let text = std::fs::read_to_string(path)?;
    parse_plane_csv(&text)
}

/// Alias for reading intermediate datasets (same schema).
pub fn read_plane_csv(path: &Path) -> Result<PlaneDataset> {
    ingest_measurements(path)
}

pub(crate) fn parse_plane_csv(text: &str) -> Result<PlaneDataset> {
    let mut lines = text.lines();
    let header = parse_header(&mut lines)?;
    let g = header.geometry.clone();

    let columns = lines
        .next()
        .ok_or_else(|| Error::Schema("missing column row".into()))?;
    if columns.trim() != "freq_ghz,x,y,re,im" {
        return Err(Error::Schema(format!("unexpected columns \"{columns}\"")));
    }

    // freq bits -> per-sample slot, using the lattice index derived from
    // coordinates; BTreeMap keeps frequencies sorted and deterministic.
    let mut per_freq: BTreeMap<u64, Vec<Option<Complex64>>> = BTreeMap::new();
    let mut freq_of_bits: BTreeMap<u64, f64> = BTreeMap::new();

    let snap = |v: f64, min: f64, step: f64, n: usize, what: &str| -> Result<usize> {
        let fi = (v - min) / step;
        let i = fi.round();
        if (fi - i).abs() > 1e-6 || i < 0.0 || i as usize >= n {
            return Err(Error::Schema(format!("{what} = {v} is off the lattice")));
        }
        Ok(i as usize)
    };

    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut next_f = |name: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| {
                    Error::Schema(format!("row {}: missing {name}", line_no + 7))
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Schema(format!("row {}: bad {name}: {e}", line_no + 7)))
        };
        let freq = next_f("freq_ghz")?;
        let x = next_f("x")?;
        let y = next_f("y")?;
        let re = next_f("re")?;
        let im = next_f("im")?;

        let ix = snap(x, g.x_min, g.dx(), g.nx, "x")?;
        let iy = snap(y, g.y_min, g.dy(), g.ny, "y")?;
        let bits = freq.to_bits();
        freq_of_bits.entry(bits).or_insert(freq);
        let slot = per_freq
            .entry(bits)
            .or_insert_with(|| vec![None; g.len()]);
        let cell = &mut slot[g.index(ix, iy)];
        if cell.is_some() {
            return Err(Error::Schema(format!(
                "duplicate sample at freq = {freq}, x = {x}, y = {y}"
            )));
        }
        *cell = Some(Complex64::new(re, im));
    }

    if per_freq.len() != header.freq_count {
        return Err(Error::Schema(format!(
            "header promises {} frequencies, file has {}",
            header.freq_count,
            per_freq.len()
        )));
    }

    let mut freqs = Vec::with_capacity(per_freq.len());
    let mut rows = Vec::with_capacity(per_freq.len());
    for (bits, samples) in per_freq {
        let freq = freq_of_bits[&bits];
        let mut gaps = Vec::new();
        let mut row = Vec::with_capacity(g.len());
        for (i, s) in samples.into_iter().enumerate() {
            match s {
                Some(v) => row.push(v),
                None => {
                    if gaps.len() < 8 {
                        let (x, y) = g.coords(i);
                        gaps.push(format!("(freq={freq}, x={x}, y={y})"));
                    } else if gaps.len() == 8 {
                        gaps.push("…".to_string());
                    } else {
                        gaps.truncate(9);
                    }
                    row.push(Complex64::new(0.0, 0.0));
                }
            }
        }
        if !gaps.is_empty() {
            return Err(Error::Schema(format!(
                "missing lattice points: {}",
                gaps.join(", ")
            )));
        }
        freqs.push(freq);
        rows.push(row);
    }

    // Frequencies sorted by bit pattern coincide with value order for
    // positive floats; PlaneDataset::validate re-checks monotonicity.
    PlaneDataset::from_freqs(g, header.kind, freqs, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units;

    fn sample_dataset() -> PlaneDataset {
        let geom = PlaneGeometry::new((-0.4, 0.4), (-0.2, 0.2), 5, 3, -0.75).unwrap();
        let freqs = vec![2.98, 3.1, 3.19];
        let rows: Vec<Vec<Complex64>> = freqs
            .iter()
            .map(|&f| {
                (0..15)
                    .map(|i| Complex64::new((f + i as f64 * 0.31).sin(), (f * i as f64).cos() / 3.0))
                    .collect()
            })
            .collect();
        PlaneDataset::from_freqs(geom, FieldKind::Scattered, freqs, rows).unwrap()
    }

    #[test]
    fn round_trip_is_lossless_and_byte_stable() {
        let dir = std::env::temp_dir().join(format!("epsrec-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ds.csv");
        let ds = sample_dataset();
        write_plane_csv(&path, &ds).unwrap();
        let first = std::fs::read_to_string(&path).unwrap();
        let back = ingest_measurements(&path).unwrap();
        assert_eq!(back.rows, ds.rows);
        assert_eq!(back.freqs_ghz, ds.freqs_ghz);
        write_plane_csv(&path, &back).unwrap();
        let second = std::fs::read_to_string(&path).unwrap();
        assert_eq!(first, second);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn wavenumber_conversion_from_ghz() {
        let ds = sample_dataset();
        let k = ds.wavenumbers[1];
        assert!((k - units::wavenumber_from_ghz(3.1)).abs() < 1e-15);
        assert!((k - 6.49).abs() < 0.01);
    }

    #[test]
    fn missing_lattice_points_are_reported() {
        let ds = sample_dataset();
        let dir = std::env::temp_dir().join(format!("epsrec-csv-gap-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ds.csv");
        write_plane_csv(&path, &ds).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        // Drop one data line.
        let cut = text.lines().count() - 2;
        text = text
            .lines()
            .enumerate()
            .filter(|(i, _)| *i != cut)
            .map(|(_, l)| l)
            .collect::<Vec<_>>()
            .join("\n");
        std::fs::write(&path, text).unwrap();
        match ingest_measurements(&path) {
            Err(Error::Schema(msg)) => assert!(msg.contains("missing lattice points"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn wrong_unit_tag_is_rejected() {
        let ds = sample_dataset();
        let dir = std::env::temp_dir().join(format!("epsrec-csv-unit-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ds.csv");
        write_plane_csv(&path, &ds).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace(UNIT_TAG, "metres");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            ingest_measurements(&path),
            Err(Error::Unit { .. })
        ));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn empty_file_is_a_schema_error() {
        assert!(matches!(
            parse_plane_csv(""),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn full_sweep_dimensions() {
        // 300 frequencies on a 51 x 50 lattice: 2550 samples per frequency.
        let geom = PlaneGeometry::new((-5.0, 5.0), (-4.9, 4.9), 51, 50, -7.5).unwrap();
        let freqs: Vec<f64> = (0..300).map(|i| 1.0 + 9.0 * i as f64 / 299.0).collect();
        let rows = vec![vec![Complex64::new(1.0, -1.0); geom.len()]; 300];
        let ds = PlaneDataset::from_freqs(geom, FieldKind::Scattered, freqs, rows).unwrap();
        let mut text = String::new();
        {
            use std::fmt::Write;
            let g = &ds.geometry;
            writeln!(text, "{HEADER_MAGIC}").unwrap();
            writeln!(text, "# unit: {UNIT_TAG}").unwrap();
            writeln!(text, "# kind: scattered").unwrap();
            writeln!(
                text,
                "# plane: x_min={} x_max={} nx={} y_min={} y_max={} ny={} z_level={}",
                g.x_min, g.x_max, g.nx, g.y_min, g.y_max, g.ny, g.z_level
            )
            .unwrap();
            writeln!(text, "# freq_count: 300").unwrap();
            writeln!(text, "freq_ghz,x,y,re,im").unwrap();
            for (fi, f) in ds.freqs_ghz.iter().enumerate() {
                let row = &ds.rows[fi];
                for iy in 0..g.ny {
                    for ix in 0..g.nx {
                        let v = row[g.index(ix, iy)];
                        writeln!(text, "{},{},{},{},{}", f, g.x(ix), g.y(iy), v.re, v.im)
                            .unwrap();
                    }
                }
            }
        }
        let parsed = parse_plane_csv(&text).unwrap();
        assert_eq!(parsed.n_wavenumbers(), 300);
        assert_eq!(parsed.rows[0].len(), 2550);
    }
}
