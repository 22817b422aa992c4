//! Points CSV input and the spectrum table.

use std::io::{Read, Write};

use pnkit_core::geometry::{ChartId, ChartPoint, OrbitSpec};
use pnkit_core::models::match_spectra;
use pnkit_core::pn::{nijenhuis_spectrum, DEFAULT_CLUSTER_TOL};

use crate::cache::Shared;
use crate::config::RunConfig;
use crate::suite::{build_model, constants, SuiteError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("row {row}: expected {expected} columns, got {got}")]
    Width { row: usize, expected: usize, got: usize },
    #[error("row {row}: {message}")]
    Value { row: usize, message: String },
}

/// One point per row, `2k(n−k)` decimal columns, optional header row.
pub fn read_points<R: Read>(input: R, spec: &OrbitSpec, chart: &ChartId) -> Result<Vec<ChartPoint>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let expected = spec.dim();
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let coords = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(IoError::Value {
                    row,
                    message: e.to_string(),
                })
            }
        };
        if coords.len() != expected {
            return Err(IoError::Width {
                row,
                expected,
                got: coords.len(),
            });
        }
        let p = ChartPoint::new(spec, coords, chart.clone()).map_err(|e| IoError::Value {
            row,
            message: e.to_string(),
        })?;
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Chart coordinates, GT values, Nijenhuis eigenvalues, match distance and
/// smoothness flags, one row per point.
pub fn spectrum_dump<W: Write>(cfg: &RunConfig, points: &[ChartPoint], out: W) -> Result<(), DumpError> {
    cfg.validate().map_err(SuiteError::from)?;
    let spec = cfg.spec();
    let k = constants(cfg);
    let model = build_model(cfg, &k).map_err(SuiteError::from)?;
    let shared = Shared::empty(&model);
    let memo = shared.memo();
    let (d, m) = (spec.dim(), spec.half_dim());
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    header.extend((0..m).map(|i| format!("gt{i}")));
    header.extend((0..m).map(|i| format!("eig{i}")));
    header.push("match_distance".into());
    header.extend((0..m).map(|i| format!("smooth{i}")));
    writer.write_record(&header).map_err(IoError::from)?;
    for p in points {
        let gt = memo.gt(&p.coords).map_err(SuiteError::from)?;
        let n = memo.get(&p.coords).map_err(SuiteError::from)?.n();
        let clusters = nijenhuis_spectrum(&n, DEFAULT_CLUSTER_TOL).map_err(SuiteError::from)?;
        let eigen: Vec<f64> = clusters
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity / 2))
            .collect();
        let values = gt.flat();
        let distance = match_spectra(&clusters, &values).max_distance;
        let mut row: Vec<String> = p.coords.iter().map(f64::to_string).collect();
        let pad = |vals: &[f64]| {
            (0..m)
                .map(|i| vals.get(i).map_or(String::new(), f64::to_string))
                .collect::<Vec<_>>()
        };
        row.extend(pad(&values));
        row.extend(pad(&eigen));
        row.push(distance.to_string());
        let flags: Vec<bool> = gt.flags.iter().flatten().copied().collect();
        row.extend((0..m).map(|i| flags.get(i).map_or(String::new(), bool::to_string)));
        writer.write_record(&row).map_err(IoError::from)?;
    }
    writer.flush().map_err(IoError::from)?;
    Ok(())
}
