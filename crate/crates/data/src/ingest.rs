use crate::{DataError, PoseDataset, SourceTag};
use grove_env::{EnvSpec, PoseVector};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

const AXES: [char; 3] = ['x', 'y', 'z'];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IngestMode {
    /// Malformed rows are skipped and reported.
    Lenient,
    /// The first malformed row aborts the ingest.
    Strict,
}

#[derive(Debug, Default)]
pub struct IngestReport {
    /// (1-based file line, human-readable reason) per skipped row.
    pub skipped: Vec<(u64, String)>,
    pub warnings: Vec<String>,
}

fn expected_header(spec: &EnvSpec) -> Vec<String> {
    let mut cols = Vec::with_capacity(3 * spec.num_joints());
    for joint in spec.joint_names {
        for axis in AXES {
            cols.push(format!("{joint}_{axis}"));
        }
    }
    cols
}

/// Reads a pose corpus from CSV. The header must name the 3J angle columns
/// `<joint>_{x|y|z}` in the environment's joint order.
pub fn ingest_csv(
    path: &Path,
    spec: &EnvSpec,
    mode: IngestMode,
) -> Result<(PoseDataset, IngestReport), DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;
    let expected = expected_header(spec);

    let headers = reader.headers()?.clone();
    if headers.len() != expected.len() {
        return Err(DataError::MissingColumns {
            expected: expected.len(),
            got: headers.len(),
        });
    }
    for (i, want) in expected.iter().enumerate() {
        let got = headers.get(i).unwrap_or("");
        if got != want {
            return Err(DataError::HeaderMismatch {
                position: i + 1,
                expected: want.clone(),
                got: got.to_string(),
            });
        }
    }

    let mut dataset = PoseDataset::new(spec.num_joints());
    let mut report = IngestReport::default();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(&record, &expected, line) {
            Ok(flat) => {
                dataset
                    .push(PoseVector::from_flat(&flat), SourceTag::Csv)
                    .expect("row was range-checked");
            }
            Err(e) => match mode {
                IngestMode::Strict => return Err(e),
                IngestMode::Lenient => report.skipped.push((line, e.to_string())),
            },
        }
    }
    if dataset.is_empty() {
        report
            .warnings
            .push(format!("{}: no data rows, dataset is empty", path.display()));
    }
    Ok((dataset, report))
}

fn parse_row(
    record: &csv::StringRecord,
    columns: &[String],
    line: u64,
) -> Result<Vec<f64>, DataError> {
    if record.len() != columns.len() {
        return Err(DataError::RowWidth {
            line,
            expected: columns.len(),
            got: record.len(),
        });
    }
    let mut flat = Vec::with_capacity(columns.len());
    for (i, cell) in record.iter().enumerate() {
        let value: f64 = cell.trim().parse().map_err(|_| DataError::NonNumeric {
            line,
            column: columns[i].clone(),
            value: cell.to_string(),
        })?;
        if !value.is_finite() || value.abs() > PI + 1e-9 {
            return Err(DataError::AngleRange {
                line,
                column: columns[i].clone(),
                value,
            });
        }
        flat.push(value);
    }
    Ok(flat)
}

/// Writes a corpus as CSV with angles at 9 significant digits. Ingesting the
/// produced file and exporting again reproduces it byte for byte.
pub fn export_csv(dataset: &PoseDataset, spec: &EnvSpec, path: &Path) -> Result<(), DataError> {
    assert_eq!(dataset.num_joints, spec.num_joints());
    let mut out = String::new();
    out.push_str(&expected_header(spec).join(","));
    out.push('\n');
    for pose in &dataset.poses {
        let flat = pose.flat();
        for (i, v) in flat.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.8e}");
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use grove_env::env_spec;
    use std::io::Write;

    fn write_file(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        let mut f = fs::File::create(&p).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        p
    }

    fn cartpole_header() -> String {
        "cart_x,cart_y,cart_z,pole_x,pole_y,pole_z".to_string()
    }

    #[test]
    fn well_formed_file_ingests_all_rows() {
        let dir = tempfile::tempdir().unwrap();
        let spec = env_spec("cartpole").unwrap();
        let body = format!(
            "{}\n0.1,0.2,0.3,-0.1,-0.2,-0.3\n0,0,0,0,0,0\n1.5,1.5,1.5,1.5,1.5,1.5\n",
            cartpole_header()
        );
        let path = write_file(dir.path(), "poses.csv", &body);
        let (d, report) = ingest_csv(&path, spec, IngestMode::Strict).unwrap();
        assert_eq!(d.len(), 3);
        assert!(report.skipped.is_empty());
        assert!(report.warnings.is_empty());
        assert_eq!(d.poses[0].theta[0], [0.1, 0.2, 0.3]);
    }

    #[test]
    fn header_only_file_gives_empty_dataset_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let spec = env_spec("cartpole").unwrap();
        let path = write_file(dir.path(), "empty.csv", &format!("{}\n", cartpole_header()));
        let (d, report) = ingest_csv(&path, spec, IngestMode::Lenient).unwrap();
        assert!(d.is_empty());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn out_of_range_angle_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let spec = env_spec("cartpole").unwrap();
        let body = format!(
            "{}\n0,0,0,0,0,0\n0,0,7.0,0,0,0\n0.5,0,0,0,0,0\n",
            cartpole_header()
        );
        let path = write_file(dir.path(), "range.csv", &body);

        let err = ingest_csv(&path, spec, IngestMode::Strict).unwrap_err();
        match err {
            DataError::AngleRange { line, ref column, value } => {
                assert_eq!(line, 3);
                assert_eq!(column, "cart_z");
                assert_eq!(value, 7.0);
            }
            other => panic!("unexpected error: {other}"),
        }

        let (d, report) = ingest_csv(&path, spec, IngestMode::Lenient).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].0, 3);
    }

    #[test]
    fn non_numeric_cell_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let spec = env_spec("cartpole").unwrap();
        let body = format!("{}\n0,0,abc,0,0,0\n", cartpole_header());
        let path = write_file(dir.path(), "text.csv", &body);
        let err = ingest_csv(&path, spec, IngestMode::Strict).unwrap_err();
        assert!(matches!(err, DataError::NonNumeric { line: 2, .. }));
    }

    #[test]
    fn missing_columns_rejected_at_header() {
        let dir = tempfile::tempdir().unwrap();
        let spec = env_spec("cartpole").unwrap();
        let path = write_file(dir.path(), "short.csv", "cart_x,cart_y\n0,0\n");
        let err = ingest_csv(&path, spec, IngestMode::Lenient).unwrap_err();
        assert!(matches!(
            err,
            DataError::MissingColumns { expected: 6, got: 2 }
        ));
    }

    #[test]
    fn wrong_header_name_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let spec = env_spec("cartpole").unwrap();
        let body = "cart_x,cart_y,cart_z,pole_x,pole_q,pole_z\n0,0,0,0,0,0\n";
        let path = write_file(dir.path(), "names.csv", body);
        let err = ingest_csv(&path, spec, IngestMode::Lenient).unwrap_err();
        match err {
            DataError::HeaderMismatch { position, expected, got } => {
                assert_eq!(position, 5);
                assert_eq!(expected, "pole_y");
                assert_eq!(got, "pole_q");
            }
            other => panic!("unexpected error: {other}"),
        }
    }
}
