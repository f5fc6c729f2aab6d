//! CSV files written by the CLI, and readers for them.
//!
//! - sweep: `param,regime,fp1_x,fp1_stab,...,fp4_x,fp4_stab`, unused pairs left
//!   empty, regime `error` for rows whose parameter was rejected.
//! - fixed points: `x,origin,stability`.
//! - trajectories: `member,t,x`.
//! - summary: `member,x0,x_final,attractor,slow_decay`, `attractor` empty when
//!   the terminal state is not near any fixed point.
//!
//! Trajectory and summary files start with `# key=value` comment lines
//! (seed and run parameters). Files are written to a temporary sibling and
//! renamed into place, so a failed write leaves nothing behind.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use replicator_core::{BifurcationRow, Origin, Regime, RegimeReport, Stability};

use crate::error::{CliError, Result};

/// Most fixed points any reduced model has (0, x1, x2, 1).
pub const MAX_FIXED_POINTS: usize = 4;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn write_atomic<F>(path: &Path, comments: &[(String, String)], body: F) -> Result<()>
where
    F: FnOnce(&mut csv::Writer<&mut File>) -> std::result::Result<(), csv::Error>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    {
        let file = tmp.as_file_mut();
        for (k, v) in comments {
            writeln!(file, "# {k}={v}").map_err(|e| CliError::io(path, e))?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        body(&mut w).map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn sweep_header() -> Vec<String> {
    let mut h = vec!["param".to_string(), "regime".to_string()];
    for i in 1..=MAX_FIXED_POINTS {
        h.push(format!("fp{i}_x"));
        h.push(format!("fp{i}_stab"));
    }
    h
}

/// One parsed sweep row. `regime` is `None` for rejected parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub param: f64,
    pub regime: Option<Regime>,
    pub points: Vec<(f64, Stability)>,
}

impl SweepRecord {
    pub fn from_row(param: f64, row: Option<&BifurcationRow>) -> Self {
        Self {
            param,
            regime: row.map(|r| r.regime),
            points: row.map(|r| r.points.clone()).unwrap_or_default(),
        }
    }
}

pub fn write_sweep(path: &Path, rows: &[SweepRecord]) -> Result<()> {
    write_atomic(path, &[], |w| {
        w.write_record(sweep_header())?;
        for row in rows {
            let mut rec = vec![
                fmt_f64(row.param),
                row.regime.map_or("error", |r| r.as_str()).to_string(),
            ];
            for i in 0..MAX_FIXED_POINTS {
                match row.points.get(i) {
                    Some((x, s)) => {
                        rec.push(fmt_f64(*x));
                        rec.push(s.as_str().to_string());
                    }
                    None => rec.extend([String::new(), String::new()]),
                }
            }
            w.write_record(rec)?;
        }
        Ok(())
    })
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::new();
    for rec in reader(path)?.records() {
        let rec = rec.map_err(csv_err(path))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let param = parse_f64(field(0))?;
        let regime = match field(1) {
            "error" => None,
            s => Some(s.parse::<Regime>().map_err(CliError::Format)?),
        };
        let mut points = Vec::new();
        for i in 0..MAX_FIXED_POINTS {
            let (x, s) = (field(2 + 2 * i), field(3 + 2 * i));
            if x.is_empty() {
                continue;
            }
            points.push((parse_f64(x)?, s.parse().map_err(CliError::Format)?));
        }
        out.push(SweepRecord {
            param,
            regime,
            points,
        });
    }
    Ok(out)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| CliError::Format(format!("'{s}' is not a number")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRow {
    pub x: f64,
    pub origin: String,
    pub stability: String,
}

pub fn write_fixed_points(path: &Path, report: &RegimeReport) -> Result<()> {
    write_atomic(path, &[], |w| {
        if report.fixed_points.is_empty() {
            w.write_record(["x", "origin", "stability"])?;
        }
        for fp in &report.fixed_points {
            w.serialize(FixedPointRow {
                x: fp.location,
                origin: match fp.origin {
                    Origin::Boundary => "boundary",
                    Origin::Internal => "internal",
                }
                .to_string(),
                stability: fp.stability.as_str().to_string(),
            })?;
        }
        Ok(())
    })
}

pub fn read_fixed_points(path: &Path) -> Result<Vec<FixedPointRow>> {
    reader(path)?
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub member: usize,
    pub t: f64,
    pub x: f64,
}

pub fn write_trajectories(
    path: &Path,
    comments: &[(String, String)],
    rows: impl IntoIterator<Item = TrajectoryRow>,
) -> Result<()> {
    write_atomic(path, comments, |w| {
        let mut empty = true;
        for row in rows {
            w.serialize(row)?;
            empty = false;
        }
        if empty {
            w.write_record(["member", "t", "x"])?;
        }
        Ok(())
    })
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRow>> {
    reader(path)?
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub member: usize,
    pub x0: f64,
    pub x_final: f64,
    pub attractor: Option<f64>,
    pub slow_decay: bool,
}

pub fn write_summary(
    path: &Path,
    comments: &[(String, String)],
    rows: &[SummaryRow],
) -> Result<()> {
    write_atomic(path, comments, |w| {
        if rows.is_empty() {
            w.write_record(["member", "x0", "x_final", "attractor", "slow_decay"])?;
        }
        for row in rows {
            w.serialize(row)?;
        }
        Ok(())
    })
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    reader(path)?
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-8, 0.0, 1.0, 0.7886751345948129, 5e-324] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let rows = vec![
            SweepRecord {
                param: 0.1,
                regime: Some(Regime::Bistable),
                points: vec![
                    (0.0, Stability::Stable),
                    (1.0 / 7.0, Stability::Unstable),
                    (1.0, Stability::Stable),
                ],
            },
            SweepRecord {
                param: 0.0,
                regime: None,
                points: vec![],
            },
        ];
        write_sweep(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "param,regime,fp1_x,fp1_stab,fp2_x,fp2_stab,fp3_x,fp3_stab,fp4_x,fp4_stab\n"
        ));
        assert!(!text.contains('\r'));
        assert_eq!(read_sweep(&path).unwrap(), rows);
    }

    #[test]
    fn failed_write_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let err = write_atomic(&path, &[], |w| {
            w.write_record(["a", "b"])?;
            w.write_record(["only-one"])?;
            Ok(())
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(!path.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let err = write_sweep(Path::new("/nonexistent/dir/out.csv"), &[]).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }
}
