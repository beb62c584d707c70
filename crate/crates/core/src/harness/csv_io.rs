//! CSV curves at 17 significant digits, written atomically.

use std::io::Write;
use std::path::Path;

use crate::dde::{time_tol, Trajectory};
use crate::{Error, Result};

/// 17 significant digits, enough to re-read every `f64` exactly.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// A table of named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(headers: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if headers.len() != columns.len() {
            return Err(Error::Contract(format!(
                "{} headers for {} columns",
                headers.len(),
                columns.len()
            )));
        }
        if let Some(first) = columns.first() {
            if columns.iter().any(|c| c.len() != first.len()) {
                return Err(Error::Contract("table columns differ in length".into()));
            }
        }
        Ok(Table { headers, columns })
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| format_f64(c[r])))?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_csv()?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn from_reader(r: impl std::io::Read) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            for (c, field) in rec.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::schema(
                        format!("row {}, column {}", line + 1, headers[c]),
                        format!("not a number: `{field}`"),
                    )
                })?;
                columns[c].push(v);
            }
        }
        Table::new(headers, columns)
    }
}

/// `t, x1..xn, dx1..dxn`, one row per mesh node.
pub fn solution_table(traj: &Trajectory) -> Table {
    let n = traj.dim();
    let mut headers = vec!["t".to_string()];
    headers.extend((1..=n).map(|i| format!("x{i}")));
    headers.extend((1..=n).map(|i| format!("dx{i}")));
    let mut columns = vec![traj.mesh().to_vec()];
    for c in 0..n {
        columns.push((0..traj.len()).map(|i| traj.value(i)[c]).collect());
    }
    for c in 0..n {
        columns.push((0..traj.len()).map(|i| traj.deriv(i)[c]).collect());
    }
    Table { headers, columns }
}

pub fn write_solution(path: &Path, traj: &Trajectory) -> Result<()> {
    solution_table(traj).write(path)
}

/// Reads a solution CSV back; `t0` marks where the history part ends.
///
/// Without `dx` columns the derivatives are rebuilt by finite differences.
pub fn read_solution(path: &Path, t0: f64) -> Result<Trajectory> {
    solution_from_table(&Table::read(path)?, t0)
}

pub fn solution_from_table(table: &Table, t0: f64) -> Result<Trajectory> {
    let mesh = table
        .column("t")
        .ok_or_else(|| Error::schema("header", "missing column `t`"))?
        .to_vec();
    let n = (1..)
        .take_while(|i| table.column(&format!("x{i}")).is_some())
        .count();
    if n == 0 {
        return Err(Error::schema("header", "missing column `x1`"));
    }
    let t0_index = mesh
        .iter()
        .position(|&t| (t - t0).abs() <= time_tol(t0))
        .ok_or_else(|| Error::schema("t", format!("no row at t0 = {t0}")))?;
    let interleave = |prefix: &str| -> Option<Vec<f64>> {
        let cols: Option<Vec<&[f64]>> = (1..=n)
            .map(|i| table.column(&format!("{prefix}{i}")))
            .collect();
        cols.map(|cols| {
            (0..mesh.len())
                .flat_map(|r| cols.iter().map(move |c| c[r]))
                .collect()
        })
    };
    let values = interleave("x").expect("counted above");
    let traj = match interleave("dx") {
        Some(derivs) => Trajectory::new(n, mesh.clone(), values.clone(), derivs, t0_index)?,
        None => Trajectory::from_samples(n, mesh.clone(), values.clone(), t0_index)?,
    };
    if t0_index == 0 {
        return Ok(traj);
    }
    // The row at t0 carries the forward derivative; the history segment needs the left one.
    let rows = t0_index + 1;
    let left = Trajectory::from_samples(
        n,
        mesh[..rows].to_vec(),
        values[..rows * n].to_vec(),
        t0_index,
    )?;
    let mut derivs: Vec<f64> = (0..rows).flat_map(|i| traj.deriv(i).to_vec()).collect();
    derivs[t0_index * n..].copy_from_slice(left.deriv(t0_index));
    let history = Trajectory::new(
        n,
        mesh[..rows].to_vec(),
        values[..rows * n].to_vec(),
        derivs,
        t0_index,
    )?;
    Ok(traj.with_history(std::sync::Arc::new(history)))
}
