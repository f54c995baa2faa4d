//! Snapshot series and their CSV files.
//!
//! One file per recorded step, `snap_<step>.csv`, starting with
//! `# key=value` header lines followed by one data row per cell:
//! `i,x1,rho,u1,l` in 1D and `i,j,x1,x2,rho,u1,u2,l` in 2D.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::model::{Grid, MacroState, ModelParams, PARAM_KEYS};

/// Header keys every snapshot file must carry besides the model parameters.
const GRID_KEYS: [&str; 9] = ["dim", "n1", "n2", "L1", "L2", "dx1", "dx2", "step", "time"];

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    pub grid: Grid,
    pub params: ModelParams,
    /// `(step, state)` with strictly increasing steps.
    pub snapshots: Vec<(usize, MacroState)>,
    /// Free-form provenance (scenario, seed, solver settings, version).
    pub metadata: BTreeMap<String, String>,
}

impl SnapshotSeries {
    pub fn new(grid: Grid, params: ModelParams) -> Self {
        Self {
            grid,
            params,
            snapshots: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn last(&self) -> Option<&MacroState> {
        self.snapshots.last().map(|(_, s)| s)
    }

    /// Writes every snapshot into `dir` (created if missing) and returns the
    /// file paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let mut paths = Vec::with_capacity(self.snapshots.len());
        for (step, state) in &self.snapshots {
            let path = dir.join(format!("snap_{step}.csv"));
            write_snapshot(&path, &self.grid, &self.params, *step, state, &self.metadata)?;
            paths.push(path);
        }
        Ok(paths)
    }

    /// Reads all `snap_<step>.csv` files of `dir`, ordered by step.
    pub fn read(dir: &Path) -> Result<Self, HarnessError> {
        let mut files: Vec<(usize, PathBuf)> = fs::read_dir(dir)
            .map_err(|e| HarnessError::io(dir, e))?
            .filter_map(|entry| {
                let path = entry.ok()?.path();
                let name = path.file_name()?.to_str()?;
                let step = name.strip_prefix("snap_")?.strip_suffix(".csv")?.parse().ok()?;
                Some((step, path))
            })
            .collect();
        files.sort();
        let Some((_, first)) = files.first() else {
            return Err(HarnessError::Format {
                path: dir.to_path_buf(),
                message: "no snap_<step>.csv files".into(),
            });
        };
        let head = read_snapshot(first)?;
        let mut series = SnapshotSeries {
            grid: head.grid,
            params: head.params,
            snapshots: Vec::new(),
            metadata: head.metadata,
        };
        for (_, path) in &files {
            let snap = read_snapshot(path)?;
            if snap.grid != series.grid {
                return Err(HarnessError::GridMismatch(format!(
                    "{} uses a different grid",
                    path.display()
                )));
            }
            series.snapshots.push((snap.step, snap.state));
        }
        Ok(series)
    }
}

/// Contents of one snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: Grid,
    pub params: ModelParams,
    pub step: usize,
    pub state: MacroState,
    /// Header entries that are neither grid nor parameter keys.
    pub metadata: BTreeMap<String, String>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot(
    path: &Path,
    grid: &Grid,
    params: &ModelParams,
    step: usize,
    state: &MacroState,
    metadata: &BTreeMap<String, String>,
) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let [n1, n2] = grid.cells();
    let [l1, l2] = grid.extent();
    let [dx1, dx2] = grid.spacing();
    let mut header: Vec<(String, String)> = vec![
        ("dim".into(), grid.dim().to_string()),
        ("n1".into(), n1.to_string()),
        ("n2".into(), n2.to_string()),
        ("L1".into(), num(l1)),
        ("L2".into(), num(l2)),
        ("dx1".into(), num(dx1)),
        ("dx2".into(), num(dx2)),
        ("step".into(), step.to_string()),
        ("time".into(), num(state.time)),
    ];
    header.extend(params.entries().map(|(k, v)| (k.to_string(), num(v))));
    header.extend(metadata.iter().map(|(k, v)| (k.clone(), v.clone())));
    let io = |e| HarnessError::io(path, e);
    for (k, v) in &header {
        writeln!(w, "# {k}={v}").map_err(io)?;
    }
    for idx in 0..grid.len() {
        let (i, j) = grid.coords(idx);
        let x = grid.center(i, j);
        let (r, l) = (num(state.rho[idx]), num(state.l[idx]));
        if grid.dim() == 1 {
            writeln!(w, "{i},{},{r},{},{l}", num(x[0]), num(state.u[0][idx])).map_err(io)?;
        } else {
            writeln!(
                w,
                "{i},{j},{},{},{r},{},{},{l}",
                num(x[0]),
                num(x[1]),
                num(state.u[0][idx]),
                num(state.u[1][idx])
            )
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let fail = |line: usize, message: String| HarnessError::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut header = BTreeMap::new();
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if let Some(h) = line.strip_prefix('#') {
            let (key, value) = h
                .trim()
                .split_once('=')
                .ok_or_else(|| fail(k + 1, format!("header `{line}` is not key=value")))?;
            header.insert(key.trim().to_string(), value.trim().to_string());
        } else if !line.trim().is_empty() {
            rows.push((k + 1, line));
        }
    }
    let get = |key: &str| -> Result<&str, HarnessError> {
        header.get(key).map(String::as_str).ok_or_else(|| HarnessError::MissingKey {
            path: path.to_path_buf(),
            key: key.to_string(),
        })
    };
    let float = |key: &str| -> Result<f64, HarnessError> {
        get(key)?
            .parse::<f64>()
            .map_err(|_| fail(0, format!("header `{key}` is not a number")))
    };
    let int = |key: &str| -> Result<usize, HarnessError> {
        get(key)?
            .parse::<usize>()
            .map_err(|_| fail(0, format!("header `{key}` is not an integer")))
    };
    let dim = int("dim")?;
    let cells = [int("n1")?, int("n2")?];
    let extent = [float("L1")?, float("L2")?];
    let grid = match dim {
        1 => Grid::new_1d(extent[0], cells[0])?,
        2 => Grid::new_2d(extent, cells)?,
        d => return Err(crate::model::ModelError::UnsupportedDimension(d).into()),
    };
    // Required, though the grid is rebuilt from extent and cell count.
    float("dx1")?;
    float("dx2")?;
    let step = int("step")?;
    let mut params = ModelParams::default();
    for key in PARAM_KEYS {
        params.set(key, float(key)?);
    }
    let mut state = MacroState::zeros(&grid);
    state.time = float("time")?;
    if rows.len() != grid.len() {
        return Err(fail(0, format!("expected {} data rows, found {}", grid.len(), rows.len())));
    }
    let width = if dim == 1 { 5 } else { 8 };
    for (idx, (line_no, row)) in rows.into_iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != width {
            return Err(fail(line_no, format!("expected {width} columns, found {}", fields.len())));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| fail(line_no, format!("`{s}` is not a number")))
        };
        let (vals, cell) = if dim == 1 {
            (&fields[2..], idx)
        } else {
            let i: usize = fields[0].parse().map_err(|_| fail(line_no, "bad index".into()))?;
            let j: usize = fields[1].parse().map_err(|_| fail(line_no, "bad index".into()))?;
            if i >= cells[0] || j >= cells[1] {
                return Err(fail(line_no, format!("cell ({i}, {j}) outside the grid")));
            }
            (&fields[4..], grid.index(i, j))
        };
        state.rho[cell] = parse(vals[0])?;
        state.u[0][cell] = parse(vals[1])?;
        if dim == 1 {
            state.l[cell] = parse(vals[2])?;
        } else {
            state.u[1][cell] = parse(vals[2])?;
            state.l[cell] = parse(vals[3])?;
        }
    }
    let metadata = header
        .into_iter()
        .filter(|(k, _)| !GRID_KEYS.contains(&k.as_str()) && !PARAM_KEYS.contains(&k.as_str()))
        .collect();
    Ok(Snapshot {
        grid,
        params,
        step,
        state,
        metadata,
    })
}
