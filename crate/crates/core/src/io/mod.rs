//! Target grids and the text formats exchanged with other tools.
//!
//! Grid files are UTF-8: `#`-prefixed `key: value` header lines followed by
//! `z,Q,value` rows in ascending `(z, Q)`. Recognized header keys are
//! `label`, `z_range`, `q_range`, `q_axis`, `n_qubits`, plus the optional
//! `z_axis` (default `linear`). Other header keys are ignored.

mod results;
mod synth;

pub use results::{
    read_histogram, read_params, read_record, read_series, write_histogram, write_params,
    write_record, write_series, HistogramFile, HistogramMode, TrainedModel,
};
pub use synth::{synth_target, SynthConfig, SynthKind};

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::cheb::{AxisTransform, ChebGrid, DomainBox};
use crate::error::{Error, Result};

/// Chebyshev-domain tolerance for matching data points to lattice points.
pub const LATTICE_TOL: f64 = 1e-9;

/// Normalized targets on the nodes plus half-nodes lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetGrid {
    pub label: String,
    pub domain: DomainBox,
    n_qubits: usize,
    /// `(z, Q, value)` with values scaled to a maximum of 1.
    points: Vec<(f64, f64, f64)>,
    /// Multiply normalized values by this to recover data units.
    pub scale: f64,
}

impl TargetGrid {
    /// Validates lattice coverage and non-negativity, then normalizes.
    pub fn from_raw(
        label: impl Into<String>,
        domain: DomainBox,
        n_qubits: usize,
        mut points: Vec<(f64, f64, f64)>,
    ) -> Result<Self> {
        domain.validate()?;
        if points.is_empty() {
            return Err(Error::Empty("target grid"));
        }
        for &(z, q, value) in &points {
            if !value.is_finite() {
                return Err(Error::Config(format!(
                    "non-finite target value at (z={z}, Q={q})"
                )));
            }
            if value < 0.0 {
                return Err(Error::NegativeValue { z, q, value });
            }
        }
        validate_lattice(&points, &domain, n_qubits)?;
        let max = points.iter().map(|p| p.2).fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::Config("target values are all zero".into()));
        }
        for p in &mut points {
            p.2 /= max;
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Ok(Self {
            label: label.into(),
            domain,
            n_qubits,
            points,
            scale: max,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(f64, f64, f64)] {
        &self.points
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.2).collect()
    }

    /// Values in the original data units.
    pub fn raw_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.2 * self.scale).collect()
    }

    pub fn chebyshev_points(&self) -> Result<Vec<(f64, f64)>> {
        self.points
            .iter()
            .map(|&(z, q, _)| Ok((self.domain.to_unit_x(z)?, self.domain.to_unit_y(q)?)))
            .collect()
    }
}

/// Index of `x` in a strictly decreasing grid, if within tolerance.
fn locate(grid: &[f64], x: f64) -> Option<usize> {
    let i = grid.partition_point(|&g| g > x + LATTICE_TOL);
    (i < grid.len() && (grid[i] - x).abs() <= LATTICE_TOL).then_some(i)
}

fn validate_lattice(points: &[(f64, f64, f64)], domain: &DomainBox, n_qubits: usize) -> Result<()> {
    let grid = ChebGrid::new(n_qubits)?;
    let (nodes, half) = (grid.nodes(), grid.half_nodes());
    // key: (is_half, i, j)
    let mut seen: HashMap<(bool, usize, usize), usize> = HashMap::new();
    let mut problems = Vec::new();
    for &(z, q, _) in points {
        let (u, v) = match (domain.to_unit_x(z), domain.to_unit_y(q)) {
            (Ok(u), Ok(v)) => (u, v),
            _ => {
                problems.push(format!("extra point (z={z}, Q={q}) outside the box"));
                continue;
            }
        };
        let key = match (
            locate(nodes, u),
            locate(nodes, v),
            locate(half, u),
            locate(half, v),
        ) {
            (Some(i), Some(j), _, _) => (false, i, j),
            (_, _, Some(i), Some(j)) => (true, i, j),
            _ => {
                problems.push(format!("extra point (z={z}, Q={q}) off the lattice"));
                continue;
            }
        };
        let n = seen.entry(key).or_insert(0);
        *n += 1;
        if *n == 2 {
            problems.push(format!("duplicate point (z={z}, Q={q})"));
        }
    }
    for (is_half, axis) in [(false, nodes), (true, half)] {
        for (i, &u) in axis.iter().enumerate() {
            for (j, &v) in axis.iter().enumerate() {
                if !seen.contains_key(&(is_half, i, j)) {
                    let z = domain.from_unit_x(u)?;
                    let q = domain.from_unit_y(v)?;
                    problems.push(format!("missing point (z={z}, Q={q})"));
                }
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        let total = problems.len();
        problems.truncate(20);
        let mut msg = problems.join("; ");
        if total > 20 {
            msg.push_str(&format!("; ... {} more", total - 20));
        }
        Err(Error::LatticeMismatch(msg))
    }
}

/// Raw values for every lattice point, computed from Chebyshev
/// coordinates; rows come out in lattice order.
pub fn tabulate(
    domain: &DomainBox,
    n_qubits: usize,
    mut f: impl FnMut(f64, f64) -> Result<f64>,
) -> Result<Vec<(f64, f64, f64)>> {
    ChebGrid::new(n_qubits)?
        .training_lattice()
        .into_iter()
        .map(|(u, v)| {
            let z = domain.from_unit_x(u)?;
            let q = domain.from_unit_y(v)?;
            Ok((z, q, f(u, v)?))
        })
        .collect()
}

pub(crate) fn parse_pair(s: &str) -> Option<(f64, f64)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Splits `# key: value` into its parts.
pub(crate) fn header_entry(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('#')?.trim();
    let (k, v) = body.split_once(':')?;
    Some((k.trim(), v.trim()))
}

/// Reads and validates a grid file. `domain` overrides the header's box.
pub fn read_grid(
    path: impl AsRef<Path>,
    expected_n: usize,
    domain: Option<&DomainBox>,
) -> Result<TargetGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut label = String::new();
    let mut z_range = None;
    let mut q_range = None;
    let mut z_axis = AxisTransform::Linear;
    let mut q_axis = None;
    let mut rows = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            let Some((key, value)) = header_entry(line) else {
                continue;
            };
            match key {
                "label" => label = value.to_string(),
                "z_range" => {
                    z_range = Some(
                        parse_pair(value)
                            .ok_or_else(|| parse_err(lineno, format!("bad z_range `{value}`")))?,
                    )
                }
                "q_range" => {
                    q_range = Some(
                        parse_pair(value)
                            .ok_or_else(|| parse_err(lineno, format!("bad q_range `{value}`")))?,
                    )
                }
                "q_axis" => {
                    q_axis = Some(
                        value
                            .parse()
                            .map_err(|e: Error| parse_err(lineno, e.to_string()))?,
                    )
                }
                "z_axis" => {
                    z_axis = value
                        .parse()
                        .map_err(|e: Error| parse_err(lineno, e.to_string()))?
                }
                "n_qubits" => {
                    let n: usize = value
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad n_qubits `{value}`")))?;
                    if n != expected_n {
                        return Err(parse_err(
                            lineno,
                            format!("file declares n_qubits {n}, expected {expected_n}"),
                        ));
                    }
                }
                _ => {}
            }
            continue;
        }
        if rows.is_empty() && line.replace(' ', "").eq_ignore_ascii_case("z,q,value") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 comma-separated fields, found {}", fields.len()),
            ));
        }
        let mut vals = [0.0; 3];
        for (slot, f) in vals.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| parse_err(lineno, format!("not a number: `{f}`")))?;
        }
        rows.push((vals[0], vals[1], vals[2]));
    }

    let domain = match domain {
        Some(b) => *b,
        None => {
            let default = DomainBox::fragmentation();
            let (x_lo, x_hi) = z_range.unwrap_or((default.x_lo, default.x_hi));
            let (y_lo, y_hi) = q_range.unwrap_or((default.y_lo, default.y_hi));
            DomainBox::new(
                (x_lo, x_hi),
                (y_lo, y_hi),
                z_axis,
                q_axis.unwrap_or(default.y_axis),
            )?
        }
    };
    TargetGrid::from_raw(label, domain, expected_n, rows)
}

/// Writes a grid in data units; reading it back reproduces the grid.
pub fn write_grid(grid: &TargetGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let b = &grid.domain;
    let mut out = String::new();
    out.push_str(&format!("# label: {}\n", grid.label));
    out.push_str(&format!("# z_range: {},{}\n", b.x_lo, b.x_hi));
    out.push_str(&format!("# q_range: {},{}\n", b.y_lo, b.y_hi));
    if b.x_axis != AxisTransform::Linear {
        out.push_str(&format!("# z_axis: {}\n", b.x_axis));
    }
    out.push_str(&format!("# q_axis: {}\n", b.y_axis));
    out.push_str(&format!("# n_qubits: {}\n", grid.n_qubits));
    for &(z, q, v) in &grid.points {
        out.push_str(&format!("{},{},{}\n", z, q, v * grid.scale));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
