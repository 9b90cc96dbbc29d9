//! Dyads sampled on a uniform `(t, x)` grid.
//!
//! The text format is a block of `key = value` header lines followed by CSV:
//!
//! ```text
//! # comment lines start with '#'
//! t_min = 0
//! t_max = 0
//! nt = 1
//! x_min = 1.5
//! x_max = 8
//! nx = 131
//! t,x,e00,e11,e01,e10
//! 0,1.5,1.7320508,0.5773503,0,0
//! ...
//! ```
//!
//! Rows run over `x` fastest, then `t`, so row `k` holds the node
//! `(t_min + (k / nx) Δt, x_min + (k % nx) Δx)`. With `nt = 1` the table is
//! static and `t_min`, `t_max` only bound the domain.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{Domain, Dyads};

pub const COLUMNS: [&str; 6] = ["t", "x", "e00", "e11", "e01", "e10"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TabulatedError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("header line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("data row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("expected {expected} data rows, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("invalid table: {0}")]
    Invalid(String),
}

impl From<std::io::Error> for TabulatedError {
    fn from(e: std::io::Error) -> Self {
        TabulatedError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Axis {
    min: f64,
    max: f64,
    n: usize,
}

impl Axis {
    fn step(&self) -> f64 {
        if self.n > 1 {
            (self.max - self.min) / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    fn node(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step()
    }

    /// Catmull-Rom weights `(node, w, dw/dv)` at `v`; ghost nodes past either
    /// end are linear extrapolations and fold into the two nearest nodes.
    fn weights(&self, v: f64) -> Vec<(usize, f64, f64)> {
        if self.n == 1 {
            return vec![(0, 1.0, 0.0)];
        }
        let h = self.step();
        let s = ((v - self.min) / h).clamp(0.0, (self.n - 1) as f64);
        let i = (s.floor() as usize).min(self.n - 2);
        let u = s - i as f64;
        let (u2, u3) = (u * u, u * u * u);
        let w = [
            0.5 * (-u + 2.0 * u2 - u3),
            0.5 * (2.0 - 5.0 * u2 + 3.0 * u3),
            0.5 * (u + 4.0 * u2 - 3.0 * u3),
            0.5 * (-u2 + u3),
        ];
        let dw = [
            0.5 * (-1.0 + 4.0 * u - 3.0 * u2) / h,
            0.5 * (-10.0 * u + 9.0 * u2) / h,
            0.5 * (1.0 + 8.0 * u - 9.0 * u2) / h,
            0.5 * (-2.0 * u + 3.0 * u2) / h,
        ];
        let last = self.n - 1;
        let mut out = Vec::with_capacity(6);
        for k in 0..4 {
            let idx = i as isize + k as isize - 1;
            if idx < 0 {
                out.push((0, 2.0 * w[k], 2.0 * dw[k]));
                out.push((1, -w[k], -dw[k]));
            } else if idx as usize > last {
                out.push((last, 2.0 * w[k], 2.0 * dw[k]));
                out.push((last - 1, -w[k], -dw[k]));
            } else {
                out.push((idx as usize, w[k], dw[k]));
            }
        }
        out
    }
}

/// Dyads on a uniform grid with piecewise-cubic interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDyads {
    t: Axis,
    x: Axis,
    values: Vec<Dyads>,
}

impl TabulatedDyads {
    /// `values` holds `nt · nx` nodes, `x` varying fastest.
    pub fn new(
        (t_min, t_max): (f64, f64),
        nt: usize,
        (x_min, x_max): (f64, f64),
        nx: usize,
        values: Vec<Dyads>,
    ) -> Result<Self, TabulatedError> {
        if nt == 0 || nx < 2 {
            return Err(TabulatedError::Invalid("need nt >= 1 and nx >= 2".into()));
        }
        if !(x_max > x_min) || t_max < t_min || (nt > 1 && t_max <= t_min) {
            return Err(TabulatedError::Invalid("grid bounds must be increasing".into()));
        }
        if values.len() != nt * nx {
            return Err(TabulatedError::Shape { expected: nt * nx, found: values.len() });
        }
        for (k, d) in values.iter().enumerate() {
            if ![d.e00, d.e11, d.e01, d.e10].iter().all(|v| v.is_finite()) {
                return Err(TabulatedError::Row { row: k + 1, message: "non-finite dyad".into() });
            }
            if d.e00 <= 0.0 {
                return Err(TabulatedError::Row { row: k + 1, message: "e00 must be positive".into() });
            }
        }
        Ok(Self {
            t: Axis { min: t_min, max: t_max, n: nt },
            x: Axis { min: x_min, max: x_max, n: nx },
            values,
        })
    }

    /// Constant dyads over `x ∈ [x_min, x_max]`, for all times.
    pub fn uniform(d: Dyads, (x_min, x_max): (f64, f64)) -> Self {
        Self::new((f64::NEG_INFINITY, f64::INFINITY), 1, (x_min, x_max), 2, vec![d, d])
            .expect("uniform table is valid")
    }

    pub fn is_static(&self) -> bool {
        self.t.n == 1
    }

    pub fn domain(&self) -> Domain {
        Domain { t_min: self.t.min, t_max: self.t.max, x_min: self.x.min, x_max: self.x.max }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.t.n, self.x.n)
    }

    /// Interpolated dyads and their `t` and `x` derivatives.
    pub fn eval(&self, t: f64, x: f64) -> (Dyads, Dyads, Dyads) {
        let wt = self.t.weights(t);
        let wx = self.x.weights(x);
        let mut acc = [[0.0; 4]; 3];
        for &(it, a, da) in &wt {
            for &(ix, b, db) in &wx {
                let d = &self.values[it * self.x.n + ix];
                let v = [d.e00, d.e11, d.e01, d.e10];
                for c in 0..4 {
                    acc[0][c] += a * b * v[c];
                    acc[1][c] += da * b * v[c];
                    acc[2][c] += a * db * v[c];
                }
            }
        }
        let pack = |a: [f64; 4]| Dyads { e00: a[0], e11: a[1], e01: a[2], e10: a[3] };
        (pack(acc[0]), pack(acc[1]), pack(acc[2]))
    }

    /// Samples `f` at the grid nodes.
    pub fn sample(
        t_range: (f64, f64),
        nt: usize,
        x_range: (f64, f64),
        nx: usize,
        f: impl Fn(f64, f64) -> Dyads,
    ) -> Result<Self, TabulatedError> {
        let t = Axis { min: t_range.0, max: t_range.1, n: nt };
        let x = Axis { min: x_range.0, max: x_range.1, n: nx };
        let t0 = |i: usize| if nt == 1 { 0.0_f64.clamp(t.min, t.max) } else { t.node(i) };
        let values = (0..nt)
            .flat_map(|i| (0..nx).map(move |j| (i, j)))
            .map(|(i, j)| f(t0(i), x.node(j)))
            .collect();
        Self::new(t_range, nt, x_range, nx, values)
    }

    pub fn read(reader: impl Read) -> Result<Self, TabulatedError> {
        let mut reader = BufReader::new(reader);
        let mut header = Header::default();
        let mut line = String::new();
        let mut line_no = 0;
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                return Err(TabulatedError::Header { line: line_no, message: "missing column header".into() });
            }
            line_no += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if trimmed.starts_with("t,") || trimmed.starts_with("t ,") {
                let cols: Vec<&str> = trimmed.split(',').map(str::trim).collect();
                if cols != COLUMNS {
                    return Err(TabulatedError::Header {
                        line: line_no,
                        message: format!("columns must be {}", COLUMNS.join(",")),
                    });
                }
                break;
            }
            header.set(trimmed).map_err(|message| TabulatedError::Header { line: line_no, message })?;
        }
        let (t_min, t_max, nt, x_min, x_max, nx) = header.finish()?;
        let t_axis = Axis { min: t_min, max: t_max, n: nt };
        let x_axis = Axis { min: x_min, max: x_max, n: nx };

        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut values = Vec::with_capacity(nt * nx);
        for (k, record) in csv.records().enumerate() {
            let row = k + 1;
            let record = record.map_err(|e| TabulatedError::Row { row, message: e.to_string() })?;
            if record.len() != COLUMNS.len() {
                return Err(TabulatedError::Row { row, message: format!("expected 6 fields, found {}", record.len()) });
            }
            let mut v = [0.0; 6];
            for (slot, field) in v.iter_mut().zip(record.iter()) {
                *slot = field
                    .parse()
                    .map_err(|_| TabulatedError::Row { row, message: format!("not a number: {field:?}") })?;
            }
            if k >= nt * nx {
                return Err(TabulatedError::Shape { expected: nt * nx, found: k + 1 });
            }
            let (it, ix) = (k / nx, k % nx);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + b.abs());
            if (nt > 1 && !close(v[0], t_axis.node(it))) || !close(v[1], x_axis.node(ix)) {
                return Err(TabulatedError::Row {
                    row,
                    message: format!("node ({}, {}) is off the declared grid", v[0], v[1]),
                });
            }
            values.push(Dyads { e00: v[2], e11: v[3], e01: v[4], e10: v[5] });
        }
        Self::new((t_min, t_max), nt, (x_min, x_max), nx, values)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, TabulatedError> {
        Self::read(std::fs::File::open(path)?)
    }

    pub fn write(&self, mut out: impl Write) -> Result<(), TabulatedError> {
        writeln!(out, "t_min = {}", self.t.min)?;
        writeln!(out, "t_max = {}", self.t.max)?;
        writeln!(out, "nt = {}", self.t.n)?;
        writeln!(out, "x_min = {}", self.x.min)?;
        writeln!(out, "x_max = {}", self.x.max)?;
        writeln!(out, "nx = {}", self.x.n)?;
        writeln!(out, "{}", COLUMNS.join(","))?;
        for (k, d) in self.values.iter().enumerate() {
            let t = if self.t.n == 1 { 0.0_f64.clamp(self.t.min, self.t.max) } else { self.t.node(k / self.x.n) };
            let x = self.x.node(k % self.x.n);
            writeln!(out, "{t},{x},{},{},{},{}", d.e00, d.e11, d.e01, d.e10)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Header {
    t_min: Option<f64>,
    t_max: Option<f64>,
    nt: Option<usize>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    nx: Option<usize>,
}

impl Header {
    fn set(&mut self, line: &str) -> Result<(), String> {
        let (key, value) = line.split_once('=').ok_or_else(|| format!("expected key = value, got {line:?}"))?;
        let (key, value) = (key.trim(), value.trim());
        let real = || value.parse::<f64>().map_err(|_| format!("{key}: not a number: {value:?}"));
        let count = || value.parse::<usize>().map_err(|_| format!("{key}: not a count: {value:?}"));
        match key {
            "t_min" => self.t_min = Some(real()?),
            "t_max" => self.t_max = Some(real()?),
            "nt" => self.nt = Some(count()?),
            "x_min" => self.x_min = Some(real()?),
            "x_max" => self.x_max = Some(real()?),
            "nx" => self.nx = Some(count()?),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    fn finish(self) -> Result<(f64, f64, usize, f64, f64, usize), TabulatedError> {
        let missing = |k: &str| TabulatedError::Invalid(format!("header is missing {k}"));
        Ok((
            self.t_min.ok_or_else(|| missing("t_min"))?,
            self.t_max.ok_or_else(|| missing("t_max"))?,
            self.nt.ok_or_else(|| missing("nt"))?,
            self.x_min.ok_or_else(|| missing("x_min"))?,
            self.x_max.ok_or_else(|| missing("x_max"))?,
            self.nx.ok_or_else(|| missing("nx"))?,
        ))
    }
}
