use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::Grid;

/// Sampled diagnostics. `momentum_y` and `energy_reduced` are written only
/// for two-dimensional runs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub dim: usize,
    pub t: Vec<f64>,
    /// Electric energy `𝓔`.
    pub e: Vec<f64>,
    pub mass: Vec<f64>,
    pub momentum: Vec<f64>,
    pub momentum_y: Vec<f64>,
    pub energy: Vec<f64>,
    /// Total energy with the thermal term `ρu_th²` (no factor `D`).
    pub energy_reduced: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dim: usize) -> Self {
        TimeSeries {
            dim,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn header(&self) -> &'static str {
        if self.dim == 2 {
            "t,E,mass,momentum,energy,momentum_y,energy_reduced"
        } else {
            "t,E,mass,momentum,energy"
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(96 * (self.len() + 1));
        s.push_str(self.header());
        s.push('\n');
        for i in 0..self.len() {
            let _ = write!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.t[i], self.e[i], self.mass[i], self.momentum[i], self.energy[i]
            );
            if self.dim == 2 {
                let _ = write!(s, ",{:.16e},{:.16e}", self.momentum_y[i], self.energy_reduced[i]);
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Parse a series written by [`TimeSeries::to_csv`]. Only `t` and `E`
    /// are required; absent columns are left empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty series file".into()))?
            .split(',')
            .map(str::trim)
            .collect();
        let col = |name: &str| header.iter().position(|h| *h == name);
        let (Some(it), Some(ie)) = (col("t"), col("E")) else {
            return Err(Error::InvalidParameter(
                "series needs columns `t` and `E`".into(),
            ));
        };
        let optional = ["mass", "momentum", "energy", "momentum_y", "energy_reduced"].map(col);
        let mut ts = TimeSeries::new(if optional[3].is_some() { 2 } else { 1 });
        for (row, line) in lines.enumerate() {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(format!("row {}: {e}", row + 2)))?;
            if fields.len() != header.len() {
                return Err(Error::InvalidParameter(format!(
                    "row {} has {} fields, header has {}",
                    row + 2,
                    fields.len(),
                    header.len()
                )));
            }
            ts.t.push(fields[it]);
            ts.e.push(fields[ie]);
            let targets = [
                &mut ts.mass,
                &mut ts.momentum,
                &mut ts.energy,
                &mut ts.momentum_y,
                &mut ts.energy_reduced,
            ];
            for (target, idx) in targets.into_iter().zip(optional) {
                if let Some(i) = idx {
                    target.push(fields[i]);
                }
            }
        }
        Ok(ts)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }

    /// Largest `|x_i − x_0| / scale` over a column.
    pub fn drift(values: &[f64], scale: f64) -> f64 {
        let first = values.first().copied().unwrap_or(0.0);
        values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max) / scale
    }
}

/// Cell-averaged coefficient magnitudes at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub t: f64,
    pub alphas: Vec<Vec<usize>>,
    /// Mean over cells of `|f_α|`.
    pub mean_abs: Vec<f64>,
    /// Mean over cells of `|f_α| √(α!) / u_th^{|α|}`, the coefficient size in
    /// the orthonormal scaling.
    pub mean_abs_scaled: Vec<f64>,
}

impl Spectrum {
    pub fn of_grid(grid: &Grid, t: f64) -> Self {
        let set = grid.set().clone();
        let n = set.len();
        let mut mean_abs = vec![0.0; n];
        let mut mean_abs_scaled = vec![0.0; n];
        let log_fact: Vec<f64> = (0..=set.order())
            .scan(0.0, |acc, k| {
                if k > 0 {
                    *acc += (k as f64).ln();
                }
                Some(*acc)
            })
            .collect();
        for cell in &grid.cells {
            let ln_th = cell.uth.ln();
            for (i, c) in cell.coeffs.iter().enumerate() {
                let alpha = set.alpha(i);
                let half_log: f64 = alpha.iter().map(|&a| 0.5 * log_fact[a]).sum();
                let degree = set.degree(i) as f64;
                mean_abs[i] += c.abs();
                mean_abs_scaled[i] += c.abs() * (half_log - degree * ln_th).exp();
            }
        }
        let cells = grid.len() as f64;
        mean_abs.iter_mut().for_each(|x| *x /= cells);
        mean_abs_scaled.iter_mut().for_each(|x| *x /= cells);
        Spectrum {
            t,
            alphas: set.iter().map(<[usize]>::to_vec).collect(),
            mean_abs,
            mean_abs_scaled,
        }
    }

    pub fn to_csv(&self) -> String {
        let dim = self.alphas.first().map_or(1, Vec::len);
        let mut s = String::new();
        s.push_str(if dim == 2 {
            "degree,alpha_x,alpha_y,mean_abs,mean_abs_scaled\n"
        } else {
            "degree,alpha_x,mean_abs,mean_abs_scaled\n"
        });
        for ((alpha, a), b) in self.alphas.iter().zip(&self.mean_abs).zip(&self.mean_abs_scaled) {
            let degree: usize = alpha.iter().sum();
            let idx = alpha.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            let _ = writeln!(s, "{degree},{idx},{a:.16e},{b:.16e}");
        }
        s
    }

    /// File name `spectrum_<t>.csv` with `t` printed to 6 decimals.
    pub fn file_name(&self) -> String {
        format!("spectrum_{:.6}.csv", self.t)
    }
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunRecord {
    pub series: TimeSeries,
    pub spectra: Vec<Spectrum>,
    pub steps: usize,
    pub wall_seconds: f64,
    pub final_time: f64,
}
