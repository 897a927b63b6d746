//! Field energy, conservation totals, peak detection and the fits used to
//! read damping rates and frequencies off `𝓔(t)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::solver::Grid;

/// `𝓔 = (Σ_j |E_j|² ΔV)^{1/2}`.
pub fn electric_energy(e: &[Vec<f64>], cell_volume: f64) -> f64 {
    let sum: f64 = e.iter().flat_map(|c| c.iter()).map(|x| x * x).sum();
    (sum * cell_volume).sqrt()
}

pub fn total_mass(grid: &Grid) -> f64 {
    grid.cells.iter().map(|c| c.rho()).sum::<f64>() * grid.cell_volume()
}

/// `Σ_j ρ_j u_j ΔV` per direction (second entry 0 in 1D).
pub fn total_momentum(grid: &Grid) -> [f64; 2] {
    let mut p = [0.0; 2];
    for c in &grid.cells {
        for d in 0..grid.dim() {
            p[d] += c.rho() * c.u[d];
        }
    }
    p.map(|x| x * grid.cell_volume())
}

/// Scale for momentum errors: `Σ_j ρ_j u_th,j ΔV`, the typical thermal
/// momentum (total momentum itself is often zero).
pub fn thermal_momentum(grid: &Grid) -> f64 {
    grid.cells.iter().map(|c| c.rho() * c.uth).sum::<f64>() * grid.cell_volume()
}

fn energy_with_factor(grid: &Grid, e: &[Vec<f64>], thermal: f64) -> f64 {
    let mut sum = 0.0;
    for (i, c) in grid.cells.iter().enumerate() {
        let e2: f64 = e.iter().map(|comp| comp[i] * comp[i]).sum();
        let u2: f64 = c.velocity().iter().map(|u| u * u).sum();
        sum += e2 + c.rho() * u2 + thermal * c.rho() * c.uth * c.uth;
    }
    sum * grid.cell_volume()
}

/// `Σ_j (|E_j|² + ρ_j|u_j|² + D ρ_j u_th,j²) ΔV`: field energy plus the
/// kinetic moment `∫|v|² f dv`.
pub fn total_energy(grid: &Grid, e: &[Vec<f64>]) -> f64 {
    energy_with_factor(grid, e, grid.dim() as f64)
}

/// As [`total_energy`] with the thermal term `ρ u_th²` (no factor `D`);
/// identical in 1D.
pub fn total_energy_reduced(grid: &Grid, e: &[Vec<f64>]) -> f64 {
    energy_with_factor(grid, e, 1.0)
}

/// Strict local maxima of a sampled series, refined by a parabola through
/// the three surrounding samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakList {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub threshold: f64,
}

impl PeakList {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Peaks with `t_a ≤ t ≤ t_b`.
    pub fn window(&self, ta: f64, tb: f64) -> PeakList {
        let (times, values) = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= ta && **t <= tb)
            .map(|(t, v)| (*t, *v))
            .unzip();
        PeakList {
            times,
            values,
            threshold: self.threshold,
        }
    }
}

/// Peaks of `values` with the default noise floor `1e3·ε·values[0]`.
pub fn find_peaks(times: &[f64], values: &[f64]) -> PeakList {
    let floor = values.first().map_or(0.0, |v| 1e3 * f64::EPSILON * v.abs());
    find_peaks_above(times, values, floor)
}

pub fn find_peaks_above(times: &[f64], values: &[f64], threshold: f64) -> PeakList {
    let mut peaks = PeakList {
        threshold,
        ..Default::default()
    };
    let n = times.len().min(values.len());
    for i in 1..n.saturating_sub(1) {
        let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
        if !(y0 < y1 && y1 > y2) {
            continue;
        }
        let (t0, t1, t2) = (times[i - 1], times[i], times[i + 1]);
        let d1 = (y1 - y0) / (t1 - t0);
        let d2 = ((y2 - y1) / (t2 - t1) - d1) / (t2 - t0);
        let (t, v) = if d2 < 0.0 {
            let t = 0.5 * (t0 + t1) - 0.5 * d1 / d2;
            (t, y0 + d1 * (t - t0) + d2 * (t - t0) * (t - t1))
        } else {
            (t1, y1)
        };
        if v > threshold {
            peaks.times.push(t);
            peaks.values.push(v);
        }
    }
    peaks
}

/// Least-squares line through `(t_i, ln 𝓔_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingFit {
    /// Slope: the damping (negative) or growth (positive) rate.
    pub rate: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `ln 𝓔`.
    pub residual: f64,
    pub peaks: usize,
}

pub fn fit_damping_rate(peaks: &PeakList, window: (f64, f64)) -> Result<DampingFit> {
    let w = peaks.window(window.0, window.1);
    let logs: Vec<f64> = w.values.iter().map(|v| v.ln()).collect();
    fit_line(&w.times, &logs)
}

/// Ordinary least squares `y ≈ a + b·t`, `rate = b`.
pub fn fit_line(t: &[f64], y: &[f64]) -> Result<DampingFit> {
    let n = t.len();
    if n < 2 {
        return Err(Error::TooFewPeaks(n));
    }
    let tm = t.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = t.iter().map(|x| (x - tm) * (x - tm)).sum();
    let sxy: f64 = t.iter().zip(y).map(|(x, v)| (x - tm) * (v - ym)).sum();
    let rate = sxy / sxx;
    let intercept = ym - rate * tm;
    let ss: f64 = t
        .iter()
        .zip(y)
        .map(|(x, v)| (v - intercept - rate * x).powi(2))
        .sum();
    Ok(DampingFit {
        rate,
        intercept,
        residual: (ss / n as f64).sqrt(),
        peaks: n,
    })
}

/// `ω_R = π / mean peak spacing` (𝓔 oscillates at twice the wave frequency).
pub fn estimate_frequency(peaks: &PeakList) -> Result<f64> {
    let n = peaks.len();
    if n < 2 {
        return Err(Error::TooFewPeaks(n));
    }
    let spacing = (peaks.times[n - 1] - peaks.times[0]) / (n - 1) as f64;
    Ok(PI / spacing)
}

/// Recurrence time `(π/k)√M` of an order-`M` Hermite discretisation.
pub fn recurrence_time_estimate(m: usize, k: f64) -> f64 {
    PI / k * (m as f64).sqrt()
}

/// Recurrence period `2π/(kΔv)` of an equidistant velocity grid.
pub fn dvm_recurrence_time(k: f64, dv: f64) -> f64 {
    2.0 * PI / (k * dv)
}
