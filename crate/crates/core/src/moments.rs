//! Moment-state data model: Hermite coefficients about a local Maxwellian.
//!
//! A state represents `f(v) = Σ_{|α|≤M} f_α H_α^{[u,u_th]}(v)` with
//! `H_α = (-1)^{|α|} ∂^α ω` and `ω` the Gaussian centred at `u` with
//! variance `u_th²`.  In one dimension
//! `H_n(v) = u_th^{-n} He_n((v-u)/u_th) ω(v)`.
//!
//! Re-centring works on the generating polynomial `F(t) = Σ f_α t^α`.
//! Raw moments satisfy `m_β / β! = [t^β] F(t)·exp(u·t + u_th²|t|²/2)`, so
//! moving the expansion from `(u, θ)` to `(u', θ')` while keeping every
//! moment up to order `M` is the truncated product
//! `F'(t) = F(t)·exp((u-u')·t + (θ²-θ'²)|t|²/2)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::multi_index::{MultiIndexSet, MAX_DIM};

/// Series terms below this size (in the orthonormal scaling) are dropped
/// once the remaining tail is provably smaller.
const SERIES_TOL: f64 = 1e-22;

/// Largest `|f_α| / ρ` accepted after a rebase.
pub const REBASE_GUARD: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    set: Arc<MultiIndexSet>,
    pub u: [f64; MAX_DIM],
    pub uth: f64,
    pub coeffs: Vec<f64>,
}

impl MomentState {
    /// A Maxwellian: only `f_0 = ρ` is nonzero.
    pub fn maxwellian(set: Arc<MultiIndexSet>, rho: f64, u: &[f64], uth: f64) -> Result<Self> {
        let mut coeffs = vec![0.0; set.len()];
        coeffs[0] = rho;
        Self::from_parts(set, u, uth, coeffs)
    }

    pub fn from_parts(
        set: Arc<MultiIndexSet>,
        u: &[f64],
        uth: f64,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        if u.len() != set.dim() {
            return Err(Error::InvalidParameter(format!(
                "velocity has {} components, expected {}",
                u.len(),
                set.dim()
            )));
        }
        if coeffs.len() != set.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients supplied, expansion needs {}",
                coeffs.len(),
                set.len()
            )));
        }
        if !(uth > 0.0) {
            return Err(Error::InvalidParameter(format!("u_th must be > 0, got {uth}")));
        }
        let mut packed = [0.0; MAX_DIM];
        packed[..u.len()].copy_from_slice(u);
        Ok(MomentState {
            set,
            u: packed,
            uth,
            coeffs,
        })
    }

    pub fn set(&self) -> &Arc<MultiIndexSet> {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn order(&self) -> usize {
        self.set.order()
    }

    /// Number density; equal to `f_0` in every basis.
    pub fn rho(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn velocity(&self) -> &[f64] {
        &self.u[..self.dim()]
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|x| *x *= c);
        out
    }

    /// Largest violation of `f_0 = ρ`, `f_{e_k} = 0`, `Σ f_{2e_d} = 0`.
    pub fn constraint_defect(&self) -> f64 {
        let d = self.dim();
        let mut defect: f64 = 0.0;
        if self.order() >= 1 {
            for k in 0..d {
                defect = defect.max(self.coeffs[self.set.unit(k)].abs());
            }
        }
        if self.order() >= 2 {
            let sum: f64 = (0..d).map(|k| self.coeffs[self.set.double_unit(k)]).sum();
            defect = defect.max(sum.abs());
        }
        defect
    }
}

/// Coefficients of `exp(a t + b t²)` up to `t^{max_len-1}`.
///
/// With `scale = Some(s)` the tail is cut once `|e_j| s^j` has dropped
/// below the tolerance for good; `s = √M/u_th` bounds how much a term of
/// order `j` can grow when measured in the orthonormal scaling
/// `f_n √(n!)/u_th^n`. `None` keeps every term.
pub(crate) fn gaussian_shift_series(a: f64, b: f64, max_len: usize, scale: Option<f64>) -> Vec<f64> {
    let mut e = Vec::with_capacity(max_len.min(16));
    if max_len == 0 {
        return e;
    }
    e.push(1.0);
    if max_len == 1 {
        return e;
    }
    e.push(a);
    let s = scale.unwrap_or(0.0);
    // Scaled terms obey (j+1)ẽ_{j+1} = a s ẽ_j + 2 b s² ẽ_{j-1}.
    let growth = a.abs() * s + 2.0 * b.abs() * s * s;
    let mut sj = s;
    for j in 1..max_len - 1 {
        if scale.is_some()
            && (e[j] * sj).abs() <= SERIES_TOL
            && (e[j - 1] * sj / s).abs() <= SERIES_TOL
            && growth <= (j + 1) as f64
        {
            break;
        }
        let next = (a * e[j] + 2.0 * b * e[j - 1]) / (j + 1) as f64;
        e.push(next);
        sj *= s;
    }
    while e.len() > 1 && *e.last().unwrap() == 0.0 {
        e.pop();
    }
    e
}

/// Multiply the coefficient array by a 1D series in `t_d`, truncating at
/// the set's order.
fn multiply_axis(set: &MultiIndexSet, src: &[f64], d: usize, series: &[f64]) -> Vec<f64> {
    if series.len() == 1 {
        return src.iter().map(|x| x * series[0]).collect();
    }
    if set.dim() == 1 {
        return (0..src.len())
            .map(|i| {
                series
                    .iter()
                    .take(i + 1)
                    .enumerate()
                    .map(|(j, e)| e * src[i - j])
                    .sum()
            })
            .collect();
    }
    (0..src.len())
        .map(|i| {
            let mut acc = series[0] * src[i];
            let mut k = i;
            for &e in &series[1..] {
                match set.lower(k, d) {
                    Some(p) => {
                        k = p;
                        acc += e * src[k];
                    }
                    None => break,
                }
            }
            acc
        })
        .collect()
}

/// Re-express a coefficient array given about `(from_u, from_th)` about
/// `(to_u, to_th)`, preserving all raw moments up to the set's order.
pub fn rebase_coeffs(
    set: &MultiIndexSet,
    coeffs: &[f64],
    from_u: &[f64],
    from_th: f64,
    to_u: &[f64],
    to_th: f64,
) -> Vec<f64> {
    let b = 0.5 * (from_th * from_th - to_th * to_th);
    let len = set.order() + 1;
    let scale = (set.order() as f64).sqrt() / from_th.min(to_th);
    let mut out: Option<Vec<f64>> = None;
    for d in 0..set.dim() {
        let a = from_u[d] - to_u[d];
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let series = gaussian_shift_series(a, b, len, Some(scale));
        let src = out.as_deref().unwrap_or(coeffs);
        out = Some(multiply_axis(set, src, d, &series));
    }
    out.unwrap_or_else(|| coeffs.to_vec())
}

/// Expand the same distribution about a new centre and thermal speed.
pub fn rebase(state: &MomentState, u_new: &[f64], uth_new: f64) -> Result<MomentState> {
    if !(uth_new > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rebase target u_th must be > 0, got {uth_new}"
        )));
    }
    let coeffs = rebase_coeffs(
        &state.set,
        &state.coeffs,
        state.velocity(),
        state.uth,
        u_new,
        uth_new,
    );
    let limit = REBASE_GUARD * state.rho().abs();
    let magnitude = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if magnitude > limit || !magnitude.is_finite() {
        return Err(Error::IllConditionedRebase { magnitude, limit });
    }
    MomentState::from_parts(state.set.clone(), u_new, uth_new, coeffs)
}

/// Raw moments `m_β = ∫ v^β f dv` for `|β| ≤ order`, in the set's
/// graded order (a prefix of the coefficient layout).
pub fn raw_moments(state: &MomentState, order: usize) -> Result<Vec<f64>> {
    let set = &state.set;
    if order > set.order() {
        return Err(Error::OrderTooHigh {
            requested: order,
            max: set.order(),
        });
    }
    let b = 0.5 * state.uth * state.uth;
    let mut series = state.coeffs.clone();
    for d in 0..set.dim() {
        let g = gaussian_shift_series(state.u[d], b, set.order() + 1, None);
        series = multiply_axis(set, &series, d, &g);
    }
    let len = set.prefix_len(order);
    Ok((0..len)
        .map(|i| {
            let fact: f64 = set
                .alpha(i)
                .iter()
                .map(|&a| (1..=a).map(|x| x as f64).product::<f64>())
                .product();
            fact * series[i]
        })
        .collect())
}

/// Point value of the expanded distribution.
pub fn evaluate_distribution(state: &MomentState, v: &[f64]) -> f64 {
    let set = &state.set;
    let dim = set.dim();
    let m = set.order();
    let th = state.uth;
    // Per-dimension table of u_th^{-n} He_n(z_d).
    let mut tables = Vec::with_capacity(dim);
    let mut sq = 0.0;
    for d in 0..dim {
        let z = (v[d] - state.u[d]) / th;
        sq += z * z;
        let mut col = Vec::with_capacity(m + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        let mut scale = 1.0;
        for n in 0..=m {
            col.push(cur * scale);
            let next = z * cur - n as f64 * prev;
            prev = cur;
            cur = next;
            scale /= th;
        }
        tables.push(col);
    }
    let poly: f64 = set
        .iter()
        .zip(&state.coeffs)
        .map(|(alpha, c)| c * alpha.iter().enumerate().map(|(d, &a)| tables[d][a]).product::<f64>())
        .sum();
    let norm = ((2.0 * PI).sqrt() * th).powi(dim as i32);
    poly * (-0.5 * sq).exp() / norm
}

/// Recover `(ρ, u, u_th)` from the first three moments and re-expand so the
/// constraints `f_0 = ρ`, `f_{e_k} = 0`, `Σ_d f_{2e_d} = 0` hold exactly.
pub fn enforce_constraints(state: &MomentState) -> Result<MomentState> {
    let set = state.set.clone();
    let dim = set.dim();
    if set.order() < 2 {
        return Err(Error::InvalidParameter(
            "constraint enforcement needs order >= 2".into(),
        ));
    }
    let rho = state.rho();
    let th2 = state.uth * state.uth;
    let mut u_new = [0.0; MAX_DIM];
    let mut second = 0.0;
    for d in 0..dim {
        let f1 = state.coeffs[set.unit(d)];
        let f2 = state.coeffs[set.double_unit(d)];
        let u = state.u[d];
        let m1 = f1 + u * rho;
        second += 2.0 * f2 + 2.0 * u * f1 + (u * u + th2) * rho;
        u_new[d] = m1 / rho;
    }
    let speed2: f64 = u_new[..dim].iter().map(|x| x * x).sum();
    let uth_sq = (second / rho - speed2) / dim as f64;
    if !(rho > 0.0) || !(uth_sq > 0.0) || !uth_sq.is_finite() {
        return Err(Error::Realizability {
            cell: None,
            rho,
            uth_sq,
        });
    }
    let uth_new = uth_sq.sqrt();
    let mut coeffs = rebase_coeffs(
        &set,
        &state.coeffs,
        state.velocity(),
        state.uth,
        &u_new[..dim],
        uth_new,
    );
    coeffs[0] = rho;
    for d in 0..dim {
        coeffs[set.unit(d)] = 0.0;
    }
    let doubles: Vec<usize> = (0..dim).map(|d| set.double_unit(d)).collect();
    let mean = doubles.iter().map(|&i| coeffs[i]).sum::<f64>() / dim as f64;
    for &i in &doubles {
        coeffs[i] -= mean;
    }
    MomentState::from_parts(set, &u_new[..dim], uth_new, coeffs)
}
