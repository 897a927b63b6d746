use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hermite::{hermite_zeros, JacobiEigen};
use crate::moments::{rebase_coeffs, MomentState, REBASE_GUARD};
use crate::multi_index::{MultiIndexSet, MAX_DIM};

/// Interface flux family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxScheme {
    /// Two-wave HLL bounded by the extreme characteristic speeds of both cells.
    Hll,
    /// Exact characteristic upwinding of the linear flux in the left basis,
    /// `½(F_L + F_R) − ½|A|(U_R − U_L)`.
    Upwind,
}

impl FluxScheme {
    pub fn name(self) -> &'static str {
        match self {
            FluxScheme::Hll => "hll",
            FluxScheme::Upwind => "upwind",
        }
    }
}

impl std::fmt::Display for FluxScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FluxScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hll" => Ok(FluxScheme::Hll),
            "upwind" => Ok(FluxScheme::Upwind),
            other => Err(format!("unknown flux `{other}` (expected hll or upwind)")),
        }
    }
}

/// Moment expansion of `v_j f` at an interface, tagged with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxCoeffs {
    pub u: [f64; MAX_DIM],
    pub uth: f64,
    pub coeffs: Vec<f64>,
}

impl FluxCoeffs {
    /// The same flux expanded about another basis.
    pub fn rebased(&self, set: &MultiIndexSet, u: &[f64], uth: f64) -> FluxCoeffs {
        let dim = set.dim();
        let coeffs = rebase_coeffs(set, &self.coeffs, &self.u[..dim], self.uth, u, uth);
        let mut packed = [0.0; MAX_DIM];
        packed[..dim].copy_from_slice(u);
        FluxCoeffs {
            u: packed,
            uth,
            coeffs,
        }
    }
}

/// `g_α = u_th² f_{α−e_j} + u_j f_α + (1 − δ_{M,|α|})(α_j + 1) f_{α+e_j}`
/// written into `out`.
pub(crate) fn flux_into(set: &MultiIndexSet, f: &[f64], u_j: f64, uth: f64, j: usize, out: &mut [f64]) {
    let th2 = uth * uth;
    if set.dim() == 1 {
        let m = set.order();
        for n in 0..=m {
            let mut g = u_j * f[n];
            if n > 0 {
                g += th2 * f[n - 1];
            }
            if n < m {
                g += (n + 1) as f64 * f[n + 1];
            }
            out[n] = g;
        }
        return;
    }
    for i in 0..f.len() {
        let mut g = u_j * f[i];
        if let Some(lo) = set.lower(i, j) {
            g += th2 * f[lo];
        }
        if let Some(hi) = set.raise(i, j) {
            g += (set.alpha(i)[j] + 1) as f64 * f[hi];
        }
        out[i] = g;
    }
}

/// Regularised velocity flux of `state` along direction `j`, in its own basis.
pub fn velocity_flux_coeffs(state: &MomentState, j: usize) -> FluxCoeffs {
    let mut coeffs = vec![0.0; state.coeffs.len()];
    flux_into(state.set(), &state.coeffs, state.u[j], state.uth, j, &mut coeffs);
    FluxCoeffs {
        u: state.u,
        uth: state.uth,
        coeffs,
    }
}

/// Eigenvalues of the regularised flux Jacobian along the unit vector `n`,
/// ascending. 1D: `u·n + C_k^{M+1} u_th`; 2D: `u·n + C_k^m u_th` for
/// `1 ≤ k ≤ m ≤ M+1` (with multiplicity).
pub fn characteristic_speeds(state: &MomentState, n: &[f64]) -> Result<Vec<f64>> {
    let dim = state.dim();
    if n.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "direction has {} components, expected {dim}",
            n.len()
        )));
    }
    let un: f64 = state.velocity().iter().zip(n).map(|(u, n)| u * n).sum();
    let m = state.order();
    let orders: Vec<usize> = if dim == 1 { vec![m + 1] } else { (1..=m + 1).collect() };
    let mut speeds = Vec::new();
    for order in orders {
        speeds.extend(hermite_zeros(order)?.into_iter().map(|z| un + z * state.uth));
    }
    speeds.sort_by(f64::total_cmp);
    Ok(speeds)
}

/// Lines of multi-indices along one direction: fixed transverse components,
/// `α_j = 0, 1, …` in order.
#[derive(Debug, Clone)]
struct Lines {
    members: Vec<Vec<usize>>,
}

impl Lines {
    fn new(set: &MultiIndexSet, j: usize) -> Self {
        let mut members = Vec::new();
        for (i, alpha) in set.iter().enumerate() {
            if alpha[j] != 0 {
                continue;
            }
            let mut line = vec![i];
            let mut k = i;
            while let Some(next) = set.raise(k, j) {
                line.push(next);
                k = next;
            }
            members.push(line);
        }
        Lines { members }
    }
}

/// Spatial discretisation of the moment system on one expansion.
#[derive(Debug, Clone)]
pub struct HmeSolver {
    set: Arc<MultiIndexSet>,
    scheme: FluxScheme,
    zmax: f64,
    eigen: Vec<JacobiEigen>,
    lines: Vec<Lines>,
}

/// Reusable buffers for interface fluxes.
#[derive(Debug, Clone, Default)]
pub(crate) struct FluxWork {
    right: Vec<f64>,
    flux_l: Vec<f64>,
    flux_r: Vec<f64>,
    scale: Vec<f64>,
    tmp: Vec<f64>,
    proj: Vec<f64>,
}

impl HmeSolver {
    pub fn new(set: Arc<MultiIndexSet>, scheme: FluxScheme) -> Result<Self> {
        if set.order() < 3 {
            return Err(Error::InvalidParameter(format!(
                "moment order must be >= 3, got {}",
                set.order()
            )));
        }
        let m = set.order();
        let zmax = *hermite_zeros(m + 1)?.last().expect("non-empty");
        let (eigen, lines) = match scheme {
            FluxScheme::Hll => (Vec::new(), Vec::new()),
            FluxScheme::Upwind => (
                (1..=m + 1).map(JacobiEigen::new).collect::<Result<Vec<_>>>()?,
                (0..set.dim()).map(|j| Lines::new(&set, j)).collect(),
            ),
        };
        Ok(HmeSolver {
            set,
            scheme,
            zmax,
            eigen,
            lines,
        })
    }

    pub fn set(&self) -> &Arc<MultiIndexSet> {
        &self.set
    }

    pub fn scheme(&self) -> FluxScheme {
        self.scheme
    }

    /// Largest zero of `He_{M+1}`.
    pub fn max_zero(&self) -> f64 {
        self.zmax
    }

    /// `(min, max)` characteristic speed of a cell along direction `j`.
    #[inline]
    pub fn speed_bounds(&self, state: &MomentState, j: usize) -> (f64, f64) {
        let spread = self.zmax * state.uth;
        (state.u[j] - spread, state.u[j] + spread)
    }

    pub fn hll_flux(&self, left: &MomentState, right: &MomentState, j: usize) -> Result<FluxCoeffs> {
        self.flux_with(FluxScheme::Hll, left, right, j)
    }

    pub fn upwind_flux(&self, left: &MomentState, right: &MomentState, j: usize) -> Result<FluxCoeffs> {
        if self.scheme != FluxScheme::Upwind {
            return HmeSolver::new(self.set.clone(), FluxScheme::Upwind)?.upwind_flux(left, right, j);
        }
        self.flux_with(FluxScheme::Upwind, left, right, j)
    }

    /// Interface flux with the solver's scheme, in the left cell's basis.
    pub fn interface_flux(&self, left: &MomentState, right: &MomentState, j: usize) -> Result<FluxCoeffs> {
        self.flux_with(self.scheme, left, right, j)
    }

    fn flux_with(&self, scheme: FluxScheme, left: &MomentState, right: &MomentState, j: usize) -> Result<FluxCoeffs> {
        let mut out = vec![0.0; self.set.len()];
        let mut work = FluxWork::default();
        self.flux_into(scheme, left, right, j, &mut work, &mut out)?;
        Ok(FluxCoeffs {
            u: left.u,
            uth: left.uth,
            coeffs: out,
        })
    }

    pub(crate) fn flux_into(
        &self,
        scheme: FluxScheme,
        left: &MomentState,
        right: &MomentState,
        j: usize,
        work: &mut FluxWork,
        out: &mut [f64],
    ) -> Result<()> {
        let set = &*self.set;
        let n = set.len();
        let dim = set.dim();
        work.right = rebase_coeffs(
            set,
            &right.coeffs,
            right.velocity(),
            right.uth,
            &left.u[..dim],
            left.uth,
        );
        let limit = REBASE_GUARD * right.rho().abs();
        let magnitude = work.right.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if magnitude > limit || !magnitude.is_finite() {
            return Err(Error::IllConditionedRebase { magnitude, limit });
        }
        work.flux_l.resize(n, 0.0);
        work.flux_r.resize(n, 0.0);
        flux_into(set, &left.coeffs, left.u[j], left.uth, j, &mut work.flux_l);
        flux_into(set, &work.right, left.u[j], left.uth, j, &mut work.flux_r);

        match scheme {
            FluxScheme::Hll => {
                let (l_lo, l_hi) = self.speed_bounds(left, j);
                let (r_lo, r_hi) = self.speed_bounds(right, j);
                let (lo, hi) = (l_lo.min(r_lo), l_hi.max(r_hi));
                if lo >= 0.0 {
                    out.copy_from_slice(&work.flux_l);
                } else if hi <= 0.0 {
                    out.copy_from_slice(&work.flux_r);
                } else {
                    let inv = 1.0 / (hi - lo);
                    for i in 0..n {
                        out[i] = (hi * work.flux_l[i] - lo * work.flux_r[i]
                            + lo * hi * (work.right[i] - left.coeffs[i]))
                            * inv;
                    }
                }
            }
            FluxScheme::Upwind => {
                // In d_a = f_a √(a!)/θ^a the flux matrix along a line is
                // u + θ·J with J the symmetric Jacobi matrix of He_{L}.
                let th = left.uth;
                let m = set.order();
                work.scale.clear();
                let mut s = 1.0;
                for a in 0..=m {
                    if a > 0 {
                        s *= (a as f64).sqrt() / th;
                    }
                    work.scale.push(s);
                }
                for i in 0..n {
                    out[i] = 0.5 * (work.flux_l[i] + work.flux_r[i]);
                }
                for line in &self.lines[j].members {
                    let len = line.len();
                    let eig = &self.eigen[len - 1];
                    work.tmp.clear();
                    work.tmp.extend(
                        line.iter()
                            .enumerate()
                            .map(|(a, &i)| work.scale[a] * (work.right[i] - left.coeffs[i])),
                    );
                    work.proj.clear();
                    for k in 0..len {
                        let mut acc = 0.0;
                        for r in 0..len {
                            acc += eig.vectors[r * len + k] * work.tmp[r];
                        }
                        work.proj.push(acc * (left.u[j] + th * eig.zeros[k]).abs());
                    }
                    for (r, &i) in line.iter().enumerate() {
                        let row = &eig.vectors[r * len..(r + 1) * len];
                        let acc: f64 = row.iter().zip(&work.proj).map(|(q, w)| q * w).sum();
                        out[i] -= 0.5 * acc / work.scale[r];
                    }
                }
            }
        }
        Ok(())
    }
}
