//! Spectral filters acting on Hermite coefficients.
//!
//! Every filter scales `f_α` by a factor that depends on `|α|/M` only.
//! The exponential filter damps all orders; Hou-Li's filter leaves
//! `|α|/M ≤ 2/3` untouched; the quasi time-consistent filter additionally
//! weights the exponent by `(Δt/T₀)^{1-η^γ}` so repeated application over a
//! fixed physical time is nearly independent of the step size.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moments::MomentState;
use crate::multi_index::MultiIndexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    None,
    Exponential,
    HouLi,
    QuasiTimeConsistent,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::None => "none",
            FilterKind::Exponential => "exponential",
            FilterKind::HouLi => "hou_li",
            FilterKind::QuasiTimeConsistent => "quasi",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(FilterKind::None),
            "exponential" | "exp" => Ok(FilterKind::Exponential),
            "hou_li" | "houli" => Ok(FilterKind::HouLi),
            "quasi" | "quasi_time_consistent" => Ok(FilterKind::QuasiTimeConsistent),
            other => Err(format!(
                "unknown filter kind `{other}` (expected none, exponential, hou_li, quasi)"
            )),
        }
    }
}

/// Cutoff fraction kept as a ratio of integers so `|α|/M ≤ p/q` is decided
/// exactly as `q·|α| ≤ p·M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoff {
    num: u64,
    den: u64,
}

impl Cutoff {
    pub const TWO_THIRDS: Cutoff = Cutoff { num: 2, den: 3 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::InvalidParameter(format!(
                "cutoff must lie strictly between 0 and 1, got {num}/{den}"
            )));
        }
        Ok(Cutoff { num, den })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `degree / order ≤ cutoff`.
    pub fn keeps(self, degree: usize, order: usize) -> bool {
        self.den * degree as u64 <= self.num * order as u64
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Cutoff {
    type Err = String;

    /// Accepts `p/q` or a decimal with at most nine fractional digits.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let parsed = if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse::<u64>().map_err(|e| e.to_string())?;
            let q = q.trim().parse::<u64>().map_err(|e| e.to_string())?;
            Cutoff::new(p, q)
        } else {
            let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
            if whole.trim_start_matches('0') != "" || frac.len() > 9 || frac.is_empty() {
                return Err(format!("expected p/q or 0.xxx, got `{s}`"));
            }
            let den = 10u64.pow(frac.len() as u32);
            let num = frac.parse::<u64>().map_err(|e| e.to_string())?;
            let g = gcd(num, den);
            Cutoff::new(num / g.max(1), den / g.max(1))
        };
        parsed.map_err(|e| e.to_string())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub beta: f64,
    pub gamma: f64,
    pub cutoff: Cutoff,
    pub t0: f64,
    /// Orders `|α| ≤ protected_order` are never touched by the Hou-Li and
    /// quasi kinds.
    pub protected_order: usize,
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec {
            kind: FilterKind::QuasiTimeConsistent,
            beta: 36.0,
            gamma: 36.0,
            cutoff: Cutoff::TWO_THIRDS,
            t0: 1.0,
            protected_order: 2,
        }
    }
}

impl FilterSpec {
    pub fn of_kind(kind: FilterKind) -> Self {
        FilterSpec {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("filter beta must be > 0, got {}", self.beta)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("filter gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.t0 > 0.0) {
            return Err(Error::InvalidParameter(format!("filter t0 must be > 0, got {}", self.t0)));
        }
        if self.protected_order < 2 {
            return Err(Error::InvalidParameter("protected order must be >= 2".into()));
        }
        Ok(())
    }

    /// Damping exponent `−ln σ` for total degree `degree` in an order-`order`
    /// expansion and a step of length `dt`; exactly 0 where σ = 1.
    pub fn exponent(&self, degree: usize, order: usize, dt: f64) -> f64 {
        let eta = degree as f64 / order as f64;
        let protected = degree <= self.protected_order || self.cutoff.keeps(degree, order);
        match self.kind {
            FilterKind::None => 0.0,
            FilterKind::Exponential => self.beta * eta.powf(self.gamma),
            FilterKind::HouLi if protected => 0.0,
            FilterKind::HouLi => self.beta * eta.powf(self.gamma),
            FilterKind::QuasiTimeConsistent if protected => 0.0,
            FilterKind::QuasiTimeConsistent => {
                let power = eta.powf(self.gamma);
                self.beta * power * (dt / self.t0).powf(1.0 - power)
            }
        }
    }

    /// Filter factor `σ = exp(−exponent)`.
    pub fn factor(&self, degree: usize, order: usize, dt: f64) -> f64 {
        match self.exponent(degree, order, dt) {
            0.0 => 1.0,
            x => (-x).exp(),
        }
    }

    /// Factors for every degree `0..=order`.
    pub fn factors(&self, order: usize, dt: f64) -> Vec<f64> {
        (0..=order).map(|n| self.factor(n, order, dt)).collect()
    }
}

/// Filter factor `σ(α/M, Δt)` for a multi-index.
pub fn filter_factor(spec: &FilterSpec, alpha: &[usize], order: usize, dt: f64) -> f64 {
    spec.factor(alpha.iter().sum(), order, dt)
}

/// Scale each coefficient by its filter factor; `u`, `u_th` are unchanged.
pub fn apply_filter(state: &MomentState, spec: &FilterSpec, dt: f64) -> MomentState {
    let mut out = state.clone();
    apply_filter_in_place(&mut out, &spec.factors(state.order(), dt));
    out
}

pub(crate) fn apply_filter_in_place(state: &mut MomentState, factors: &[f64]) {
    if factors.iter().all(|&s| s == 1.0) {
        return;
    }
    let set = state.set().clone();
    for (i, c) in state.coeffs.iter_mut().enumerate() {
        *c *= factors[set.degree(i)];
    }
}

/// Outcome of checking the four structural requirements on a filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    pub order: usize,
    pub dt: f64,
    /// σ depends on α only through |α|.
    pub rotational: bool,
    /// σ = 1 for |α| ≤ 2 (zero damping exponent).
    pub conservation: bool,
    /// σ(n/M) ≥ σ((n+1)/M).
    pub monotone: bool,
    /// σ(α/M) → 1 as M grows.
    pub limit: bool,
    pub failures: Vec<String>,
}

impl FilterReport {
    pub fn all_pass(&self) -> bool {
        self.rotational && self.conservation && self.monotone && self.limit
    }
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "M = {}, dt = {}", self.order, self.dt)?;
        writeln!(f, "  (a) rotational invariance : {}", mark(self.rotational))?;
        writeln!(f, "  (b) conservation |a|<=2   : {}", mark(self.conservation))?;
        writeln!(f, "  (c) monotone decreasing   : {}", mark(self.monotone))?;
        writeln!(f, "  (d) vanishing as M grows  : {}", mark(self.limit))?;
        for msg in &self.failures {
            writeln!(f, "      {msg}")?;
        }
        Ok(())
    }
}

/// Check rotational invariance, conservation, monotonicity and the large-M
/// limit for `spec` at expansion order `order` and step `dt`.
pub fn validate_filter(spec: &FilterSpec, order: usize, dt: f64) -> Result<FilterReport> {
    if order < 3 {
        return Err(Error::InvalidParameter(format!("filter validation needs M >= 3, got {order}")));
    }
    let mut failures = Vec::new();

    let set = MultiIndexSet::new(2, order)?;
    let mut rotational = true;
    for alpha in set.iter() {
        let degree: usize = alpha.iter().sum();
        let reference = filter_factor(spec, &[degree, 0], order, dt);
        let value = filter_factor(spec, alpha, order, dt);
        if value != reference {
            rotational = false;
            failures.push(format!("(a) sigma{alpha:?} = {value:e} != sigma[{degree}, 0] = {reference:e}"));
            break;
        }
    }

    let mut conservation = true;
    // σ(η) can round to 1.0 for tiny η, so test the exponent instead.
    for n in 0..=2 {
        let x = spec.exponent(n, order, dt);
        if x != 0.0 {
            conservation = false;
            failures.push(format!("(b) sigma({n}/{order}) = exp(-{x:e}) < 1"));
        }
    }

    let mut monotone = true;
    for n in 0..order {
        let (a, b) = (spec.factor(n, order, dt), spec.factor(n + 1, order, dt));
        if a < b {
            monotone = false;
            failures.push(format!("(c) sigma({n}/{order}) = {a:e} < sigma({}/{order}) = {b:e}", n + 1));
            break;
        }
    }

    let mut limit = true;
    'outer: for n in 0..=order {
        let mut prev = spec.factor(n, order, dt);
        for scale in [2, 4, 8] {
            let s = spec.factor(n, order * scale, dt);
            if s < prev {
                limit = false;
                failures.push(format!("(d) sigma({n}/{}) decreased as M grew", order * scale));
                break 'outer;
            }
            prev = s;
        }
        if 1.0 - prev > 1e-12 {
            limit = false;
            failures.push(format!("(d) sigma({n}/{}) = {prev:e} not within 1e-12 of 1", 8 * order));
            break;
        }
    }

    Ok(FilterReport {
        order,
        dt,
        rotational,
        conservation,
        monotone,
        limit,
        failures,
    })
}

/// `max_n |σ(n/M, Δt₁)^{k₁} − σ(n/M, Δt₂)^{k₂}|` for `k₁Δt₁ = k₂Δt₂`.
pub fn time_consistency_defect(
    spec: &FilterSpec,
    order: usize,
    dt1: f64,
    k1: u32,
    dt2: f64,
    k2: u32,
) -> Result<f64> {
    let (t1, t2) = (k1 as f64 * dt1, k2 as f64 * dt2);
    if (t1 - t2).abs() > 1e-12 * t1.abs().max(t2.abs()) {
        return Err(Error::InvalidParameter(format!(
            "time consistency compares equal spans, got {t1} vs {t2}"
        )));
    }
    Ok((0..=order)
        .map(|n| {
            let a = spec.factor(n, order, dt1).powi(k1 as i32);
            let b = spec.factor(n, order, dt2).powi(k2 as i32);
            (a - b).abs()
        })
        .fold(0.0, f64::max))
}
