use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::filter::{Cutoff, FilterKind, FilterSpec};
use crate::solver::FluxScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Landau1d,
    Landau2d,
    TwoStream,
    FreeStream,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Landau1d => "landau_1d",
            Preset::Landau2d => "landau_2d",
            Preset::TwoStream => "two_stream",
            Preset::FreeStream => "free_stream",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Preset::Landau2d => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "landau_1d" => Ok(Preset::Landau1d),
            "landau_2d" => Ok(Preset::Landau2d),
            "two_stream" => Ok(Preset::TwoStream),
            "free_stream" => Ok(Preset::FreeStream),
            other => Err(format!(
                "unknown preset `{other}` (expected landau_1d, landau_2d, two_stream, free_stream)"
            )),
        }
    }
}

/// Everything that defines a run. Text form: one `key = value` per line,
/// `#` starts a comment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub preset: Preset,
    /// Moment order `M`.
    pub m: usize,
    pub nx: usize,
    /// Cells along `y`; 1 for one-dimensional presets.
    pub ny: usize,
    pub kx: f64,
    pub ky: f64,
    /// Perturbation amplitude `A` (or `ε` for two_stream).
    pub amplitude: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub filter: FilterSpec,
    pub flux: FluxScheme,
    /// Record diagnostics every this many steps (the last step always).
    pub sample_every: usize,
    pub u0: f64,
    pub uth0: f64,
    pub spectrum_times: Vec<f64>,
    pub fit_start: f64,
    /// End of the fitting window; `None` means `t_end`.
    pub fit_end: Option<f64>,
    pub sweep_n: Vec<usize>,
    pub sweep_m: Vec<usize>,
    pub sweep_cfl: Vec<f64>,
    pub dvm_dv: f64,
    /// Velocity cut-off of the discrete-velocity reference; `None` picks
    /// `6·max(u_th, u₀ + u_th,0)`.
    pub dvm_vmax: Option<f64>,
}

pub const KEYS: &[&str] = &[
    "preset",
    "m",
    "n",
    "ny",
    "k",
    "ky",
    "amplitude",
    "cfl",
    "t_end",
    "flux",
    "sample_every",
    "u0",
    "uth0",
    "filter.kind",
    "filter.beta",
    "filter.gamma",
    "filter.cutoff",
    "filter.t0",
    "spectrum_times",
    "fit.t_start",
    "fit.t_end",
    "sweep.n",
    "sweep.m",
    "sweep.cfl",
    "dvm.dv",
    "dvm.vmax",
];

impl SimConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = SimConfig {
            preset,
            m: 50,
            nx: 400,
            ny: 1,
            kx: 0.3,
            ky: 0.3,
            amplitude: 1e-3,
            cfl: 0.45,
            t_end: 50.0,
            filter: FilterSpec::default(),
            flux: FluxScheme::Hll,
            sample_every: 1,
            u0: 1.0,
            uth0: 0.5,
            spectrum_times: Vec::new(),
            fit_start: 2.0,
            fit_end: None,
            sweep_n: Vec::new(),
            sweep_m: Vec::new(),
            sweep_cfl: Vec::new(),
            dvm_dv: 0.05,
            dvm_vmax: None,
        };
        match preset {
            Preset::Landau1d => base,
            Preset::Landau2d => SimConfig {
                m: 40,
                nx: 64,
                ny: 64,
                t_end: 20.0,
                ..base
            },
            Preset::TwoStream => SimConfig {
                m: 60,
                nx: 800,
                kx: 0.5,
                t_end: 40.0,
                ..base
            },
            Preset::FreeStream => SimConfig {
                m: 50,
                nx: 200,
                kx: 0.5,
                amplitude: 0.5,
                t_end: 20.0,
                ..base
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.preset.dim()
    }

    /// Domain lengths: `2π/k` in 1D, `4π/k_x` on both sides in 2D.
    pub fn lengths(&self) -> (f64, f64) {
        let tau = 2.0 * std::f64::consts::PI;
        match self.preset {
            Preset::Landau2d => (2.0 * tau / self.kx, 2.0 * tau / self.kx),
            _ => (tau / self.kx, 1.0),
        }
    }

    pub fn fit_window(&self) -> (f64, f64) {
        (self.fit_start, self.fit_end.unwrap_or(self.t_end))
    }

    /// Velocity cut-off used by the discrete-velocity reference.
    pub fn dvm_velocity_limit(&self) -> f64 {
        self.dvm_vmax
            .unwrap_or_else(|| 6.0 * f64::max(self.thermal_speed(), self.u0 + self.uth0))
    }

    /// Thermal speed of the initial expansion.
    pub fn thermal_speed(&self) -> f64 {
        match self.preset {
            Preset::TwoStream => (self.u0 * self.u0 + self.uth0 * self.uth0).sqrt(),
            _ => 1.0,
        }
    }

    /// Parse a config text, then apply `overrides` in order. The preset is
    /// resolved first so unspecified keys take that preset's defaults.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut entries = parse_lines(text)?;
        entries.extend(overrides.iter().cloned());
        let mut preset = Preset::Landau1d;
        for (key, value) in &entries {
            if key == "preset" {
                preset = value.parse().map_err(|reason| invalid(key, value, reason))?;
            }
        }
        let mut config = SimConfig::preset(preset);
        for (key, value) in &entries {
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, overrides)
    }

    /// Assign one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "preset" => self.preset = v.parse().map_err(|r| invalid(key, v, r))?,
            "m" => self.m = number(key, v)?,
            "n" | "nx" => self.nx = number(key, v)?,
            "ny" => self.ny = number(key, v)?,
            "k" | "kx" => self.kx = number(key, v)?,
            "ky" => self.ky = number(key, v)?,
            "amplitude" | "epsilon" => self.amplitude = number(key, v)?,
            "cfl" => self.cfl = number(key, v)?,
            "t_end" => self.t_end = number(key, v)?,
            "flux" => self.flux = v.parse().map_err(|r| invalid(key, v, r))?,
            "sample_every" => self.sample_every = number(key, v)?,
            "u0" => self.u0 = number(key, v)?,
            "uth0" => self.uth0 = number(key, v)?,
            "filter.kind" => self.filter.kind = v.parse::<FilterKind>().map_err(|r| invalid(key, v, r))?,
            "filter.beta" => self.filter.beta = number(key, v)?,
            "filter.gamma" => self.filter.gamma = number(key, v)?,
            "filter.cutoff" => self.filter.cutoff = v.parse::<Cutoff>().map_err(|r| invalid(key, v, r))?,
            "filter.t0" => self.filter.t0 = number(key, v)?,
            "spectrum_times" => self.spectrum_times = list(key, v)?,
            "fit.t_start" => self.fit_start = number(key, v)?,
            "fit.t_end" => {
                self.fit_end = if v == "end" { None } else { Some(number(key, v)?) }
            }
            "sweep.n" => self.sweep_n = list(key, v)?,
            "sweep.m" => self.sweep_m = list(key, v)?,
            "sweep.cfl" => self.sweep_cfl = list(key, v)?,
            "dvm.dv" => self.dvm_dv = number(key, v)?,
            "dvm.vmax" => {
                self.dvm_vmax = if v == "auto" { None } else { Some(number(key, v)?) }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        if key == "preset" && self.dim() == 1 {
            self.ny = 1;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |ok: bool, key: &str, value: String, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(invalid(key, &value, reason.to_string()))
            }
        };
        check(self.m >= 3, "m", self.m.to_string(), "moment order must be >= 3")?;
        check(self.nx >= 3, "n", self.nx.to_string(), "need at least 3 cells")?;
        if self.dim() == 2 {
            check(self.ny >= 3, "ny", self.ny.to_string(), "need at least 3 cells")?;
            check(self.ky > 0.0, "ky", self.ky.to_string(), "wave number must be > 0")?;
        } else {
            check(self.ny == 1, "ny", self.ny.to_string(), "one-dimensional presets use ny = 1")?;
        }
        check(self.kx > 0.0, "k", self.kx.to_string(), "wave number must be > 0")?;
        check(self.cfl > 0.0 && self.cfl < 1.0, "cfl", self.cfl.to_string(), "must lie in (0, 1)")?;
        check(self.t_end >= 0.0, "t_end", self.t_end.to_string(), "must be >= 0")?;
        check(self.sample_every >= 1, "sample_every", self.sample_every.to_string(), "must be >= 1")?;
        check(self.amplitude.abs() < 1.0, "amplitude", self.amplitude.to_string(), "must satisfy |A| < 1")?;
        check(self.uth0 > 0.0, "uth0", self.uth0.to_string(), "must be > 0")?;
        check(self.dvm_dv > 0.0, "dvm.dv", self.dvm_dv.to_string(), "must be > 0")?;
        if let Some(v) = self.dvm_vmax {
            check(v > 0.0, "dvm.vmax", v.to_string(), "must be > 0")?;
        }
        self.filter
            .validate()
            .map_err(|e| invalid("filter", &self.filter.kind.to_string(), e.to_string()))?;
        check(self.sweep_m.iter().all(|&m| m >= 3), "sweep.m", format!("{:?}", self.sweep_m), "orders must be >= 3")?;
        check(self.sweep_n.iter().all(|&n| n >= 3), "sweep.n", format!("{:?}", self.sweep_n), "need at least 3 cells")?;
        check(
            self.sweep_cfl.iter().all(|&c| c > 0.0 && c < 1.0),
            "sweep.cfl",
            format!("{:?}", self.sweep_cfl),
            "must lie in (0, 1)",
        )?;
        Ok(())
    }

    /// Canonical text form; parses back to an identical config.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("preset", self.preset.to_string());
        put("m", self.m.to_string());
        put("n", self.nx.to_string());
        put("ny", self.ny.to_string());
        put("k", self.kx.to_string());
        put("ky", self.ky.to_string());
        put("amplitude", self.amplitude.to_string());
        put("cfl", self.cfl.to_string());
        put("t_end", self.t_end.to_string());
        put("flux", self.flux.to_string());
        put("sample_every", self.sample_every.to_string());
        put("u0", self.u0.to_string());
        put("uth0", self.uth0.to_string());
        put("filter.kind", self.filter.kind.to_string());
        put("filter.beta", self.filter.beta.to_string());
        put("filter.gamma", self.filter.gamma.to_string());
        put("filter.cutoff", self.filter.cutoff.to_string());
        put("filter.t0", self.filter.t0.to_string());
        put("spectrum_times", join(&self.spectrum_times));
        put("fit.t_start", self.fit_start.to_string());
        put("fit.t_end", self.fit_end.map_or("end".into(), |v| v.to_string()));
        put("sweep.n", join(&self.sweep_n));
        put("sweep.m", join(&self.sweep_m));
        put("sweep.cfl", join(&self.sweep_cfl));
        put("dvm.dv", self.dvm_dv.to_string());
        put("dvm.vmax", self.dvm_vmax.map_or("auto".into(), |v| v.to_string()));
        s
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::preset(Preset::Landau1d)
    }
}

fn parse_lines(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn invalid(key: &str, value: &str, reason: String) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason,
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| invalid(key, value, e.to_string()))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}
