//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("duplicate key `{key}` on lines {first} and {second}")]
    Duplicate { key: String, first: usize, second: usize },
    #[error("invalid value for `{key}`{}: {reason}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Invalid { key: String, line: Option<usize>, reason: String },
    #[error("`{key}` is required for {kind} runs")]
    Missing { key: &'static str, kind: Kind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Euler,
    Nbody,
    Sweep,
    QuantizeCheck,
    Coercivity,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Euler, Kind::Nbody, Kind::Sweep, Kind::QuantizeCheck, Kind::Coercivity];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Euler => "euler",
            Kind::Nbody => "nbody",
            Kind::Sweep => "sweep",
            Kind::QuantizeCheck => "quantize-check",
            Kind::Coercivity => "coercivity",
        }
    }

    /// Kinds that draw random samples.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Kind::Nbody | Kind::Sweep | Kind::Coercivity)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("expected one of euler, nbody, sweep, quantize-check, coercivity; got `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    Bump,
    Gaussian,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    Zero,
    Velocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Diagonal,
    Grid,
}

/// Key, default, description. Printed by `--help`.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("kind", "(command line)", "experiment kind; must match the command if given"),
    ("seed", "(none)", "master seed; required for nbody, sweep, coercivity"),
    ("out", "runs", "output root (overridden by GYROLIM_OUT, then --out)"),
    ("L", "2", "half-width of the square grid [-L, L]^2"),
    ("cells", "256", "grid cells per axis (even, >= 16)"),
    ("density", "bump", "initial vorticity: bump | gaussian | disk"),
    ("radius", "1", "support radius of the initial vorticity"),
    ("variance", "0.1", "variance of the gaussian profile"),
    ("N", "64", "particle count (nbody)"),
    ("eps", "0.1", "magnetic scale epsilon (nbody)"),
    ("hbar", "(from hbar_power)", "semiclassical parameter; overrides the scaling rule"),
    ("hbar_power", "2", "scaling rule hbar = eps^k"),
    ("dt", "0.01", "particle time step"),
    ("T", "0.5", "final time"),
    ("stride", "5", "observer stride in particle steps"),
    ("euler_dt", "0.05", "vortex-blob time step"),
    ("blobs", "4096", "vortex-blob count"),
    ("confinement", "false", "add (eps/2N) sum |x_i|^2 to E1"),
    ("magnetic", "true", "include the magnetic field (false: plain Coulomb dynamics)"),
    ("orientation", "euler (sweep), printed (other)", "gyration sense: printed | euler"),
    ("scheme", "strang", "particle integrator: strang | rk4"),
    ("guard", "1e-8", "minimum pair separation before a run aborts"),
    ("sampling", "iid", "initial positions: iid | stratified"),
    ("replicates", "1", "independent ensembles per sweep cell"),
    ("sweep_N", "1024,4096,16384", "sweep particle counts"),
    ("sweep_eps", "0.2,0.1,0.05", "sweep epsilons"),
    ("sweep_mode", "diagonal", "diagonal (pairwise) | grid (all pairs)"),
    ("cell_budget", "1800", "wall-clock seconds allowed per sweep cell"),
    ("M", "24", "Hermite truncation degree per axis"),
    ("quantize_eps", "0.2,0.1,0.05", "epsilons of the quantization check"),
    ("quantize_N", "ceil(eps^-3)", "particle count entering I"),
    ("symbol_L", "3", "half-width of the symbol grid"),
    ("symbol_cells", "256", "cells per axis of the symbol grid"),
    ("theta", "velocity", "momentum sheet of the symbol: zero | velocity (u = K * omega)"),
    ("coercivity_N", "64,256,1024", "particle counts of the coercivity sweep"),
    ("coercivity_seeds", "20", "samples per particle count"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: Option<Kind>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub half_width: f64,
    pub cells: usize,
    pub density: DensityKind,
    pub radius: f64,
    pub variance: f64,
    pub n: usize,
    pub eps: f64,
    pub hbar: Option<f64>,
    pub hbar_power: f64,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub euler_dt: f64,
    pub blobs: usize,
    pub confinement: bool,
    pub magnetic: bool,
    pub orientation: Option<gyrolim_core::nbody::Orientation>,
    pub scheme: gyrolim_core::nbody::Scheme,
    pub guard: f64,
    pub sampling: gyrolim_core::nbody::SamplingScheme,
    pub replicates: usize,
    pub sweep_n: Vec<usize>,
    pub sweep_eps: Vec<f64>,
    pub sweep_mode: SweepMode,
    pub cell_budget: f64,
    pub max_degree: usize,
    pub quantize_eps: Vec<f64>,
    pub quantize_n: Option<usize>,
    pub symbol_half_width: f64,
    pub symbol_cells: usize,
    pub theta: ThetaKind,
    pub coercivity_n: Vec<usize>,
    pub coercivity_seeds: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        use gyrolim_core::nbody::{SamplingScheme, Scheme};
        RunConfig {
            kind: None,
            seed: None,
            out: None,
            half_width: 2.0,
            cells: 256,
            density: DensityKind::Bump,
            radius: 1.0,
            variance: 0.1,
            n: 64,
            eps: 0.1,
            hbar: None,
            hbar_power: 2.0,
            dt: 0.01,
            t_final: 0.5,
            stride: 5,
            euler_dt: 0.05,
            blobs: 4096,
            confinement: false,
            magnetic: true,
            orientation: None,
            scheme: Scheme::StrangExactRotation,
            guard: 1e-8,
            sampling: SamplingScheme::Iid,
            replicates: 1,
            sweep_n: vec![1024, 4096, 16384],
            sweep_eps: vec![0.2, 0.1, 0.05],
            sweep_mode: SweepMode::Diagonal,
            cell_budget: 1800.0,
            max_degree: 24,
            quantize_eps: vec![0.2, 0.1, 0.05],
            quantize_n: None,
            symbol_half_width: 3.0,
            symbol_cells: 256,
            theta: ThetaKind::Velocity,
            coercivity_n: vec![64, 256, 1024],
            coercivity_seeds: 20,
        }
    }
}

/// Help text listing every key with its default.
pub fn keys_help() -> String {
    let mut s = String::from("Config keys (key = value, `#` starts a comment):\n");
    for (k, d, doc) in KEYS {
        s.push_str(&format!("  {k:<18} {doc} [default: {d}]\n"));
    }
    s
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut seen: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: raw.trim().to_string() });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax { line, text: raw.trim().to_string() });
        }
        if !KEYS.iter().any(|(name, _, _)| *name == k) {
            return Err(ConfigError::UnknownKey { key: k.to_string(), line });
        }
        if let Some((_, first)) = seen.get(k) {
            return Err(ConfigError::Duplicate { key: k.to_string(), first: *first, second: line });
        }
        seen.insert(k.to_string(), (v.to_string(), line));
    }
    let mut cfg = RunConfig::default();
    for (key, (value, line)) in &seen {
        cfg.set(key, value).map_err(|reason| ConfigError::Invalid {
            key: key.clone(),
            line: Some(*line),
            reason,
        })?;
    }
    cfg.check_ranges()?;
    Ok(cfg)
}

fn positive(v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

fn num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}`"))
}

fn pos_f64(v: &str) -> Result<f64, String> {
    positive(num(v)?)
}

fn pos_usize(v: &str) -> Result<usize, String> {
    match num::<usize>(v)? {
        0 => Err("must be at least 1".into()),
        n => Ok(n),
    }
}

fn boolean(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn list<T>(v: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let out: Vec<T> = v.split(',').map(|s| item(s.trim())).collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("list is empty".into());
    }
    Ok(out)
}

impl RunConfig {
    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        use gyrolim_core::nbody::{Orientation, SamplingScheme, Scheme};
        match key {
            "kind" => self.kind = Some(v.parse()?),
            "seed" => self.seed = Some(num(v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "L" => self.half_width = pos_f64(v)?,
            "cells" => self.cells = pos_usize(v)?,
            "density" => {
                self.density = match v {
                    "bump" => DensityKind::Bump,
                    "gaussian" => DensityKind::Gaussian,
                    "disk" => DensityKind::Disk,
                    _ => return Err(format!("expected bump, gaussian or disk, got `{v}`")),
                }
            }
            "radius" => self.radius = pos_f64(v)?,
            "variance" => self.variance = pos_f64(v)?,
            "N" => self.n = pos_usize(v)?,
            "eps" => self.eps = pos_f64(v)?,
            "hbar" => self.hbar = Some(pos_f64(v)?),
            "hbar_power" => self.hbar_power = pos_f64(v)?,
            "dt" => self.dt = pos_f64(v)?,
            "T" => self.t_final = pos_f64(v)?,
            "stride" => self.stride = pos_usize(v)?,
            "euler_dt" => self.euler_dt = pos_f64(v)?,
            "blobs" => self.blobs = pos_usize(v)?,
            "confinement" => self.confinement = boolean(v)?,
            "magnetic" => self.magnetic = boolean(v)?,
            "orientation" => {
                self.orientation = Some(match v {
                    "printed" => Orientation::Printed,
                    "euler" => Orientation::Euler,
                    _ => return Err(format!("expected printed or euler, got `{v}`")),
                })
            }
            "scheme" => {
                self.scheme = match v {
                    "strang" => Scheme::StrangExactRotation,
                    "rk4" => Scheme::Rk4Reference,
                    _ => return Err(format!("expected strang or rk4, got `{v}`")),
                }
            }
            "guard" => self.guard = pos_f64(v)?,
            "sampling" => {
                self.sampling = match v {
                    "iid" => SamplingScheme::Iid,
                    "stratified" => SamplingScheme::Stratified,
                    _ => return Err(format!("expected iid or stratified, got `{v}`")),
                }
            }
            "replicates" => self.replicates = pos_usize(v)?,
            "sweep_N" => self.sweep_n = list(v, pos_usize)?,
            "sweep_eps" => self.sweep_eps = list(v, pos_f64)?,
            "sweep_mode" => {
                self.sweep_mode = match v {
                    "diagonal" => SweepMode::Diagonal,
                    "grid" => SweepMode::Grid,
                    _ => return Err(format!("expected diagonal or grid, got `{v}`")),
                }
            }
            "cell_budget" => self.cell_budget = pos_f64(v)?,
            "M" => self.max_degree = pos_usize(v)?,
            "quantize_eps" => self.quantize_eps = list(v, pos_f64)?,
            "quantize_N" => self.quantize_n = Some(pos_usize(v)?),
            "symbol_L" => self.symbol_half_width = pos_f64(v)?,
            "symbol_cells" => self.symbol_cells = pos_usize(v)?,
            "theta" => {
                self.theta = match v {
                    "zero" => ThetaKind::Zero,
                    "velocity" => ThetaKind::Velocity,
                    _ => return Err(format!("expected zero or velocity, got `{v}`")),
                }
            }
            "coercivity_N" => self.coercivity_n = list(v, pos_usize)?,
            "coercivity_seeds" => self.coercivity_seeds = pos_usize(v)?,
            _ => unreachable!("key table and setter disagree on `{key}`"),
        }
        Ok(())
    }

    fn check_ranges(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, reason: String| ConfigError::Invalid { key: key.into(), line: None, reason };
        if self.cells < 16 || self.cells % 2 != 0 {
            return Err(bad("cells", format!("need an even count >= 16, got {}", self.cells)));
        }
        if self.symbol_cells < 16 || self.symbol_cells % 2 != 0 {
            return Err(bad("symbol_cells", format!("need an even count >= 16, got {}", self.symbol_cells)));
        }
        if self.max_degree < gyrolim_core::quantize::MIN_DEGREE {
            return Err(bad("M", format!("need at least {}", gyrolim_core::quantize::MIN_DEGREE)));
        }
        if self.sweep_mode == SweepMode::Diagonal && self.sweep_n.len() != self.sweep_eps.len() {
            return Err(bad(
                "sweep_eps",
                format!("diagonal sweep needs as many eps as N ({} vs {})", self.sweep_eps.len(), self.sweep_n.len()),
            ));
        }
        Ok(())
    }

    /// Checks the config against the command-line kind and fills in
    /// command-line overrides.
    pub fn resolve(mut self, kind: Kind, seed: Option<u64>) -> Result<RunConfig, ConfigError> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(ConfigError::Invalid {
                    key: "kind".into(),
                    line: None,
                    reason: format!("config says {k} but the command is {kind}"),
                });
            }
        }
        self.kind = Some(kind);
        if seed.is_some() {
            self.seed = seed;
        }
        if kind.is_stochastic() && self.seed.is_none() {
            return Err(ConfigError::Missing { key: "seed", kind });
        }
        Ok(self)
    }

    pub fn hbar_for(&self, eps: f64) -> f64 {
        self.hbar.unwrap_or_else(|| eps.powf(self.hbar_power))
    }

    pub fn orientation_or_default(&self) -> gyrolim_core::nbody::Orientation {
        use gyrolim_core::nbody::Orientation;
        self.orientation.unwrap_or(match self.kind {
            Some(Kind::Sweep) => Orientation::Euler,
            _ => Orientation::Printed,
        })
    }

    /// Every key with its resolved value, for the manifest.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        use gyrolim_core::nbody::{Orientation, SamplingScheme, Scheme};
        let join = |v: &[String]| v.join(",");
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("kind", self.kind.map(|k| k.name().to_string()).unwrap_or_default());
        put("seed", self.seed.map(|s| s.to_string()).unwrap_or_default());
        put("L", self.half_width.to_string());
        put("cells", self.cells.to_string());
        put(
            "density",
            match self.density {
                DensityKind::Bump => "bump",
                DensityKind::Gaussian => "gaussian",
                DensityKind::Disk => "disk",
            }
            .into(),
        );
        put("radius", self.radius.to_string());
        put("variance", self.variance.to_string());
        put("N", self.n.to_string());
        put("eps", self.eps.to_string());
        put("hbar", self.hbar.map(|h| h.to_string()).unwrap_or_default());
        put("hbar_power", self.hbar_power.to_string());
        put("dt", self.dt.to_string());
        put("T", self.t_final.to_string());
        put("stride", self.stride.to_string());
        put("euler_dt", self.euler_dt.to_string());
        put("blobs", self.blobs.to_string());
        put("confinement", self.confinement.to_string());
        put("magnetic", self.magnetic.to_string());
        put(
            "orientation",
            match self.orientation_or_default() {
                Orientation::Printed => "printed",
                Orientation::Euler => "euler",
            }
            .into(),
        );
        put(
            "scheme",
            match self.scheme {
                Scheme::StrangExactRotation => "strang",
                Scheme::Rk4Reference => "rk4",
            }
            .into(),
        );
        put("guard", self.guard.to_string());
        put(
            "sampling",
            match self.sampling {
                SamplingScheme::Iid => "iid",
                SamplingScheme::Stratified => "stratified",
            }
            .into(),
        );
        put("replicates", self.replicates.to_string());
        put("sweep_N", join(&self.sweep_n.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
        put("sweep_eps", join(&self.sweep_eps.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
        put(
            "sweep_mode",
            match self.sweep_mode {
                SweepMode::Diagonal => "diagonal",
                SweepMode::Grid => "grid",
            }
            .into(),
        );
        put("cell_budget", self.cell_budget.to_string());
        put("M", self.max_degree.to_string());
        put("quantize_eps", join(&self.quantize_eps.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
        put("quantize_N", self.quantize_n.map(|n| n.to_string()).unwrap_or_default());
        put("symbol_L", self.symbol_half_width.to_string());
        put("symbol_cells", self.symbol_cells.to_string());
        put(
            "theta",
            match self.theta {
                ThetaKind::Zero => "zero",
                ThetaKind::Velocity => "velocity",
            }
            .into(),
        );
        put("coercivity_N", join(&self.coercivity_n.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
        put("coercivity_seeds", self.coercivity_seeds.to_string());
        m
    }
}
