use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::frequency::Version;
use crate::heat::MassKind;
use crate::schwarz::{InitMode, SweepMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    RatioSweep,
    DtSweep,
    DxSweep,
    RhoCurves,
    V3RootScan,
    TpsThreeLayer,
    Custom,
    Oracle,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::RatioSweep,
        Scenario::DtSweep,
        Scenario::DxSweep,
        Scenario::RhoCurves,
        Scenario::V3RootScan,
        Scenario::TpsThreeLayer,
        Scenario::Custom,
        Scenario::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::RatioSweep => "ratio_sweep",
            Scenario::DtSweep => "dt_sweep",
            Scenario::DxSweep => "dx_sweep",
            Scenario::RhoCurves => "rho_curves",
            Scenario::V3RootScan => "v3_root_scan",
            Scenario::TpsThreeLayer => "tps_three_layer",
            Scenario::Custom => "custom",
            Scenario::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s.trim())
            .ok_or_else(|| invalid("scenario", format!("unknown scenario `{}`", s.trim())))
    }
}

/// Settings for one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub final_time: f64,
    pub dx: f64,
    pub dt: f64,
    pub dts: Vec<f64>,
    pub dxs: Vec<f64>,
    /// `nu1 / nu2` for two-layer runs, `nu1 = 1`.
    pub ratios: Vec<f64>,
    /// Layer coefficients for layered runs.
    pub nu: Vec<f64>,
    pub breakpoints: Vec<f64>,
    pub interfaces: Vec<f64>,
    pub versions: Vec<Version>,
    pub tolerance: f64,
    pub max_iter: usize,
    pub init: InitMode,
    pub sweep: SweepMode,
    pub mass: MassKind,
    pub u0: f64,
    pub g_left: f64,
    pub g_right: f64,
    pub rho_points: usize,
    pub scan_points: usize,
    pub oracle_param_points: usize,
    pub oracle_freq_points: usize,
    pub out_dir: Option<PathBuf>,
}

/// Key, default and meaning of every config entry.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("scenario", "-", "ratio_sweep | dt_sweep | dx_sweep | rho_curves | v3_root_scan | tps_three_layer | custom | oracle"),
    ("T", "5", "final time"),
    ("dx", "1/40 (1/100 for tps_three_layer)", "mesh size"),
    ("dt", "1/40", "time step"),
    ("dts", "1/20,1/40,1/80,1/160", "time steps of dt_sweep"),
    ("dxs", "1/20,1/40,1/80", "mesh sizes of dx_sweep"),
    ("ratios", "10,100,1000,10000 (10,1000 for sweeps, 10,100 for rho_curves, 10 for v3_root_scan)", "nu1/nu2 with nu1 = 1"),
    ("nu", "1,0.01,0.001 (1,0.1 for custom)", "layer coefficients of layered runs"),
    ("breakpoints", "0.2,0.4 (0.5 for custom)", "layer breakpoints"),
    ("interfaces", "0.2,0.4 (0.5 for custom)", "subdomain interfaces of layered runs"),
    ("versions", "I,II,III", "transmission versions"),
    ("tol", "1e-8", "stopping tolerance on the error"),
    ("max_iter", "1000", "iteration cap"),
    ("init", "zero", "zero | initial | exact"),
    ("sweep", "gauss_seidel", "gauss_seidel | jacobi"),
    ("mass", "consistent", "consistent | lumped"),
    ("u0", "20", "constant initial value"),
    ("g_left", "0", "Dirichlet value at x = 0"),
    ("g_right", "0 (50 for tps_three_layer)", "Dirichlet value at x = 1"),
    ("rho_points", "500", "frequencies per rho curve"),
    ("scan_points", "500", "points of the root scan"),
    ("oracle_param_points", "512", "parameter grid of the oracle"),
    ("oracle_freq_points", "128", "frequency grid of the oracle"),
    ("out_dir", "-", "output directory"),
];

impl ExperimentConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let mut cfg = Self {
            scenario,
            final_time: 5.0,
            dx: 1.0 / 40.0,
            dt: 1.0 / 40.0,
            dts: vec![1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0],
            dxs: vec![1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0],
            ratios: vec![10.0, 100.0, 1000.0, 10000.0],
            nu: vec![1.0, 1e-2, 1e-3],
            breakpoints: vec![0.2, 0.4],
            interfaces: vec![0.2, 0.4],
            versions: Version::OPTIMIZED.to_vec(),
            tolerance: 1e-8,
            max_iter: 1000,
            init: InitMode::Zero,
            sweep: SweepMode::GaussSeidel,
            mass: MassKind::Consistent,
            u0: 20.0,
            g_left: 0.0,
            g_right: 0.0,
            rho_points: 500,
            scan_points: 500,
            oracle_param_points: 512,
            oracle_freq_points: 128,
            out_dir: None,
        };
        match scenario {
            Scenario::DtSweep | Scenario::DxSweep => cfg.ratios = vec![10.0, 1000.0],
            Scenario::RhoCurves => cfg.ratios = vec![10.0, 100.0],
            Scenario::V3RootScan => cfg.ratios = vec![10.0],
            Scenario::TpsThreeLayer => {
                cfg.dx = 1.0 / 100.0;
                cfg.g_right = 50.0;
            }
            Scenario::Custom => {
                cfg.nu = vec![1.0, 0.1];
                cfg.breakpoints = vec![0.5];
                cfg.interfaces = vec![0.5];
            }
            Scenario::RatioSweep | Scenario::Oracle => {}
        }
        cfg
    }

    /// Sets one key from its text value.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "scenario" => {
                let sc: Scenario = v.parse()?;
                if sc != self.scenario {
                    return Err(invalid("scenario", format!("conflicts with `{}`", self.scenario)));
                }
            }
            "T" => self.final_time = number(key, v)?,
            "dx" => self.dx = number(key, v)?,
            "dt" => self.dt = number(key, v)?,
            "dts" => self.dts = list(key, v, |s| number(key, s))?,
            "dxs" => self.dxs = list(key, v, |s| number(key, s))?,
            "ratios" => self.ratios = list(key, v, |s| number(key, s))?,
            "nu" => self.nu = list(key, v, |s| number(key, s))?,
            "breakpoints" => self.breakpoints = list(key, v, |s| number(key, s))?,
            "interfaces" => self.interfaces = list(key, v, |s| number(key, s))?,
            "versions" => {
                self.versions = list(key, v, |s| {
                    s.parse::<Version>()
                        .ok()
                        .filter(|ver| *ver != Version::Custom)
                        .ok_or_else(|| invalid(key, format!("unknown version `{s}`")))
                })?
            }
            "tol" => self.tolerance = number(key, v)?,
            "max_iter" => self.max_iter = count(key, v)?,
            "init" => self.init = v.parse().map_err(|e: crate::Error| invalid(key, e.to_string()))?,
            "sweep" => self.sweep = v.parse().map_err(|e: crate::Error| invalid(key, e.to_string()))?,
            "mass" => {
                self.mass = match v {
                    "consistent" => MassKind::Consistent,
                    "lumped" => MassKind::Lumped,
                    other => return Err(invalid(key, format!("unknown mass kind `{other}`"))),
                }
            }
            "u0" => self.u0 = number(key, v)?,
            "g_left" => self.g_left = number(key, v)?,
            "g_right" => self.g_right = number(key, v)?,
            "rho_points" => self.rho_points = count(key, v)?,
            "scan_points" => self.scan_points = count(key, v)?,
            "oracle_param_points" => self.oracle_param_points = count(key, v)?,
            "oracle_freq_points" => self.oracle_freq_points = count(key, v)?,
            "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            other => return Err(invalid(other, "unknown key")),
        }
        Ok(())
    }

    /// Checks every field; errors name the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("T", self.final_time)?;
        positive("dx", self.dx)?;
        positive("dt", self.dt)?;
        positive("tol", self.tolerance)?;
        for (key, values) in [("dts", &self.dts), ("dxs", &self.dxs), ("ratios", &self.ratios), ("nu", &self.nu)] {
            if values.is_empty() {
                return Err(invalid(key, "list must not be empty"));
            }
            for &x in values.iter() {
                positive(key, x)?;
            }
        }
        if self.versions.is_empty() {
            return Err(invalid("versions", "list must not be empty"));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        if self.rho_points < 3 {
            return Err(invalid("rho_points", "need at least 3"));
        }
        if self.scan_points < 3 {
            return Err(invalid("scan_points", "need at least 3"));
        }
        if self.oracle_param_points < 16 {
            return Err(invalid("oracle_param_points", "need at least 16"));
        }
        if self.oracle_freq_points < 16 {
            return Err(invalid("oracle_freq_points", "need at least 16"));
        }
        for (key, x) in [("u0", self.u0), ("g_left", self.g_left), ("g_right", self.g_right)] {
            if !x.is_finite() {
                return Err(invalid(key, "must be finite"));
            }
        }
        if self.nu.len() != self.breakpoints.len() + 1 {
            return Err(invalid(
                "breakpoints",
                format!("{} layers need {} breakpoints", self.nu.len(), self.nu.len() - 1),
            ));
        }
        for (key, points) in [("breakpoints", &self.breakpoints), ("interfaces", &self.interfaces)] {
            if points.iter().any(|x| !(*x > 0.0 && *x < 1.0)) || points.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid(key, "must be strictly increasing inside (0, 1)"));
            }
        }
        if self.scenario == Scenario::V3RootScan && self.ratios.len() != 1 {
            return Err(invalid("ratios", "v3_root_scan takes a single ratio"));
        }
        let steps = |dt: f64| {
            let n = self.final_time / dt;
            (n.round() >= 1.0 && (n - n.round()).abs() <= 1e-9 * n).then_some(())
        };
        let dts: Vec<f64> = if self.scenario == Scenario::DtSweep { self.dts.clone() } else { vec![self.dt] };
        for dt in dts {
            steps(dt).ok_or_else(|| invalid(if self.scenario == Scenario::DtSweep { "dts" } else { "dt" }, format!("{dt} does not divide T")))?;
            if dt >= 2.0 * self.final_time {
                return Err(invalid("dt", "must be smaller than 2 T"));
            }
        }
        let dxs: Vec<f64> = if self.scenario == Scenario::DxSweep { self.dxs.clone() } else { vec![self.dx] };
        for dx in dxs {
            let n = 1.0 / dx;
            if n.round() < 2.0 || (n - n.round()).abs() > 1e-9 * n {
                let key = if self.scenario == Scenario::DxSweep { "dxs" } else { "dx" };
                return Err(invalid(key, format!("{dx} must divide 1 into at least 2 elements")));
            }
        }
        Ok(())
    }

    /// Output directory, required for writing files.
    pub fn require_out_dir(&self) -> Result<&Path, ConfigError> {
        self.out_dir.as_deref().ok_or_else(|| invalid("out_dir", "an output directory is required"))
    }
}

/// Parses `key=value` lines. `scenario` may be omitted when `scenario_hint`
/// is given; later keys override earlier ones.
pub fn parse_config_str(text: &str, scenario_hint: Option<Scenario>) -> Result<ExperimentConfig, ConfigError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected key=value, got `{content}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: "empty key".into(),
            });
        }
        pairs.push((line, key.to_string(), value.trim().to_string()));
    }
    let from_file = pairs
        .iter()
        .rev()
        .find(|(_, k, _)| k == "scenario")
        .map(|(line, _, v)| {
            v.parse::<Scenario>().map_err(|e| ConfigError::Parse {
                line: *line,
                message: e.to_string(),
            })
        })
        .transpose()?;
    let scenario = match (scenario_hint, from_file) {
        (Some(h), Some(f)) if h != f => {
            return Err(invalid("scenario", format!("file says `{f}` but `{h}` was requested")))
        }
        (Some(h), _) => h,
        (None, Some(f)) => f,
        (None, None) => return Err(invalid("scenario", "missing")),
    };
    let mut cfg = ExperimentConfig::defaults(scenario);
    for (line, key, value) in pairs {
        cfg.apply(&key, &value).map_err(|e| ConfigError::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path, scenario_hint: Option<Scenario>) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text, scenario_hint)
}

/// Real number, also accepting a fraction `a/b`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => s.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

fn number(key: &str, s: &str) -> Result<f64, ConfigError> {
    parse_number(s).ok_or_else(|| invalid(key, format!("`{s}` is not a number")))
}

fn count(key: &str, s: &str) -> Result<usize, ConfigError> {
    s.trim()
        .parse()
        .map_err(|_| invalid(key, format!("`{s}` is not a nonnegative integer")))
}

fn list<T>(key: &str, s: &str, item: impl Fn(&str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| item(p.trim())).collect::<Result<Vec<T>, _>>().map_err(|e| match e {
        ConfigError::Invalid { message, .. } => invalid(key, message),
        other => other,
    })
}

fn positive(key: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(key, format!("must be > 0, got {x}")))
    }
}
