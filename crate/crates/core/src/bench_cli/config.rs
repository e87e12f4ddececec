//! INI scenario files.
//!
//! ```ini
//! [scenario]
//! model = wave1d_sl      # or a family name plus `representation = sd|sl`
//! n = 64                 # cells per direction
//! t_final = 1.0
//! dt = 1e-3
//! [material]
//! rho = 1.0
//! [bc]
//! kind = forced
//! [output]
//! path = out.csv
//! ```

use std::fmt;
use std::path::PathBuf;

use ini::Ini;

use super::scenario::MODELS;
use crate::phcore::Representation;
use crate::wave1d::MassMode;

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigIssue {
    UnknownModel { model: String, valid: Vec<&'static str> },
    MissingKey(String),
    TypeError { key: String, message: String },
    UnknownKey(String),
    Syntax(String),
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownModel { model, valid } => write!(f, "unknown model {model:?}; valid models: {}", valid.join(", ")),
            Self::MissingKey(k) => write!(f, "missing key {k}"),
            Self::TypeError { key, message } => write!(f, "{key}: {message}"),
            Self::UnknownKey(k) => write!(f, "unknown key {k}"),
            Self::Syntax(m) => write!(f, "syntax error: {m}"),
        }
    }
}

/// Every problem found in a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundaryKind {
    #[default]
    Closed,
    /// Every input column driven by `amplitude sin(2π f t + c)`, `c` the column index.
    Forced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PlateEdge {
    #[default]
    Clamped,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConfig {
    pub kind: BoundaryKind,
    pub plate: PlateEdge,
    pub amplitude: f64,
    pub frequency: f64,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self { kind: BoundaryKind::Closed, plate: PlateEdge::Clamped, amplitude: 1.0, frequency: 1.0 }
    }
}

/// Material keys; unset keys fall back to each model's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaterialConfig {
    pub rho: Option<f64>,
    pub e: Option<f64>,
    pub mu: Option<f64>,
    pub eps0: Option<f64>,
    pub mu0: Option<f64>,
    pub sigma: Option<f64>,
    pub thickness: Option<f64>,
    pub young: Option<f64>,
    pub poisson: Option<f64>,
    pub shear_correction: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub k: Option<f64>,
    pub gamma: Option<f64>,
    pub q: Option<f64>,
}

const MATERIAL_KEYS: [&str; 15] =
    ["rho", "e", "mu", "eps0", "mu0", "sigma", "thickness", "young", "poisson", "shear_correction", "a", "b", "k", "gamma", "q"];

impl MaterialConfig {
    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "rho" => &mut self.rho,
            "e" => &mut self.e,
            "mu" => &mut self.mu,
            "eps0" => &mut self.eps0,
            "mu0" => &mut self.mu0,
            "sigma" => &mut self.sigma,
            "thickness" => &mut self.thickness,
            "young" => &mut self.young,
            "poisson" => &mut self.poisson,
            "shear_correction" => &mut self.shear_correction,
            "a" => &mut self.a,
            "b" => &mut self.b,
            "k" => &mut self.k,
            "gamma" => &mut self.gamma,
            "q" => &mut self.q,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    /// Registered model name, e.g. `wave1d_sl`.
    pub model: String,
    pub representation: Option<Representation>,
    /// Cells per direction.
    pub n: usize,
    /// Cells in `y` for 2D models; defaults to `n`.
    pub ny: Option<usize>,
    pub length: f64,
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
    pub mass: MassMode,
    pub material: MaterialConfig,
    pub bc: BoundaryConfig,
    pub output: Option<PathBuf>,
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn type_error(&mut self, key: &str, message: impl Into<String>) {
        self.0.push(ConfigIssue::TypeError { key: key.into(), message: message.into() });
    }

    fn real(&mut self, key: &str, raw: &str) -> Option<f64> {
        match raw.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.type_error(key, format!("expected a number, got {raw:?}"));
                None
            }
        }
    }

    fn count(&mut self, key: &str, raw: &str) -> Option<usize> {
        match raw.trim().parse::<usize>() {
            Ok(v) if v > 0 => Some(v),
            _ => {
                self.type_error(key, format!("{key} must be a positive integer, got {raw:?}"));
                None
            }
        }
    }

    fn positive(&mut self, key: &str, raw: &str) -> Option<f64> {
        let v = self.real(key, raw)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.type_error(key, format!("{key} must be > 0"));
            None
        }
    }
}

fn split_model(name: &str) -> (&str, Option<Representation>) {
    match name.rsplit_once('_') {
        Some((family, "sd")) => (family, Some(Representation::StokesDirac)),
        Some((family, "sl")) => (family, Some(Representation::StokesLagrange)),
        _ => (name, None),
    }
}

fn parse_representation(raw: &str) -> Option<Representation> {
    match raw.trim() {
        "sd" | "stokes_dirac" => Some(Representation::StokesDirac),
        "sl" | "stokes_lagrange" => Some(Representation::StokesLagrange),
        _ => None,
    }
}

fn suffix(r: Representation) -> &'static str {
    match r {
        Representation::StokesDirac => "sd",
        Representation::StokesLagrange => "sl",
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let stripped: String = text.lines().map(|l| l.split(['#', ';']).next().unwrap_or("")).collect::<Vec<_>>().join("\n");
    let ini = Ini::load_from_str(&stripped).map_err(|e| ConfigError(vec![ConfigIssue::Syntax(e.to_string())]))?;
    let mut is = Issues(Vec::new());
    let mut cfg = ScenarioConfig {
        model: String::new(),
        representation: None,
        n: 0,
        ny: None,
        length: 1.0,
        t_final: 0.0,
        dt: 0.0,
        record_every: 1,
        mass: MassMode::Lumped,
        material: MaterialConfig::default(),
        bc: BoundaryConfig::default(),
        output: None,
    };
    let (mut model, mut repr, mut n, mut t_final, mut dt) = (None, None, None, None, None);

    for (section, props) in ini.iter() {
        let section = section.unwrap_or("");
        for (key, raw) in props.iter() {
            let full = format!("{section}.{key}");
            match (section, key) {
                ("scenario", "model") => model = Some(raw.trim().to_string()),
                ("scenario", "representation") => match parse_representation(raw) {
                    Some(r) => repr = Some(r),
                    None => is.type_error(&full, format!("expected sd or sl, got {raw:?}")),
                },
                ("scenario", "n") => n = is.count(&full, raw),
                ("scenario", "ny") => cfg.ny = is.count(&full, raw),
                ("scenario", "length") => cfg.length = is.positive(&full, raw).unwrap_or(cfg.length),
                ("scenario", "t_final") => match is.real(&full, raw) {
                    Some(v) if v >= 0.0 => t_final = Some(v),
                    Some(_) => is.type_error(&full, "t_final must be ≥ 0"),
                    None => {}
                },
                ("scenario", "dt") => match is.real(&full, raw) {
                    Some(v) if v > 0.0 => dt = Some(v),
                    Some(_) => is.type_error("dt", "dt must be > 0"),
                    None => {}
                },
                ("scenario", "record_every") => cfg.record_every = is.count(&full, raw).unwrap_or(1),
                ("scenario", "mass") => match raw.trim() {
                    "lumped" => cfg.mass = MassMode::Lumped,
                    "consistent" => cfg.mass = MassMode::Consistent,
                    other => is.type_error(&full, format!("expected lumped or consistent, got {other:?}")),
                },
                ("material", k) if MATERIAL_KEYS.contains(&k) => {
                    let v = is.real(&full, raw);
                    *cfg.material.slot(k).expect("listed key") = v;
                }
                ("bc", "kind") => match raw.trim() {
                    "closed" => cfg.bc.kind = BoundaryKind::Closed,
                    "forced" => cfg.bc.kind = BoundaryKind::Forced,
                    other => is.type_error(&full, format!("expected closed or forced, got {other:?}")),
                },
                ("bc", "plate") => match raw.trim() {
                    "clamped" => cfg.bc.plate = PlateEdge::Clamped,
                    "free" => cfg.bc.plate = PlateEdge::Free,
                    other => is.type_error(&full, format!("expected clamped or free, got {other:?}")),
                },
                ("bc", "amplitude") => cfg.bc.amplitude = is.real(&full, raw).unwrap_or(cfg.bc.amplitude),
                ("bc", "frequency") => cfg.bc.frequency = is.real(&full, raw).unwrap_or(cfg.bc.frequency),
                ("output", "path") => cfg.output = Some(PathBuf::from(raw.trim())),
                _ => is.0.push(ConfigIssue::UnknownKey(if section.is_empty() { key.to_string() } else { full })),
            }
        }
    }

    for (v, key) in [(model.is_none(), "scenario.model"), (n.is_none(), "scenario.n"), (t_final.is_none(), "scenario.t_final")] {
        if v && !is.0.iter().any(|i| matches!(i, ConfigIssue::TypeError { key: k, .. } if k == key)) {
            is.0.push(ConfigIssue::MissingKey(key.into()));
        }
    }
    if dt.is_none() && !is.0.iter().any(|i| matches!(i, ConfigIssue::TypeError { key, .. } if key == "dt")) {
        is.0.push(ConfigIssue::MissingKey("scenario.dt".into()));
    }

    if let Some(m) = model {
        let (family, own) = split_model(&m);
        let name = match (own, repr) {
            (Some(a), Some(b)) if a != b => {
                is.type_error("scenario.representation", format!("{m} is already {}", suffix(a)));
                m.clone()
            }
            (None, Some(r)) => format!("{family}_{}", suffix(r)),
            _ => m.clone(),
        };
        if MODELS.contains(&name.as_str()) {
            cfg.representation = split_model(&name).1;
            cfg.model = name;
        } else {
            is.0.push(ConfigIssue::UnknownModel { model: name, valid: MODELS.to_vec() });
        }
    }
    if !is.0.is_empty() {
        return Err(ConfigError(is.0));
    }
    cfg.n = n.expect("checked");
    cfg.t_final = t_final.expect("checked");
    cfg.dt = dt.expect("checked");
    Ok(cfg)
}
