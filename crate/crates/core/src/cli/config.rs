//! Run configuration as flat `key = value` text with dotted sections.
//!
//! ```text
//! # transport-diffusion at level 4
//! problem = transport-diffusion
//! td.level = 4
//! mg.omega = 0.8
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys,
//! repeated keys and malformed values are rejected with the key and line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::apps::{ElasticityConfig, NavierStokesConfig, SolverSettings, TransportDiffusionConfig};
use crate::error::{Error, Result};
use crate::linalg::BACKEND_NAMES;
use crate::mesh::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    TransportDiffusion,
    Elasticity,
    DrivenCavity,
}

impl Problem {
    pub const NAMES: [&'static str; 3] = ["transport-diffusion", "elasticity", "driven-cavity"];

    pub fn name(self) -> &'static str {
        match self {
            Problem::TransportDiffusion => "transport-diffusion",
            Problem::Elasticity => "elasticity",
            Problem::DrivenCavity => "driven-cavity",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "transport-diffusion" => Some(Problem::TransportDiffusion),
            "elasticity" => Some(Problem::Elasticity),
            "driven-cavity" => Some(Problem::DrivenCavity),
            _ => None,
        }
    }

    /// Solver defaults for this problem.
    pub fn default_solver(self) -> SolverSettings {
        match self {
            Problem::DrivenCavity => SolverSettings::navier_stokes(),
            _ => SolverSettings::default(),
        }
    }

    fn section(self) -> &'static str {
        match self {
            Problem::TransportDiffusion => "td",
            Problem::Elasticity => "elasticity",
            Problem::DrivenCavity => "ns",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub td: TransportDiffusionConfig,
    pub elasticity: ElasticityConfig,
    pub ns: NavierStokesConfig,
    pub solver: SolverSettings,
    pub out_dir: PathBuf,
    pub snapshot_stride: usize,
    pub backend: String,
}

impl RunConfig {
    pub fn new(problem: Problem) -> Self {
        Self {
            problem,
            td: TransportDiffusionConfig::default(),
            elasticity: ElasticityConfig::default(),
            ns: NavierStokesConfig::default(),
            solver: problem.default_solver(),
            out_dir: PathBuf::from("out"),
            snapshot_stride: 0,
            backend: "reference".into(),
        }
    }

    /// Checks every constraint; errors carry the offending key.
    pub fn validate(&self) -> Result<()> {
        if !BACKEND_NAMES.contains(&self.backend.as_str()) {
            return Err(config_error(
                "backend",
                0,
                format!("unknown backend `{}` (expected one of {})", self.backend, BACKEND_NAMES.join(", ")),
            ));
        }
        self.solver.mg.validate()?;
        self.solver.gmres.validate()?;
        match self.problem {
            Problem::TransportDiffusion => self.td.validate(),
            Problem::Elasticity => self.elasticity.validate(),
            Problem::DrivenCavity => self.ns.validate(),
        }
    }

    /// Switches the cavity to the full-size run. Reynolds number, step,
    /// end time and mesh are replaced; lid, limits and output settings stay.
    pub fn apply_paper_scale(&mut self) {
        let full = NavierStokesConfig::paper_scale();
        self.ns.re = full.re;
        self.ns.dt = full.dt;
        self.ns.t_end = full.t_end;
        self.ns.cells = full.cells;
    }

    /// Canonical text: every key used by the selected problem, fixed order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("problem", self.problem.name().into());
        put("backend", self.backend.clone());
        put("output.dir", self.out_dir.display().to_string());
        put("output.snapshot_stride", self.snapshot_stride.to_string());
        match self.problem {
            Problem::TransportDiffusion => {
                let c = &self.td;
                put("td.lambda", c.lambda.to_string());
                put("td.b", join(&c.b));
                put("td.dt", c.dt.to_string());
                put("td.t_end", c.t_end.to_string());
                put("td.level", c.level.to_string());
            }
            Problem::Elasticity => {
                let c = &self.elasticity;
                put("elasticity.lambda", c.lambda.to_string());
                put("elasticity.mu", c.mu.to_string());
                put("elasticity.f", join(&c.f));
                put("elasticity.dt", c.dt.to_string());
                put("elasticity.t_end", c.t_end.to_string());
                put("elasticity.pattern", pattern_name(c.pattern).into());
                put("elasticity.level", c.level.to_string());
            }
            Problem::DrivenCavity => {
                let c = &self.ns;
                put("ns.re", c.re.to_string());
                put("ns.dt", c.dt.to_string());
                put("ns.t_end", c.t_end.to_string());
                put("ns.cells", join(&c.cells));
                put("ns.lid", join(&c.lid));
                put("ns.energy_limit", c.energy_limit.to_string());
            }
        }
        let mg = &self.solver.mg;
        put("mg.nu_pre", mg.nu_pre.to_string());
        put("mg.nu_post", mg.nu_post.to_string());
        put("mg.omega", mg.omega.to_string());
        put("mg.coarse_sweeps", mg.coarse_sweeps.to_string());
        put("mg.max_cycles", mg.max_cycles.to_string());
        put("mg.rel_tol", mg.rel_tol.to_string());
        put("mg.coarse_target", mg.coarse_target.to_string());
        let g = &self.solver.gmres;
        put("gmres.max_krylov", g.max_krylov.to_string());
        put("gmres.rel_tol", g.rel_tol.to_string());
        put("gmres.abs_tol", g.abs_tol.to_string());
        s
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn pattern_name(p: Pattern) -> &'static str {
    match p {
        Pattern::Face => "face",
        Pattern::Edge => "edge",
        Pattern::Vertex => "vertex",
    }
}

fn config_error(key: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        line,
        message: message.into(),
    }
}

const KEYS: &[&str] = &[
    "problem",
    "backend",
    "output.dir",
    "output.snapshot_stride",
    "td.lambda",
    "td.b",
    "td.dt",
    "td.t_end",
    "td.level",
    "elasticity.lambda",
    "elasticity.mu",
    "elasticity.f",
    "elasticity.dt",
    "elasticity.t_end",
    "elasticity.pattern",
    "elasticity.level",
    "ns.re",
    "ns.dt",
    "ns.t_end",
    "ns.cells",
    "ns.lid",
    "ns.energy_limit",
    "mg.nu_pre",
    "mg.nu_post",
    "mg.omega",
    "mg.coarse_sweeps",
    "mg.max_cycles",
    "mg.rel_tol",
    "mg.coarse_target",
    "gmres.max_krylov",
    "gmres.rel_tol",
    "gmres.abs_tol",
];

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: usize,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        config_error(self.key, self.line, message)
    }

    fn f64(&self) -> Result<f64> {
        let v: f64 = self
            .value
            .parse()
            .map_err(|_| self.err(format!("expected a number, got `{}`", self.value)))?;
        if !v.is_finite() {
            return Err(self.err("must be finite"));
        }
        Ok(v)
    }

    fn usize(&self) -> Result<usize> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("expected a non-negative integer, got `{}`", self.value)))
    }

    fn f64s<const N: usize>(&self) -> Result<[f64; N]> {
        let parts: Vec<&str> = self.value.split(',').map(str::trim).collect();
        if parts.len() != N {
            return Err(self.err(format!("expected {N} comma-separated numbers, got `{}`", self.value)));
        }
        let mut out = [0.0; N];
        for (o, p) in out.iter_mut().zip(parts) {
            *o = p
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| self.err(format!("expected a finite number, got `{p}`")))?;
        }
        Ok(out)
    }

    fn usizes<const N: usize>(&self) -> Result<[usize; N]> {
        let parts: Vec<&str> = self.value.split(',').map(str::trim).collect();
        if parts.len() != N {
            return Err(self.err(format!("expected {N} comma-separated integers, got `{}`", self.value)));
        }
        let mut out = [0; N];
        for (o, p) in out.iter_mut().zip(parts) {
            *o = p
                .parse()
                .map_err(|_| self.err(format!("expected a non-negative integer, got `{p}`")))?;
        }
        Ok(out)
    }
}

/// Parses and validates configuration text. Keys of other problems'
/// sections are accepted and ignored.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(config_error(trimmed, line, "expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(config_error(key, line, "unknown key"));
        }
        if let Some(prev) = entries.get(key) {
            return Err(config_error(key, line, format!("repeated key (first set on line {})", prev.line)));
        }
        entries.insert(key, Entry { key, value, line });
    }

    let problem = match entries.get("problem") {
        Some(e) => Problem::from_name(e.value).ok_or_else(|| {
            e.err(format!("unknown problem `{}` (expected one of {})", e.value, Problem::NAMES.join(", ")))
        })?,
        None => return Err(config_error("problem", 0, "missing required key")),
    };
    let mut cfg = RunConfig::new(problem);
    for e in entries.values() {
        let key = e.key;
        if let Some((section, _)) = key.split_once('.') {
            if ["td", "elasticity", "ns"].contains(&section) && section != problem.section() {
                continue;
            }
        }
        match key {
            "problem" => {}
            "backend" => cfg.backend = e.value.to_string(),
            "output.dir" => cfg.out_dir = PathBuf::from(e.value),
            "output.snapshot_stride" => cfg.snapshot_stride = e.usize()?,
            "td.lambda" => cfg.td.lambda = e.f64()?,
            "td.b" => cfg.td.b = e.f64s()?,
            "td.dt" => cfg.td.dt = e.f64()?,
            "td.t_end" => cfg.td.t_end = e.f64()?,
            "td.level" => cfg.td.level = e.usize()?,
            "elasticity.lambda" => cfg.elasticity.lambda = e.f64()?,
            "elasticity.mu" => cfg.elasticity.mu = e.f64()?,
            "elasticity.f" => cfg.elasticity.f = e.f64s()?,
            "elasticity.dt" => cfg.elasticity.dt = e.f64()?,
            "elasticity.t_end" => cfg.elasticity.t_end = e.f64()?,
            "elasticity.pattern" => {
                cfg.elasticity.pattern = match e.value {
                    "face" => Pattern::Face,
                    "edge" => Pattern::Edge,
                    "vertex" => Pattern::Vertex,
                    other => return Err(e.err(format!("unknown pattern `{other}` (expected face, edge or vertex)"))),
                }
            }
            "elasticity.level" => cfg.elasticity.level = e.usize()?,
            "ns.re" => cfg.ns.re = e.f64()?,
            "ns.dt" => cfg.ns.dt = e.f64()?,
            "ns.t_end" => cfg.ns.t_end = e.f64()?,
            "ns.cells" => cfg.ns.cells = e.usizes()?,
            "ns.lid" => cfg.ns.lid = e.f64s()?,
            "ns.energy_limit" => cfg.ns.energy_limit = e.f64()?,
            "mg.nu_pre" => cfg.solver.mg.nu_pre = e.usize()?,
            "mg.nu_post" => cfg.solver.mg.nu_post = e.usize()?,
            "mg.omega" => cfg.solver.mg.omega = e.f64()?,
            "mg.coarse_sweeps" => cfg.solver.mg.coarse_sweeps = e.usize()?,
            "mg.max_cycles" => cfg.solver.mg.max_cycles = e.usize()?,
            "mg.rel_tol" => cfg.solver.mg.rel_tol = e.f64()?,
            "mg.coarse_target" => cfg.solver.mg.coarse_target = e.usize()?,
            "gmres.max_krylov" => cfg.solver.gmres.max_krylov = e.usize()?,
            "gmres.rel_tol" => cfg.solver.gmres.rel_tol = e.f64()?,
            "gmres.abs_tol" => cfg.solver.gmres.abs_tol = e.f64()?,
            _ => unreachable!("key list and match arms out of sync: {key}"),
        }
    }
    // Validation errors name the key; attach the line it was set on.
    cfg.validate().map_err(|err| match err {
        Error::Config { key, line: 0, message } => {
            let line = entries.get(key.as_str()).map_or(0, |e| e.line);
            Error::Config { key, line, message }
        }
        other => other,
    })?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
