//! Scenario files: `key = value` lines under `[model]`, `[run]`, `[verify]`
//! and `[output]` headers. `#` starts a comment.
//!
//! ```text
//! [model]
//! name = damped_wave
//! kappa = 0.1
//! n = 32
//!
//! [run]
//! dt = 1e-3
//! t_final = 2
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use contactflow::{BoundaryCondition, Corruption, ModelKind, Potential};

use crate::error::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Exact,
}

impl Integrator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Rk4 => "rk4",
            Self::Exact => "exact",
        }
    }
}

/// Model name and parameters. Unused parameters keep their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub kappa: f64,
    pub n: usize,
    pub length: f64,
    pub bc: BoundaryCondition,
    pub potential: Potential,
    pub source: String,
    pub level: f64,
    /// Test hook: replace part of the structure by a degenerate one.
    pub corrupt: Option<Corruption>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSection {
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySection {
    pub sample_count: usize,
    pub seed: u64,
    /// Relative singular-value threshold; `None` uses the default for the dimension.
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub thin_every: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    pub run: RunSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

const SECTIONS: [&str; 4] = ["model", "run", "verify", "output"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "model" => &["name", "kappa", "n", "length", "bc", "potential", "source", "level", "corrupt"],
        "run" => &["dt", "t_final", "integrator"],
        "verify" => &["sample_count", "seed", "tolerance"],
        "output" => &["path", "thin_every"],
        _ => &[],
    }
}

/// Keys each model must set in `[model]` besides `name`.
pub fn required_keys(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::DampedOscillator => &["kappa"],
        ModelKind::OneformField => &["kappa", "n"],
        ModelKind::DampedWave => &["kappa", "n"],
        ModelKind::WaveWithSource => &["n", "source", "potential"],
        ModelKind::DampedWaveSource => &["kappa", "n", "source"],
        ModelKind::SphereOfOneforms => &["n"],
    }
}

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
}

type Sections = BTreeMap<&'static str, BTreeMap<String, Entry>>;

fn tokenize(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::parse(line, "unterminated section header"))?;
            let name = name.trim();
            let known = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| ConfigError::parse(line, format!("unknown section [{name}]")))?;
            if sections.contains_key(known) {
                return Err(ConfigError::parse(line, format!("section [{name}] appears twice")));
            }
            sections.insert(known, BTreeMap::new());
            current = Some(known);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::parse(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::parse(line, "empty key or value"));
        }
        let section = current.ok_or_else(|| ConfigError::parse(line, "key outside of a section"))?;
        if !allowed_keys(section).contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                section: section.into(),
                key: key.into(),
            });
        }
        let table = sections.get_mut(section).expect("section inserted above");
        if table.contains_key(key) {
            return Err(ConfigError::parse(line, format!("duplicate key `{key}`")));
        }
        table.insert(
            key.into(),
            Entry {
                value: value.into(),
                line,
            },
        );
    }
    Ok(sections)
}

struct Reader<'a> {
    section: &'static str,
    table: Option<&'a BTreeMap<String, Entry>>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.table.and_then(|t| t.get(key))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::parse(e.line, format!("invalid value `{}` for `{key}`", e.value))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.get(key)?.ok_or_else(|| ConfigError::MissingKey {
            section: self.section.into(),
            key: key.into(),
        })
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let sections = tokenize(text)?;
    let reader = |section: &'static str| Reader {
        section,
        table: sections.get(section),
    };

    let m = reader("model");
    let name: String = m.required("name")?;
    let kind = ModelKind::from_str(&name).map_err(|_| ConfigError::UnknownModel(name.clone()))?;
    for key in required_keys(kind) {
        if m.raw(key).is_none() {
            return Err(ConfigError::MissingKey {
                section: "model".into(),
                key: (*key).into(),
            });
        }
    }
    let defaults = ModelSection::defaults(kind);
    let bc = match m.raw("bc") {
        None => defaults.bc,
        Some(e) => e.value.parse().map_err(|_| ConfigError::parse(e.line, format!("unknown boundary condition `{}`", e.value)))?,
    };
    let potential = match m.raw("potential") {
        None => defaults.potential,
        Some(e) => e.value.parse().map_err(|_| ConfigError::parse(e.line, format!("unknown potential `{}`", e.value)))?,
    };
    let corrupt = match m.raw("corrupt") {
        None => None,
        Some(e) => Some(e.value.parse().map_err(|_| ConfigError::parse(e.line, format!("unknown corruption `{}`", e.value)))?),
    };
    let model = ModelSection {
        kind,
        kappa: m.or("kappa", defaults.kappa)?,
        n: m.or("n", defaults.n)?,
        length: m.or("length", defaults.length)?,
        bc,
        potential,
        source: m.or("source", defaults.source)?,
        level: m.or("level", defaults.level)?,
        corrupt,
    };

    let r = reader("run");
    let integrator = match r.raw("integrator").map(|e| (e.value.as_str(), e.line)) {
        None | Some(("rk4", _)) => Integrator::Rk4,
        Some(("exact", _)) => Integrator::Exact,
        Some((other, line)) => return Err(ConfigError::parse(line, format!("unknown integrator `{other}`"))),
    };
    let run = RunSection {
        dt: r.or("dt", 1e-3)?,
        t_final: r.or("t_final", 1.0)?,
        integrator,
    };

    let v = reader("verify");
    let verify = VerifySection {
        sample_count: v.or("sample_count", 100)?,
        seed: v.or("seed", 0)?,
        tolerance: v.get("tolerance")?,
    };

    let o = reader("output");
    let output = OutputSection {
        path: o.get::<String>("path")?.map(PathBuf::from),
        thin_every: o.or("thin_every", 1)?,
    };

    let cfg = ScenarioConfig {
        model,
        run,
        verify,
        output,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl ModelSection {
    pub fn defaults(kind: ModelKind) -> Self {
        Self {
            kind,
            kappa: 0.0,
            n: 1,
            length: 2.0 * std::f64::consts::PI,
            bc: BoundaryCondition::Periodic,
            potential: Potential::Simple,
            source: "none".into(),
            level: 1.0,
            corrupt: None,
        }
    }
}

fn invalid(msg: String) -> Result<(), ConfigError> {
    Err(ConfigError::Validation(msg))
}

impl ScenarioConfig {
    /// Range checks that do not need the model to be built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        if !(m.kappa.is_finite() && m.kappa >= 0.0) {
            return invalid(format!("kappa must be >= 0, got {}", m.kappa));
        }
        if !(m.length.is_finite() && m.length > 0.0) {
            return invalid(format!("length must be > 0, got {}", m.length));
        }
        if !(m.level.is_finite() && m.level > 0.0) {
            return invalid(format!("level must be > 0, got {}", m.level));
        }
        let min_n = match m.kind {
            ModelKind::DampedWave | ModelKind::WaveWithSource | ModelKind::DampedWaveSource => 4,
            _ => 1,
        };
        if m.n < min_n {
            return invalid(format!("{} needs n >= {min_n}, got {}", m.kind, m.n));
        }
        if !["none", "sine"].contains(&m.source.as_str()) {
            return invalid(format!("unknown source `{}` (none, sine)", m.source));
        }
        let r = &self.run;
        if !(r.dt.is_finite() && r.dt > 0.0) {
            return invalid(format!("dt must be > 0, got {}", r.dt));
        }
        if !(r.t_final.is_finite() && r.t_final >= r.dt) {
            return invalid(format!("t_final must be >= dt, got {}", r.t_final));
        }
        if r.integrator == Integrator::Exact && !m.kind.is_linear() {
            return invalid(format!("integrator `exact` needs a linear model, {} is not", m.kind));
        }
        if self.verify.sample_count == 0 {
            return invalid("sample_count must be >= 1".into());
        }
        if let Some(t) = self.verify.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return invalid(format!("tolerance must be > 0, got {t}"));
            }
        }
        if self.output.thin_every == 0 {
            return invalid("thin_every must be >= 1".into());
        }
        Ok(())
    }

    /// Serialise back to the file format; `parse_config` of the result is `self`.
    pub fn to_config_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.model;
        let mut s = String::new();
        let _ = writeln!(s, "[model]\nname = {}", m.kind);
        let required = required_keys(m.kind);
        let uses = |key: &str| required.contains(&key);
        if uses("kappa") {
            let _ = writeln!(s, "kappa = {:?}", m.kappa);
        }
        if uses("n") {
            let _ = writeln!(s, "n = {}", m.n);
        }
        if matches!(m.kind, ModelKind::DampedWave | ModelKind::WaveWithSource | ModelKind::DampedWaveSource) {
            let _ = writeln!(s, "length = {:?}\nbc = {}", m.length, m.bc);
        }
        if uses("potential") {
            let _ = writeln!(s, "potential = {}", m.potential.as_str());
        }
        if uses("source") {
            let _ = writeln!(s, "source = {}", m.source);
        }
        if m.kind == ModelKind::SphereOfOneforms {
            let _ = writeln!(s, "level = {:?}", m.level);
        }
        if let Some(c) = m.corrupt {
            let _ = writeln!(s, "corrupt = {}", c.as_str());
        }
        let r = &self.run;
        let _ = writeln!(
            s,
            "\n[run]\ndt = {:?}\nt_final = {:?}\nintegrator = {}",
            r.dt,
            r.t_final,
            r.integrator.as_str()
        );
        let v = &self.verify;
        let _ = writeln!(s, "\n[verify]\nsample_count = {}\nseed = {}", v.sample_count, v.seed);
        if let Some(t) = v.tolerance {
            let _ = writeln!(s, "tolerance = {t:?}");
        }
        let o = &self.output;
        let _ = writeln!(s, "\n[output]");
        if let Some(p) = &o.path {
            let _ = writeln!(s, "path = {}", p.display());
        }
        let _ = write!(s, "thin_every = {}", o.thin_every);
        writeln!(f, "{s}")
    }
}

/// A ready-to-run scenario for `kind` with parameters sized for a desk run.
pub fn default_config(kind: ModelKind) -> ScenarioConfig {
    let mut model = ModelSection::defaults(kind);
    let (dt, t_final, thin) = match kind {
        ModelKind::DampedOscillator => {
            model.kappa = 0.1;
            (1e-3, 10.0, 100)
        }
        ModelKind::OneformField => {
            model.kappa = 0.2;
            model.n = 16;
            (1e-3, 10.0, 100)
        }
        ModelKind::DampedWave => {
            model.kappa = 0.1;
            model.n = 32;
            (1e-3, 2.0, 50)
        }
        ModelKind::WaveWithSource => {
            model.n = 32;
            model.source = "sine".into();
            (1e-3, 2.0, 50)
        }
        ModelKind::DampedWaveSource => {
            model.kappa = 0.1;
            model.n = 32;
            model.source = "sine".into();
            (1e-3, 2.0, 50)
        }
        ModelKind::SphereOfOneforms => {
            model.n = 8;
            (1e-3, 5.0, 100)
        }
    };
    ScenarioConfig {
        model,
        run: RunSection {
            dt,
            t_final,
            integrator: Integrator::Rk4,
        },
        verify: VerifySection {
            sample_count: 100,
            seed: 42,
            tolerance: None,
        },
        output: OutputSection {
            path: None,
            thin_every: thin,
        },
    }
}
