//! Scenario configuration, read from and echoed back as TOML.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use qcurrent::master_eq::{BathParams, GeneratorKind};
use qcurrent::rotor::RotorParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    pub bath: BathSection,
    #[serde(default)]
    pub generator: GeneratorSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuum: Option<ContinuumSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub tau: f64,
    pub k: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub t_a: f64,
    pub t_b: f64,
    pub g_a: f64,
    pub g_b: f64,
    /// When set, `t_b` follows `t_b_ratio * t_a` at every sweep point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_b_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeKind {
    Classical,
    Local,
    Global,
}

impl From<MeKind> for GeneratorKind {
    fn from(k: MeKind) -> Self {
        match k {
            MeKind::Classical => GeneratorKind::Classical,
            MeKind::Local => GeneratorKind::Local,
            MeKind::Global => GeneratorKind::Global,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub kind: MeKind,
}

impl Default for GeneratorSection {
    fn default() -> Self {
        Self {
            kind: MeKind::Global,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub state: String,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            state: "maximally-mixed".into(),
        }
    }
}

/// Parsed form of `initial.state`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Thermal(f64),
    BasisSector(usize),
    ProductCoherent(f64),
    MaximallyMixed,
    MatrixFile(String),
}

impl FromStr for InitialSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| CliError::Config(format!("initial state '{s}': {why}"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            let v: f64 = a
                .ok_or_else(|| bad("missing value"))?
                .parse()
                .map_err(|_| bad("not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("not finite"))
            }
        };
        match head {
            "thermal" => {
                let t = number(arg)?;
                if t <= 0.0 {
                    return Err(bad("temperature must be positive"));
                }
                Ok(InitialSpec::Thermal(t))
            }
            "basis-sector" => match arg.and_then(|a| a.parse::<usize>().ok()) {
                Some(k @ 1..=3) => Ok(InitialSpec::BasisSector(k)),
                _ => Err(bad("sector must be 1, 2 or 3")),
            },
            "product-coherent" => {
                let d = number(arg)?;
                if !(0.0..=1.0).contains(&d) {
                    return Err(bad("delta must lie in [0, 1]"));
                }
                Ok(InitialSpec::ProductCoherent(d))
            }
            "maximally-mixed" if arg.is_none() => Ok(InitialSpec::MaximallyMixed),
            "matrix-file" => match arg {
                Some(p) if !p.is_empty() => Ok(InitialSpec::MatrixFile(p.to_string())),
                _ => Err(bad("missing path")),
            },
            _ => Err(bad("unknown kind")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Tau,
    K,
    Phi,
    TA,
    TB,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Tau => "tau",
            Variable::K => "k",
            Variable::Phi => "phi",
            Variable::TA => "t_a",
            Variable::TB => "t_b",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Outer loop, one curve per value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_variable: Option<Variable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<f64>,
}

impl SweepSection {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputGroup {
    KernelDim,
    Currents,
    Sectors,
    Heat,
    Negativity,
    Ergotropy,
    Mu,
    DeltaMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub columns: Vec<OutputGroup>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            columns: vec![OutputGroup::KernelDim, OutputGroup::Currents],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub t_max: f64,
    pub dt: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumSection {
    pub ns: Vec<usize>,
    pub ell: f64,
    pub mass: f64,
    pub cutoff: f64,
}

impl Default for ContinuumSection {
    fn default() -> Self {
        Self {
            ns: vec![11, 31, 101, 301],
            ell: 1.0,
            mass: 1.0,
            cutoff: 3.0,
        }
    }
}

/// Parameters of one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub rotor: RotorParams,
    pub bath: BathParams,
    pub series: Option<f64>,
    pub x: Option<f64>,
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} = {v} is not finite")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn initial_spec(&self) -> Result<InitialSpec> {
        self.initial.state.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        let b = &self.bath;
        for (name, v) in [
            ("tau", m.tau),
            ("k", m.k),
            ("phi", m.phi),
            ("t_a", b.t_a),
            ("t_b", b.t_b),
        ] {
            finite(name, v)?;
        }
        if let Some(r) = b.t_b_ratio {
            if !(r.is_finite() && r > 0.0) {
                return Err(CliError::Config(format!(
                    "t_b_ratio = {r} must be positive"
                )));
            }
        }
        self.initial_spec()?;
        if let Some(s) = &self.sweep {
            finite("sweep.start", s.start)?;
            finite("sweep.stop", s.stop)?;
            if s.points < 2 {
                return Err(CliError::Config(format!(
                    "sweep.points = {} must be at least 2",
                    s.points
                )));
            }
            match (s.series_variable, s.series.is_empty()) {
                (Some(v), true) => {
                    return Err(CliError::Config(format!("series over {v} has no values")))
                }
                (None, false) => {
                    return Err(CliError::Config(
                        "series values without series_variable".into(),
                    ))
                }
                (Some(v), false) if v == s.variable => {
                    return Err(CliError::Config(format!(
                        "{v} cannot be both the sweep and the series variable"
                    )))
                }
                _ => {}
            }
            for v in &s.series {
                finite("series", *v)?;
            }
        }
        if self.output.columns.contains(&OutputGroup::DeltaMax)
            && self.generator.kind != MeKind::Global
        {
            return Err(CliError::Config(
                "delta_max needs the global generator".into(),
            ));
        }
        if let Some(e) = &self.evolve {
            if !(e.t_max.is_finite() && e.t_max > 0.0 && e.dt.is_finite() && e.dt > 0.0)
                || e.samples == 0
            {
                return Err(CliError::Config(
                    "evolve needs t_max > 0, dt > 0 and samples >= 1".into(),
                ));
            }
        }
        if let Some(c) = &self.continuum {
            if c.ns.is_empty() || c.ns.contains(&0) {
                return Err(CliError::Config(
                    "continuum.ns must list positive sizes".into(),
                ));
            }
        }
        for p in self.points() {
            p.rotor.validate()?;
            p.bath.validate()?;
        }
        Ok(())
    }

    fn point(&self, series: Option<(Variable, f64)>, x: Option<(Variable, f64)>) -> Point {
        let (mut tau, mut k, mut phi) = (self.model.tau, self.model.k, self.model.phi);
        let (mut t_a, mut t_b) = (self.bath.t_a, self.bath.t_b);
        for (var, v) in series.into_iter().chain(x) {
            match var {
                Variable::Tau => tau = v,
                Variable::K => k = v,
                Variable::Phi => phi = v,
                Variable::TA => t_a = v,
                Variable::TB => t_b = v,
            }
        }
        if let Some(r) = self.bath.t_b_ratio {
            t_b = r * t_a;
        }
        Point {
            rotor: RotorParams { tau, k, phi },
            bath: BathParams {
                t_a,
                t_b,
                g_a: self.bath.g_a,
                g_b: self.bath.g_b,
            },
            series: series.map(|s| s.1),
            x: x.map(|s| s.1),
        }
    }

    /// Evaluation points in output order: series outer, sweep inner.
    pub fn points(&self) -> Vec<Point> {
        let Some(s) = &self.sweep else {
            return vec![self.point(None, None)];
        };
        let series: Vec<Option<(Variable, f64)>> = match s.series_variable {
            Some(v) => s.series.iter().map(|&x| Some((v, x))).collect(),
            None => vec![None],
        };
        let grid = s.grid();
        series
            .iter()
            .flat_map(|&outer| grid.iter().map(move |&x| (outer, x)))
            .map(|(outer, x)| self.point(outer, Some((s.variable, x))))
            .collect()
    }
}
