//! Run configuration, read from TOML or JSON.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Validate,
    Dualize,
    Identities,
    Simulate,
    Convergence,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Validate,
        Scenario::Dualize,
        Scenario::Identities,
        Scenario::Simulate,
        Scenario::Convergence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Validate => "validate",
            Scenario::Dualize => "dualize",
            Scenario::Identities => "identities",
            Scenario::Simulate => "simulate",
            Scenario::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown scenario `{s}`")))
    }
}

/// `"adjoint"`, `"default"` (the algebra's own matrices) or explicit
/// matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepresentationSpec {
    Keyword(String),
    Explicit(Vec<Vec<Vec<f64>>>),
}

impl Default for RepresentationSpec {
    fn default() -> Self {
        RepresentationSpec::Keyword("default".into())
    }
}

/// `"from_rep"` or an explicit symmetric matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceFormSpec {
    Keyword(String),
    Explicit(Vec<Vec<f64>>),
}

impl Default for TraceFormSpec {
    fn default() -> Self {
        TraceFormSpec::Keyword("from_rep".into())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureSpec {
    #[default]
    Lorentzian,
    Euclidean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub d: usize,
    pub shape: Vec<usize>,
    /// Spacing per axis; defaults to `1 / shape[μ]` (unit periods).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default)]
    pub signature: SignatureSpec,
}

fn default_n_modes() -> usize {
    3
}

fn default_amplitude() -> f64 {
    0.8
}

/// Random smooth test fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self {
            n_modes: default_n_modes(),
            amplitude: default_amplitude(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialData {
    /// `φ(0) = 0`, `φ̇(0) = velocity`; the exact solution is `φ = t·velocity`.
    Homogeneous { velocity: Vec<f64> },
    /// `φ(0) = a sin(2πk x/L) v`, moving right; exact only for abelian
    /// algebras.
    Wave {
        direction: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_usize")]
        mode: usize,
    },
    /// Random smooth profiles for `φ` and `φ̇` drawn from the run seed.
    Smooth {
        amplitude: f64,
        #[serde(default)]
        velocity_amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_length() -> f64 {
    1.0
}

fn default_t_end() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub n_x: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    /// Time step; when absent, `courant · h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub courant: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Steps between snapshots; when absent, chosen so snapshots are about
    /// one grid spacing apart in time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
    pub initial: InitialData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    /// `g⁻¹dg` against `F^m R_m` on random fields, `D = 2`.
    Noether,
    /// Bianchi residual of `F(φ)` on random fields.
    Bianchi,
    /// Abelian travelling wave against d'Alembert.
    Wave,
    /// Second-order residual along solver trajectories.
    OnShell,
    /// Multiplier cross-consistency along solver trajectories.
    Multipliers,
}

fn default_levels() -> Vec<usize> {
    vec![32, 64, 128]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub study: Study,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
}

/// Overrides a catalog threshold: a bound, or `[lo, hi]` for order checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdOverride {
    Value(f64),
    Range([f64; 2]),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_fields: Option<PathBuf>,
    /// Wall-clock timings make reports differ between runs, so they are
    /// opt-in.
    #[serde(default)]
    pub include_timings: bool,
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Named algebra (`su2`, `abelian(3)`, …) or path to a definition file.
    pub algebra: String,
    #[serde(default)]
    pub representation: RepresentationSpec,
    #[serde(default)]
    pub trace_form: TraceFormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub fields: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSpec>,
    #[serde(default)]
    pub thresholds: BTreeMap<String, ThresholdOverride>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// `.json` files are read as JSON, everything else as TOML.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    /// Checks that the parameters needed by `scenario` are present and sane.
    pub fn validate_for(&self, scenario: Scenario) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if let Some(s) = self.scenario {
            if s != scenario {
                return bad(format!("config is for `{s}`, requested `{scenario}`"));
            }
        }
        if self.fields.n_modes == 0 || !(self.fields.amplitude.is_finite()) {
            return bad("fields.n_modes must be ≥ 1 and amplitude finite".into());
        }
        if let Some(g) = &self.grid {
            if g.shape.len() != g.d {
                return bad(format!(
                    "grid.shape has {} entries for d = {}",
                    g.shape.len(),
                    g.d
                ));
            }
            if let Some(h) = &g.h {
                if h.len() != g.d || h.iter().any(|x| !(*x > 0.0)) {
                    return bad("grid.h must have d positive entries".into());
                }
            }
        }
        match scenario {
            Scenario::Validate => {}
            Scenario::Dualize => {
                if self.grid.is_none() {
                    return bad("dualize needs [grid] (for the spacetime dimension)".into());
                }
            }
            Scenario::Identities => {
                if self.grid.is_none() {
                    return bad("identities needs [grid]".into());
                }
            }
            Scenario::Simulate => {
                if self.simulate.is_none() {
                    return bad("simulate needs [simulate]".into());
                }
                if let Some(g) = &self.grid {
                    if g.d != 2 {
                        return bad("simulate requires grid.d = 2".into());
                    }
                }
            }
            Scenario::Convergence => {
                let Some(c) = &self.convergence else {
                    return bad("convergence needs [convergence]".into());
                };
                if c.levels.len() < 2 || c.levels.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("convergence.levels must be ≥ 2 increasing sizes".into());
                }
                let needs_solver = matches!(c.study, Study::OnShell | Study::Multipliers);
                if needs_solver && self.simulate.is_none() {
                    return bad("solver-based studies need [simulate] for the initial data".into());
                }
                if c.study == Study::Bianchi && self.grid.is_none() {
                    return bad("the bianchi study needs [grid] for d and signature".into());
                }
            }
        }
        if let Some(s) = &self.simulate {
            if s.n_x < 4 || !(s.length > 0.0) || !(s.t_end > 0.0) {
                return bad("simulate: n_x ≥ 4, length > 0 and t_end > 0 required".into());
            }
            if let Some(dt) = s.dt {
                if !(dt > 0.0) {
                    return bad("simulate.dt must be positive".into());
                }
            }
            if s.snapshot_every == Some(0) {
                return bad("simulate.snapshot_every must be ≥ 1".into());
            }
        }
        Ok(())
    }
}
