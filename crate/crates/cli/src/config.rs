use std::collections::BTreeMap;

use igclab::densela::ComplexMatrix;
use igclab::model::{Boundary, GeneralModel, LadderParams, LossSpec};
use igclab::walk::{QuadratureOptions, WalkConfig};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::presets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Igc,
    Walk,
    Burst,
    Sweep,
    Liouville,
    Figure,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Time,
    #[default]
    Resolvent,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Ladder(LadderSpec),
    General(GeneralSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub cells: usize,
    /// `t_0, t_1, …, t_n`
    pub hoppings: Vec<f64>,
    pub t_p: f64,
    pub phi: f64,
    pub loss: LossSpec,
    #[serde(default = "open")]
    pub boundary: Boundary,
}

fn open() -> Boundary {
    Boundary::Open
}

impl LadderSpec {
    pub fn params(&self) -> Result<LadderParams, CliError> {
        let loss = self.loss.rates(self.cells).map_err(|e| CliError::Schema(e.to_string()))?;
        let p = LadderParams {
            cells: self.cells,
            hoppings: self.hoppings.clone(),
            intra: self.t_p,
            phase: self.phi,
            loss,
            boundary: self.boundary,
        };
        p.validate().map_err(|e| CliError::Schema(e.to_string()))?;
        Ok(p)
    }
}

/// Complex matrices are written row by row as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralSpec {
    pub a: Vec<Vec<[f64; 2]>>,
    pub b: Vec<Vec<[f64; 2]>>,
    pub c: Vec<Vec<[f64; 2]>>,
    pub gamma: Vec<f64>,
}

fn matrix(name: &str, rows: &[Vec<[f64; 2]>], cols: usize) -> Result<ComplexMatrix, CliError> {
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(CliError::Schema(format!(
                "model.general.{name}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        data.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    ComplexMatrix::from_vec(rows.len(), cols, data).map_err(|e| CliError::Schema(e.to_string()))
}

impl GeneralSpec {
    pub fn model(&self) -> Result<GeneralModel, CliError> {
        let (nh, nd) = (self.a.len(), self.b.len());
        let g = GeneralModel {
            a: matrix("a", &self.a, nh)?,
            b: matrix("b", &self.b, nd)?,
            c: matrix("c", &self.c, nh)?,
            gamma: self.gamma.clone(),
        };
        g.validate().map_err(|e| CliError::Schema(e.to_string()))?;
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkOptions {
    pub t_max: f64,
    pub norm_floor: f64,
    pub step_tol: f64,
}

impl Default for WalkOptions {
    fn default() -> Self {
        Self {
            t_max: WalkConfig::DEFAULT_T_MAX,
            norm_floor: WalkConfig::DEFAULT_NORM_FLOOR,
            step_tol: WalkConfig::DEFAULT_STEP_TOL,
        }
    }
}

impl WalkOptions {
    pub fn apply(&self, cfg: &mut WalkConfig) {
        cfg.t_max = self.t_max;
        cfg.norm_floor = self.norm_floor;
        cfg.step_tol = self.step_tol;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub tail_tol: f64,
    pub max_panels: usize,
    pub seed_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        let q = QuadratureOptions::default();
        Self {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            tail_tol: q.tail_tol,
            max_panels: q.max_panels,
            seed_panels: q.seed_panels,
        }
    }
}

impl QuadratureSpec {
    pub fn options(&self) -> QuadratureOptions {
        QuadratureOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            tail_tol: self.tail_tol,
            max_panels: self.max_panels,
            seed_panels: self.seed_panels,
        }
    }
}

/// Independent runs of `command`, each the base config with one set of
/// dotted-path overrides applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub command: Command,
    pub points: Vec<BTreeMap<String, Value>>,
    /// Summary columns charted against the first override key.
    #[serde(default)]
    pub plot: Vec<String>,
    #[serde(default)]
    pub log_y: bool,
}

/// Dense correlation-matrix propagation for small ladders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    pub dt: f64,
    pub steps: usize,
    /// Start of the window used for the decay-rate fit.
    pub fit_from: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    /// Preset name, for `command = figure`.
    pub figure: Option<String>,
    pub model: Option<ModelSpec>,
    pub x0: Option<usize>,
    pub x0_list: Option<Vec<usize>>,
    pub k_samples: usize,
    pub engine: EngineChoice,
    /// Boundary conditions to compute; the model's own when empty.
    pub boundaries: Vec<Boundary>,
    /// Replaces the seed of a random loss profile.
    pub seed: Option<u64>,
    pub walk: WalkOptions,
    pub quadrature: QuadratureSpec,
    /// Cell used to normalize `P_x` in `relative.csv`.
    pub reference_cell: Option<usize>,
    pub sweep: Option<SweepSpec>,
    pub reference: Option<ReferenceSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::Spectrum,
            figure: None,
            model: None,
            x0: None,
            x0_list: None,
            k_samples: 1024,
            engine: EngineChoice::default(),
            boundaries: Vec::new(),
            seed: None,
            walk: WalkOptions::default(),
            quadrature: QuadratureSpec::default(),
            reference_cell: None,
            sweep: None,
            reference: None,
        }
    }
}

impl ExperimentConfig {
    pub fn ladder(&self) -> Result<&LadderSpec, CliError> {
        match &self.model {
            Some(ModelSpec::Ladder(l)) => Ok(l),
            Some(ModelSpec::General(_)) => Err(CliError::Schema(format!(
                "command `{}` needs a ladder model",
                self.command_name()
            ))),
            None => Err(CliError::Schema("missing field `model`".into())),
        }
    }

    pub fn x0(&self) -> Result<usize, CliError> {
        self.x0
            .ok_or_else(|| CliError::Schema(format!("missing field `x0` for command `{}`", self.command_name())))
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Spectrum => "spectrum",
            Command::Igc => "igc",
            Command::Walk => "walk",
            Command::Burst => "burst",
            Command::Sweep => "sweep",
            Command::Liouville => "liouville",
            Command::Figure => "figure",
        }
    }

    pub fn boundaries(&self) -> Result<Vec<Boundary>, CliError> {
        if self.boundaries.is_empty() {
            Ok(vec![self.ladder()?.boundary])
        } else {
            Ok(self.boundaries.clone())
        }
    }

    /// Command-specific required fields and value checks.
    fn validate(&self) -> Result<(), CliError> {
        let schema = |m: String| Err(CliError::Schema(m));
        if self.model.is_none() {
            return schema("missing field `model`".into());
        }
        if let Some(ModelSpec::Ladder(l)) = &self.model {
            let p = l.params()?;
            for (name, x) in [("x0", self.x0), ("reference_cell", self.reference_cell)] {
                if let Some(x) = x {
                    if !(1..=p.cells).contains(&x) {
                        return schema(format!("{name} = {x} outside 1..={}", p.cells));
                    }
                }
            }
            if let Some(list) = &self.x0_list {
                if list.is_empty() || list.iter().any(|x| !(1..=p.cells).contains(x)) {
                    return schema(format!("x0_list must be non-empty with entries in 1..={}", p.cells));
                }
            }
            if let Some(x0) = self.x0 {
                let mut cfg = WalkConfig::new(p, x0);
                self.walk.apply(&mut cfg);
                cfg.validate().map_err(|e| CliError::Schema(e.to_string()))?;
            }
        }
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.abs_tol > 0.0 && q.tail_tol > 0.0 && q.max_panels > 0 && q.seed_panels > 0) {
            return schema("quadrature tolerances and panel counts must be positive".into());
        }
        match self.command {
            Command::Spectrum | Command::Igc | Command::Liouville => {}
            Command::Walk => {
                self.ladder()?;
                self.x0()?;
            }
            Command::Burst => {
                self.ladder()?;
                if self.x0_list.is_some() {
                    if self.engine == EngineChoice::Both {
                        return schema("x0 scans take a single engine (time or resolvent)".into());
                    }
                } else {
                    self.x0()?;
                }
            }
            Command::Sweep => {
                let Some(s) = &self.sweep else {
                    return schema("missing field `sweep` for command `sweep`".into());
                };
                if matches!(s.command, Command::Sweep | Command::Figure) {
                    return schema("a sweep cannot run `sweep` or `figure` points".into());
                }
                if s.points.is_empty() {
                    return schema("sweep.points is empty".into());
                }
            }
            Command::Figure => return schema("`figure` configs are resolved before validation".into()),
        }
        if matches!(self.command, Command::Igc | Command::Liouville) {
            self.ladder()?;
        }
        if let Some(r) = &self.reference {
            if !(r.dt > 0.0 && r.steps >= 2) {
                return schema("reference needs dt > 0 and at least 2 steps".into());
            }
        }
        Ok(())
    }
}

/// Sets `path` (dot-separated keys, numeric segments index arrays) in `doc`,
/// creating intermediate objects as needed.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<(), CliError> {
    let bad = |m: String| CliError::Schema(format!("override `{path}`: {m}"));
    let mut node = doc;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(bad("empty path segment".into()));
    }
    for (depth, key) in keys.iter().enumerate() {
        let last = depth + 1 == keys.len();
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string()).or_insert(Value::Null)
            }
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| bad(format!("`{key}` does not index an array")))?;
                let len = items.len();
                let slot = items
                    .get_mut(i)
                    .ok_or_else(|| bad(format!("index {i} out of range for an array of {len}")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(bad(format!("`{key}` descends into a scalar"))),
        };
    }
    unreachable!("loop returns on the last segment")
}

/// `key=value` with the value parsed as JSON, falling back to a bare string.
pub fn parse_override(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Schema(format!("override `{s}` is not of the form key=value")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

/// Turns a raw document into a validated config: expands `figure` presets,
/// applies overrides and the seed, and folds the seed into random loss profiles.
pub fn resolve(mut doc: Value, overrides: &[(String, Value)], seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    if doc.get("command").and_then(Value::as_str) == Some("figure") {
        let name = doc
            .get("figure")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Schema("missing field `figure` for command `figure`".into()))?;
        let preset = presets::find(name)?;
        if let Value::Object(extra) = &doc {
            let mut base = preset.config;
            for (k, v) in extra.iter().filter(|(k, _)| *k != "command" && *k != "figure") {
                set_path(&mut base, k, v.clone())?;
            }
            doc = base;
        }
    }
    for (k, v) in overrides {
        set_path(&mut doc, k, v.clone())?;
    }
    if let Some(s) = seed {
        set_path(&mut doc, "seed", Value::from(s))?;
    }
    if doc.get("command").is_none() {
        return Err(CliError::Schema("missing field `command`".into()));
    }
    if doc.get("model").and_then(Value::as_object).is_some_and(|m| m.is_empty()) {
        return Err(CliError::Schema("model: missing field `ladder` (or `general`)".into()));
    }
    let mut cfg: ExperimentConfig = serde_json::from_value(doc).map_err(|e| CliError::Schema(e.to_string()))?;
    if let (Some(s), Some(ModelSpec::Ladder(l))) = (cfg.seed, cfg.model.as_mut()) {
        if let LossSpec::Random { seed, .. } = &mut l.loss {
            *seed = s;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
