//! Run configuration: one JSON document, optionally patched with dotted
//! `key=value` overrides, validated field by field before any compute.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::RunError;
use crate::density::{InitialCondition, InitialConditionSpec};
use crate::operator::{assemble, Grid1D, OperatorError, OperatorSpec, Variant};
use crate::solvers::{self, check_times, FdOptions, Method, SolveRequest, SpectralOptions};
use crate::transform::TransformSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub transform: TransformSpec,
    pub operator: OperatorConfig,
    #[serde(rename = "D")]
    pub diffusion: f64,
    pub grid: GridConfig,
    pub initial: InitialConditionSpec,
    pub times: TimesSpec,
    pub method: MethodConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub variant: Variant,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

/// Either an explicit list or `{"logspace": {"from": .., "to": .., "count": ..}}`
/// with endpoints given as times, not exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimesSpec {
    List(Vec<f64>),
    Logspace { logspace: LogRange },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl TimesSpec {
    pub fn expand(&self) -> Result<Vec<f64>, String> {
        match self {
            Self::List(v) => Ok(v.clone()),
            Self::Logspace { logspace: r } => {
                if !(r.from > 0.0 && r.to > r.from && r.to.is_finite()) {
                    return Err("logspace needs 0 < from < to".into());
                }
                if r.count < 2 {
                    return Err("logspace needs count >= 2".into());
                }
                let (a, b) = (r.from.log10(), r.to.log10());
                let step = (b - a) / (r.count - 1) as f64;
                Ok((0..r.count)
                    .map(|i| match i {
                        0 => r.from,
                        i if i == r.count - 1 => r.to,
                        i => 10f64.powf(a + step * i as f64),
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodConfig {
    WClosedForm,
    Spectral {
        #[serde(default)]
        k_max: Option<f64>,
        #[serde(default)]
        k_count: Option<usize>,
    },
    FiniteDifference {
        #[serde(default)]
        dt: Option<f64>,
        #[serde(default)]
        growth: f64,
        #[serde(default)]
        monitor: bool,
    },
}

impl MethodConfig {
    pub fn to_method(&self) -> Method {
        match *self {
            Self::WClosedForm => Method::WClosedForm,
            Self::Spectral { k_max, k_count } => Method::Spectral(SpectralOptions { k_max, k_count }),
            Self::FiniteDifference { dt, growth, monitor } => {
                Method::FiniteDifference(FdOptions { dt, growth, monitor })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Fit window `[t_lo, t_hi]`; all positive snapshot times when absent.
    #[serde(default)]
    pub fit_window: Option<[f64; 2]>,
    /// Two-segment crossover fits in both coordinates.
    #[serde(default)]
    pub crossover: bool,
    /// Further methods whose snapshots are compared against the main one.
    #[serde(default)]
    pub cross_check: Vec<MethodConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// One CSV per snapshot instead of a single long-format file.
    #[serde(default)]
    pub per_snapshot: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            per_snapshot: false,
        }
    }
}

fn config_err(path: &str, message: impl ToString) -> RunError {
    RunError::Config {
        path: path.to_string(),
        message: message.to_string(),
    }
}

/// Reads a config file and applies `key.path=value` overrides. Values parse
/// as JSON when they can and fall back to plain strings.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err("<file>", format!("{}: {e}", path.display())))?;
    let mut doc: Value = serde_json::from_str(&text).map_err(|e| config_err("<file>", e))?;
    for item in overrides {
        apply_override(&mut doc, item)?;
    }
    from_value(doc)
}

pub fn from_value(doc: Value) -> Result<RunConfig, RunError> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        config_err(&path, e.into_inner())
    })
}

pub fn apply_override(doc: &mut Value, item: &str) -> Result<(), RunError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| config_err(item, "override must look like key.path=value"))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| config_err(&parts[..i].join("."), "not an object"))?;
        if i == parts.len() - 1 {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Err(config_err(key, "empty override key"))
}

/// A config whose every field has been checked by its owning module.
#[derive(Debug, Clone)]
pub struct ValidatedRun {
    pub config: RunConfig,
    pub request: SolveRequest,
    /// `None` when no window was given and there are too few snapshots to
    /// fit; the run then only solves and cross-checks.
    pub fit_window: Option<[f64; 2]>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<ValidatedRun, RunError> {
        let pt = self.transform.validate().map_err(|e| config_err("transform", e))?;
        let spec = OperatorSpec::new(self.operator.variant, self.operator.alpha, pt, self.diffusion).map_err(|e| match e {
            OperatorError::NonPositiveDiffusion(_) => config_err("D", e),
            _ => config_err("operator.alpha", e),
        })?;
        let grid = Grid1D::new(self.grid.x_min, self.grid.x_max, self.grid.n).map_err(|e| match e {
            OperatorError::TooFewNodes(_) | OperatorError::OddNodeCountOnSymmetricDomain(_) => config_err("grid.n", e),
            _ => config_err("grid", e),
        })?;
        let ic = InitialCondition::from(&self.initial);
        ic.validate().map_err(|e| config_err("initial", e))?;
        let times = self.times.expand().map_err(|e| config_err("times", e))?;
        check_times(&times).map_err(|e| config_err("times", e))?;
        let method = self.method.to_method();
        check_method(&method, &spec, &times, "method")?;
        for (i, m) in self.analysis.cross_check.iter().enumerate() {
            check_method(&m.to_method(), &spec, &times, &format!("analysis.cross_check[{i}]"))?;
        }

        let positive: Vec<f64> = times.iter().copied().filter(|&t| t > 0.0).collect();
        let fit_window = match self.analysis.fit_window {
            Some(w) => {
                let inside = positive.iter().filter(|&&t| t >= w[0] && t <= w[1]).count();
                if !(w[0] > 0.0 && w[1] > w[0]) || inside < crate::scaling::MIN_FIT_POINTS {
                    return Err(config_err(
                        "analysis.fit_window",
                        format!("window {w:?} holds {inside} positive snapshot times; at least 5 are needed"),
                    ));
                }
                Some(w)
            }
            None if positive.len() >= crate::scaling::MIN_FIT_POINTS => {
                Some([positive[0], positive[positive.len() - 1]])
            }
            None => None,
        };
        if self.analysis.crossover {
            let span = (positive.last().unwrap_or(&1.0) / positive.first().unwrap_or(&1.0)).log10();
            if span < 3.0 || positive.len() < 2 * crate::scaling::MIN_FIT_POINTS {
                return Err(config_err(
                    "analysis.crossover",
                    format!("crossover detection needs >= 3 decades and 10 times, got {span:.2} decades"),
                ));
            }
        }

        let request = SolveRequest {
            spec,
            grid,
            ic,
            times,
            method,
        };
        request.initial_density().map_err(|e| config_err("grid", e))?;
        let needs_band = std::iter::once(&self.method)
            .chain(&self.analysis.cross_check)
            .any(|m| matches!(m, MethodConfig::FiniteDifference { .. }));
        if needs_band {
            assemble(&request.spec, &request.grid).map_err(|e| config_err("operator", e))?;
        }
        Ok(ValidatedRun {
            config: self.clone(),
            request,
            fit_window,
        })
    }
}

fn check_method(method: &Method, spec: &OperatorSpec, times: &[f64], path: &str) -> Result<(), RunError> {
    match method {
        Method::WClosedForm => {
            if solvers::closed_form::substitution_power(spec).is_none() {
                return Err(config_err(path, format!("w_closed_form needs Delta3 or Delta4, got {}", spec.variant)));
            }
        }
        Method::Spectral(opts) => {
            solvers::spectral::kernel_family(spec).map_err(|e| config_err(path, e))?;
            if let Some(k) = opts.k_max {
                if !(k > 0.0 && k.is_finite()) {
                    return Err(config_err(&format!("{path}.k_max"), "must be positive"));
                }
            }
            if opts.k_count.is_some_and(|c| c < 2) {
                return Err(config_err(&format!("{path}.k_count"), "must be at least 2"));
            }
        }
        Method::FiniteDifference(opts) => {
            opts.validate(times).map_err(|e| config_err(path, e))?;
        }
    }
    Ok(())
}
