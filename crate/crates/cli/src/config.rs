//! The experiment file: a versioned TOML document.
//!
//! ```toml
//! version = 1
//!
//! [model]
//! family = "gibbs"          # poisson | gibbs | determinantal
//! sites = 2                 # or weights = [..], or window = [[0.0, 1.0]]
//! activity = 1.0            # a constant or one value per site
//! potential = [[0.0, 0.693], [0.693, 0.0]]
//!
//! [estimator]
//! mode = "exact"            # exact | mc
//!
//! [[checks]]
//! kind = "moment-power"
//! n = 2
//! u = "cardinality"
//! f = "one"
//! ```

use std::path::Path;

use papangelou::configuration::GroundSpace;
use papangelou::fixtures;
use papangelou::linalg::Matrix;
use papangelou::models::{Activity, Model, PairPotential};
use papangelou::moments::{ProcessFunction, SetFunction, StateFunction};
use papangelou::transform::Shift;
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
/// Largest discrete space accepted in exact mode.
pub const MAX_EXACT_SITES: usize = 15;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub model: ModelSpec,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    pub shift: Option<ShiftSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: String,
    pub sites: Option<usize>,
    pub weights: Option<Vec<f64>>,
    pub window: Option<Vec<[f64; 2]>>,
    pub density: Option<f64>,
    pub activity: Option<ActivitySpec>,
    potential: Option<Vec<Vec<f64>>>,
    hard_core: Option<f64>,
    strauss: Option<StraussSpec>,
    kernel: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ActivitySpec {
    Constant(f64),
    PerSite(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StraussSpec {
    radius: f64,
    strength: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMode {
    #[default]
    Exact,
    Mc,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default)]
    pub mode: EstimatorMode,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub burn_in: Option<usize>,
    pub steps: Option<usize>,
    pub chains: Option<usize>,
    pub tolerance: Option<f64>,
    pub z_crit: Option<f64>,
    pub compound_order: Option<usize>,
}

fn default_samples() -> usize {
    10_000
}

fn default_seed() -> u64 {
    1
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        Self {
            mode: EstimatorMode::Exact,
            samples: default_samples(),
            seed: default_seed(),
            burn_in: None,
            steps: None,
            chains: None,
            tolerance: None,
            z_crit: None,
            compound_order: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_refine")]
    pub refine: bool,
}

fn default_nodes() -> usize {
    64
}

fn default_refine() -> bool {
    true
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: default_nodes(),
            refine: default_refine(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub kind: String,
    pub n: Option<usize>,
    pub u: Option<String>,
    pub us: Option<Vec<String>>,
    pub f: Option<String>,
    pub v: Option<String>,
    pub vs: Option<Vec<String>>,
    pub function: Option<String>,
    pub order: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    pub kind: String,
    pub map: Option<Vec<usize>>,
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub trigger: Option<usize>,
    pub offset: Option<f64>,
    pub radius: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_summary")]
    pub summary: String,
    #[serde(default = "default_detail")]
    pub detail: String,
    #[serde(default = "default_samples_file")]
    pub samples: String,
    #[serde(default = "default_oracle")]
    pub oracle: String,
}

fn default_summary() -> String {
    "summary.csv".into()
}

fn default_detail() -> String {
    "detail.json".into()
}

fn default_samples_file() -> String {
    "samples.txt".into()
}

fn default_oracle() -> String {
    "oracle.json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            summary: default_summary(),
            detail: default_detail(),
            samples: default_samples_file(),
            oracle: default_oracle(),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<Matrix<f64>, CliError> {
    Matrix::from_rows(rows.to_vec()).map_err(|e| usage(format!("{what}: {e}")))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| usage(e.to_string()))?;
        if config.version != SCHEMA_VERSION {
            return Err(usage(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                config.version
            )));
        }
        Ok(config)
    }

    pub fn ground(&self) -> Result<GroundSpace<f64>, CliError> {
        let m = &self.model;
        let ground = match (m.sites, &m.weights, &m.window) {
            (Some(n), None, None) => GroundSpace::sites(n),
            (None, Some(w), None) => GroundSpace::discrete(w.clone()),
            (None, None, Some(bounds)) => {
                GroundSpace::window(bounds.iter().map(|b| (b[0], b[1])).collect(), m.density.unwrap_or(1.0))
            }
            (None, None, None) => return Err(usage("model needs one of `sites`, `weights` or `window`")),
            _ => return Err(usage("model takes only one of `sites`, `weights` and `window`")),
        };
        ground.map_err(|e| usage(e.to_string()))
    }

    pub fn model(&self) -> Result<Model<f64>, CliError> {
        let ground = self.ground()?;
        let m = &self.model;
        let activity = match &m.activity {
            None => Activity::Constant(1.0),
            Some(ActivitySpec::Constant(z)) => Activity::Constant(*z),
            Some(ActivitySpec::PerSite(z)) => Activity::PerSite(z.clone()),
        };
        let model = match m.family.as_str() {
            "poisson" => Model::poisson(ground, activity),
            "gibbs" => {
                let potential = match (&m.potential, m.hard_core, &m.strauss) {
                    (Some(t), None, None) => PairPotential::Table(matrix(t, "potential")?),
                    (None, Some(r), None) => PairPotential::hard_core(r),
                    (None, None, Some(s)) => PairPotential::Radial {
                        radius: s.radius,
                        strength: s.strength,
                    },
                    (None, None, None) => PairPotential::None,
                    _ => return Err(usage("gibbs takes one of `potential`, `hard_core` and `strauss`")),
                };
                Model::gibbs(ground, activity, potential)
            }
            "determinantal" => {
                let k = m
                    .kernel
                    .as_ref()
                    .ok_or_else(|| usage("determinantal model needs `kernel`"))?;
                Model::determinantal(ground, matrix(k, "kernel")?)
            }
            other => return Err(usage(format!("unknown model family `{other}`"))),
        };
        model.map_err(|e| usage(e.to_string()))
    }

    pub fn shift(&self) -> Result<Option<Shift<f64>>, CliError> {
        let Some(s) = &self.shift else {
            return Ok(None);
        };
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| usage(format!("shift `{}` needs `{name}`", s.kind)));
        let needf = |v: Option<f64>, name: &str| v.ok_or_else(|| usage(format!("shift `{}` needs `{name}`", s.kind)));
        let shift = match s.kind.as_str() {
            "identity" => Shift::Identity,
            "permutation" => Shift::Permutation(s.map.clone().ok_or_else(|| usage("shift `permutation` needs `map`"))?),
            "conditional-swap" => Shift::ConditionalSwap {
                a: need(s.a, "a")?,
                b: need(s.b, "b")?,
                trigger: need(s.trigger, "trigger")?,
            },
            "rotation" => Shift::Rotation {
                offset: needf(s.offset, "offset")?,
            },
            "count-translate" => Shift::CountTranslate {
                radius: needf(s.radius, "radius")?,
                step: needf(s.step, "step")?,
            },
            other => return Err(usage(format!("unknown shift `{other}`"))),
        };
        shift.validate(&self.ground()?).map_err(|e| usage(e.to_string()))?;
        Ok(Some(shift))
    }
}

/// A check with every fixture name resolved.
#[derive(Clone, Debug)]
pub enum Check {
    Gnz(ProcessFunction<f64>),
    GnzCompound(SetFunction<f64>),
    MomentProduct(StateFunction<f64>, Vec<ProcessFunction<f64>>),
    MomentPower(StateFunction<f64>, ProcessFunction<f64>, usize),
    CompensatedMoment(StateFunction<f64>, ProcessFunction<f64>, usize),
    DivergenceMoment(StateFunction<f64>, ProcessFunction<f64>, usize),
    Duality(StateFunction<f64>, ProcessFunction<f64>),
    Skorohod(ProcessFunction<f64>),
    SkorohodDifferenceForm(ProcessFunction<f64>),
    CorrelationMoment(Vec<ProcessFunction<f64>>),
    Covariance(StateFunction<f64>, ProcessFunction<f64>, usize),
    PartitionRecursion(usize, String),
    TransformLaw,
    PoissonFactorization(usize),
}

pub const RECURSION_FUNCTIONS: [&str; 3] = ["block-count", "size-product", "min-weighted"];

impl CheckSpec {
    pub fn resolve(&self, ground: &GroundSpace<f64>, has_shift: bool) -> Result<Check, CliError> {
        let kind = self.kind.as_str();
        let ctx = |e: papangelou::Error| usage(format!("check `{kind}`: {e}"));
        let n = || self.n.ok_or_else(|| usage(format!("check `{kind}` needs `n`")));
        let u = || {
            let name = self
                .u
                .as_deref()
                .ok_or_else(|| usage(format!("check `{kind}` needs `u`")))?;
            fixtures::process_function(name, ground).map_err(ctx)
        };
        let f = || fixtures::state_function(self.f.as_deref().unwrap_or("one")).map_err(ctx);
        let list = |many: &Option<Vec<String>>, one: &Option<String>, deterministic: bool| -> Result<_, CliError> {
            let names: Vec<String> = match (many, one) {
                (Some(names), None) => names.clone(),
                (None, Some(name)) => vec![name.clone(); n()?],
                _ => {
                    return Err(usage(format!(
                        "check `{kind}` needs exactly one of the list and single-function forms"
                    )))
                }
            };
            names
                .iter()
                .map(|s| {
                    if deterministic {
                        fixtures::deterministic_function(s, ground)
                    } else {
                        fixtures::process_function(s, ground)
                    }
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(ctx)
        };
        let check = match kind {
            "gnz" => Check::Gnz(u()?),
            "gnz-compound" => {
                let name = self.u.as_deref().unwrap_or("one");
                Check::GnzCompound(fixtures::set_function(name).map_err(ctx)?)
            }
            "moment-product" => Check::MomentProduct(f()?, list(&self.us, &self.u, false)?),
            "moment-power" => Check::MomentPower(f()?, u()?, n()?),
            "compensated-moment" => Check::CompensatedMoment(f()?, u()?, n()?),
            "divergence-moment" => Check::DivergenceMoment(f()?, u()?, n()?),
            "duality" => Check::Duality(f()?, u()?),
            "skorohod" => Check::Skorohod(u()?),
            "skorohod-difference-form" => Check::SkorohodDifferenceForm(u()?),
            "correlation-moment" => Check::CorrelationMoment(list(&self.vs, &self.v, true)?),
            "covariance" => {
                let v = self.v.as_deref().ok_or_else(|| usage("check `covariance` needs `v`"))?;
                Check::Covariance(f()?, fixtures::deterministic_function(v, ground).map_err(ctx)?, n()?)
            }
            "partition-recursion" => {
                let function = self.function.clone().unwrap_or_else(|| RECURSION_FUNCTIONS[0].into());
                if !RECURSION_FUNCTIONS.contains(&function.as_str()) {
                    return Err(usage(format!("unknown recursion function `{function}`")));
                }
                Check::PartitionRecursion(n()?, function)
            }
            "transform-law" | "poisson-factorization" if !has_shift => {
                return Err(usage(format!("check `{kind}` needs a [shift] table")));
            }
            "transform-law" => Check::TransformLaw,
            "poisson-factorization" => Check::PoissonFactorization(self.order.unwrap_or(3)),
            other => return Err(usage(format!("unknown check kind `{other}`"))),
        };
        Ok(check)
    }
}
