use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use papangelou::configuration::{Configuration, GroundSpace};
use papangelou::estimator::Law;
use papangelou::models::{ExactDistribution, Family, Model};
use papangelou::moments::{Evaluator, Quadrature};
use papangelou::partitions::{check_partition_recursion, Partition};
use papangelou::report::{IdentityReport, CSV_HEADER};
use papangelou::samplers::{
    sample_discrete, sample_gibbs_birth_death, sample_poisson_window, BirthDeath, Diagnostics, SampleBatch,
    DEFAULT_CHAINS,
};
use papangelou::transform::{check_poisson_factorization, verify_pushforward_law, Shift};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Check, CheckSpec, EstimatorMode, ExperimentConfig, MAX_EXACT_SITES};
use crate::CliError;

/// Largest space whose two-point compound table goes into the oracle dump.
const ORACLE_COMPOUND_SITES: usize = 10;

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io(dir))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(io(path))
}

fn require_exact(model: &Model<f64>) -> Result<(), CliError> {
    match model.ground().site_count() {
        Some(n) if n <= MAX_EXACT_SITES => Ok(()),
        Some(n) => Err(CliError::Usage(format!(
            "exact evaluation supports at most {MAX_EXACT_SITES} sites, got {n}"
        ))),
        None => Err(CliError::Usage("exact evaluation needs a discrete model".into())),
    }
}

fn draw(config: &ExperimentConfig, model: &Model<f64>) -> Result<SampleBatch<f64>, CliError> {
    let est = &config.estimator;
    let batch = match (model.ground(), model.family()) {
        (GroundSpace::Discrete { .. }, _) => sample_discrete(model, est.samples, est.seed),
        (ground, Family::Poisson { activity }) => sample_poisson_window(ground, activity, est.samples, est.seed),
        (_, Family::Gibbs { .. }) => {
            let params = BirthDeath {
                steps_per_sample: est.steps,
                burn_in: est.burn_in,
                chains: est.chains.unwrap_or(DEFAULT_CHAINS),
            };
            sample_gibbs_birth_death(model, est.samples, params, est.seed)
        }
        (_, family) => {
            return Err(CliError::Usage(format!(
                "no sampler for a {} model on a window",
                family.name()
            )));
        }
    };
    batch.map_err(|e| CliError::Usage(e.to_string()))
}

fn recursion_function(name: &str) -> impl Fn(&Partition) -> f64 + '_ {
    move |p: &Partition| match name {
        "size-product" => p.block_sizes().map(|s| s as f64).product(),
        "min-weighted" => p.blocks().iter().map(|b| 1.0 / (b[0] as f64 + b.len() as f64)).sum(),
        _ => p.block_count() as f64,
    }
}

fn failed_row(kind: &str, err: impl ToString) -> IdentityReport<f64> {
    IdentityReport::exact(kind, f64::NAN, f64::NAN, 0.0).with_note(format!("error: {}", err.to_string()))
}

fn run_check(
    ev: &Evaluator<'_, f64>,
    model: &Model<f64>,
    shift: Option<&Shift<f64>>,
    spec: &CheckSpec,
    check: &Check,
    exact: bool,
    nodes: usize,
) -> IdentityReport<f64> {
    let ev = match (spec.tolerance, exact) {
        (Some(t), true) => ev.with_tolerance(t),
        (Some(t), false) => ev.with_z_crit(t),
        (None, _) => *ev,
    };
    let result = match check {
        Check::Gnz(u) => Ok(ev.check_gnz(u)),
        Check::GnzCompound(u) => ev.check_gnz_compound(u),
        Check::MomentProduct(f, us) => ev.check_moment_product(f, us),
        Check::MomentPower(f, u, n) => ev.check_moment_power(f, u, *n),
        Check::CompensatedMoment(f, u, n) => ev.check_compensated_moment(f, u, *n),
        Check::DivergenceMoment(f, u, n) => ev.check_divergence_moment(f, u, *n),
        Check::Duality(f, u) => Ok(ev.check_duality(f, u)),
        Check::Skorohod(u) => Ok(ev.check_skorohod(u)),
        Check::SkorohodDifferenceForm(u) => Ok(ev.check_skorohod_difference_form(u)),
        Check::CorrelationMoment(vs) => ev.check_correlation_moments(vs),
        Check::Covariance(f, v, n) => ev.check_covariance(f, v, *n),
        Check::PartitionRecursion(n, name) => check_partition_recursion(*n, recursion_function(name)).map(|r| {
            let tol = spec.tolerance.unwrap_or(r.tolerance);
            IdentityReport::exact(format!("{} f={name}", r.identity), r.lhs.value, r.rhs.value, tol).with_terms(r.terms)
        }),
        Check::TransformLaw => verify_pushforward_law(model, shift.expect("resolved with a shift"), ev.law(), nodes),
        Check::PoissonFactorization(order) => {
            check_poisson_factorization(model, shift.expect("resolved with a shift"), ev.law(), *order)
        }
    };
    result.unwrap_or_else(|e| failed_row(&spec.kind, e))
}

#[derive(Serialize)]
struct Detail<'a> {
    version: u32,
    family: &'a str,
    mode: &'a str,
    samples: Option<usize>,
    seed: Option<u64>,
    diagnostics: Option<&'a Diagnostics>,
    reports: &'a [IdentityReport<f64>],
}

pub struct VerifyOutcome {
    pub reports: Vec<IdentityReport<f64>>,
    pub summary: PathBuf,
    pub detail: PathBuf,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

pub fn verify(config: &ExperimentConfig, out: &Path, parallel: Option<usize>) -> Result<VerifyOutcome, CliError> {
    let model = config.model()?;
    let shift = config.shift()?;
    let ground = model.ground();
    let checks = config
        .checks
        .iter()
        .map(|c| c.resolve(ground, shift.is_some()))
        .collect::<Result<Vec<_>, _>>()?;

    let exact = config.estimator.mode == EstimatorMode::Exact;
    let (dist, batch) = if exact {
        require_exact(&model)?;
        (
            Some(model.exact_distribution().map_err(|e| CliError::Usage(e.to_string()))?),
            None,
        )
    } else {
        (None, Some(draw(config, &model)?))
    };
    let law = match (&dist, &batch) {
        (Some(d), _) => Law::Exact(d),
        (_, Some(b)) => Law::Samples(b),
        _ => unreachable!("one law is always built"),
    };
    let quadrature = Quadrature {
        nodes: config.quadrature.nodes,
        refine: config.quadrature.refine,
    };
    let mut ev = Evaluator::new(&model, law).with_quadrature(quadrature);
    if let Some(t) = config.estimator.tolerance {
        ev = ev.with_tolerance(t);
    }
    if let Some(z) = config.estimator.z_crit {
        ev = ev.with_z_crit(z);
    }
    if let Some(k) = config.estimator.compound_order {
        ev = ev.with_compound_order(k);
    }

    let run = |(spec, check): (&CheckSpec, &Check)| {
        run_check(&ev, &model, shift.as_ref(), spec, check, exact, quadrature.nodes)
    };
    let pairs: Vec<_> = config.checks.iter().zip(&checks).collect();
    let reports: Vec<IdentityReport<f64>> = match parallel {
        Some(threads) if threads > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(|| pairs.into_par_iter().map(run).collect())
        }
        _ => pairs.into_iter().map(run).collect(),
    };

    create_dir(out)?;
    let summary = out.join(&config.output.summary);
    let mut writer = csv::Writer::from_path(&summary).map_err(|e| CliError::Io(e.to_string()))?;
    writer
        .write_record(CSV_HEADER)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for r in &reports {
        writer
            .write_record(r.csv_record())
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.flush().map_err(io(&summary))?;

    let detail = out.join(&config.output.detail);
    write_json(
        &detail,
        &Detail {
            version: crate::config::SCHEMA_VERSION,
            family: model.family().name(),
            mode: if exact { "exact" } else { "mc" },
            samples: batch.as_ref().map(SampleBatch::len),
            seed: batch.as_ref().map(SampleBatch::seed),
            diagnostics: batch.as_ref().map(SampleBatch::diagnostics),
            reports: &reports,
        },
    )?;
    Ok(VerifyOutcome {
        reports,
        summary,
        detail,
    })
}

#[derive(Serialize)]
struct SampleMeta<'a> {
    version: u32,
    count: usize,
    seed: u64,
    descriptor: &'a str,
    correlated: bool,
    diagnostics: &'a Diagnostics,
}

/// Writes one configuration per line after a `#` header, plus a JSON sidecar.
pub fn sample(config: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    let model = config.model()?;
    let batch = draw(config, &model)?;
    create_dir(out)?;
    let path = out.join(&config.output.samples);
    let mut file = std::io::BufWriter::new(fs::File::create(&path).map_err(io(&path))?);
    writeln!(
        file,
        "# papangelou samples version={} count={} seed={} {}",
        crate::config::SCHEMA_VERSION,
        batch.len(),
        batch.seed(),
        batch.descriptor()
    )
    .map_err(io(&path))?;
    for xi in batch.configurations() {
        writeln!(file, "{}", xi.to_line()).map_err(io(&path))?;
    }
    file.flush().map_err(io(&path))?;
    let mut meta = path.clone().into_os_string();
    meta.push(".meta.json");
    write_json(
        Path::new(&meta),
        &SampleMeta {
            version: crate::config::SCHEMA_VERSION,
            count: batch.len(),
            seed: batch.seed(),
            descriptor: batch.descriptor(),
            correlated: batch.is_correlated(),
            diagnostics: batch.diagnostics(),
        },
    )?;
    Ok(path)
}

fn sites(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

#[derive(Serialize)]
struct Subset {
    subset: Vec<usize>,
    probability: f64,
}

#[derive(Serialize)]
struct Correlation {
    alpha: Vec<usize>,
    rho: f64,
}

#[derive(Serialize)]
struct Conditional {
    x: Vec<usize>,
    xi: Vec<usize>,
    /// `null` when `ξ` has zero weight.
    value: Option<f64>,
}

#[derive(Serialize)]
struct Oracle {
    version: u32,
    family: &'static str,
    sites: usize,
    weights: Vec<f64>,
    probabilities: Vec<Subset>,
    correlations: Vec<Correlation>,
    papangelou: Vec<Conditional>,
    compound_pairs: Option<Vec<Conditional>>,
}

pub fn oracle(config: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    let model = config.model()?;
    if model.ground().site_count().is_none() {
        return Err(CliError::Usage("unsupported: the oracle needs a discrete model".into()));
    }
    require_exact(&model)?;
    let dist: ExactDistribution<f64> = model.exact_distribution().map_err(|e| CliError::Usage(e.to_string()))?;
    let m = dist.site_count();
    let masks = 0..(1u32 << m);
    let probabilities = masks
        .clone()
        .map(|mask| Subset {
            subset: sites(mask),
            probability: dist.probability(mask),
        })
        .collect();
    let correlations = masks
        .clone()
        .filter(|a| (1..=3).contains(&a.count_ones()))
        .map(|a| Correlation {
            alpha: sites(a),
            rho: dist.correlation(a),
        })
        .collect();
    let conditional = |alpha: u32, xi: u32| {
        let z = Configuration::from_mask(xi);
        let value = model.compound_papangelou(&Configuration::from_mask(alpha), &z).ok();
        Conditional {
            x: sites(alpha),
            xi: sites(xi),
            value,
        }
    };
    let papangelou = masks
        .clone()
        .flat_map(|xi| (0..m).filter(move |x| xi & (1 << x) == 0).map(move |x| (1u32 << x, xi)))
        .map(|(a, xi)| conditional(a, xi))
        .collect();
    let compound_pairs = (m <= ORACLE_COMPOUND_SITES).then(|| {
        masks
            .clone()
            .flat_map(|xi| {
                masks
                    .clone()
                    .filter(move |a| a.count_ones() == 2 && a & xi == 0)
                    .map(move |a| (a, xi))
            })
            .map(|(a, xi)| conditional(a, xi))
            .collect()
    });
    create_dir(out)?;
    let path = out.join(&config.output.oracle);
    write_json(
        &path,
        &Oracle {
            version: crate::config::SCHEMA_VERSION,
            family: model.family().name(),
            sites: m,
            weights: model.ground().weights().expect("discrete").to_vec(),
            probabilities,
            correlations,
            papangelou,
            compound_pairs,
        },
    )?;
    Ok(path)
}
