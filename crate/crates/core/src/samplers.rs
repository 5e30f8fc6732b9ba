//! Exact inversion sampling on discrete spaces, direct Poisson sampling and
//! spatial birth–death chains on windows.
//!
//! Every replica (a block of discrete draws, one Poisson configuration, one
//! chain) owns a ChaCha stream `stream = replica index` derived from the root
//! seed, and results are concatenated in replica order, so batches are
//! bit-identical for any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::configuration::{Configuration, GroundSpace, Point};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::{Activity, ExactDistribution, Family, Model};
use crate::scalar::Scalar;

/// Draws per replica for exact inversion sampling.
const DISCRETE_BLOCK: usize = 4096;
/// Default number of independent birth–death chains.
pub const DEFAULT_CHAINS: usize = 8;
/// Significance level of the goodness-of-fit check.
pub const GOF_SIGNIFICANCE: f64 = 1e-4;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub birth_acceptance: Option<f64>,
    pub death_acceptance: Option<f64>,
    pub burn_in: Option<usize>,
    pub steps_per_sample: Option<usize>,
    pub chains: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch<S> {
    configurations: Vec<Configuration<S>>,
    seed: u64,
    descriptor: String,
    diagnostics: Diagnostics,
    correlated: bool,
}

impl<S: Scalar> SampleBatch<S> {
    /// Wraps externally produced configurations, assumed independent.
    pub fn from_configurations(
        configurations: Vec<Configuration<S>>,
        seed: u64,
        descriptor: impl Into<String>,
    ) -> Self {
        Self {
            configurations,
            seed,
            descriptor: descriptor.into(),
            diagnostics: Diagnostics::default(),
            correlated: false,
        }
    }

    pub fn configurations(&self) -> &[Configuration<S>] {
        &self.configurations
    }

    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Whether consecutive configurations come from one Markov chain; such
    /// batches use batch-means standard errors.
    pub fn is_correlated(&self) -> bool {
        self.correlated
    }

    /// Image of every configuration under `f`, keeping the metadata.
    pub fn map(&self, f: impl Fn(&Configuration<S>) -> Configuration<S> + Sync + Send) -> Self {
        Self {
            configurations: self.configurations.par_iter().map(&f).collect(),
            ..self.clone()
        }
    }
}

/// Stream `stream` of the root seed.
pub fn replica_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// I.i.d. draws from the exact law of a discrete model, by inversion.
pub fn sample_discrete<S: Scalar>(model: &Model<S>, count: usize, seed: u64) -> Result<SampleBatch<S>> {
    let dist = model.exact_distribution()?;
    Ok(sample_exact(&dist, count, seed, model.family().name()))
}

pub fn sample_exact<S: Scalar>(
    dist: &ExactDistribution<S>,
    count: usize,
    seed: u64,
    descriptor: &str,
) -> SampleBatch<S> {
    let mut cumulative = Vec::with_capacity(dist.probabilities().len());
    let mut acc = 0.0;
    for p in dist.probabilities() {
        acc += p.as_f64();
        cumulative.push(acc);
    }
    let last_support = dist.support().last().unwrap_or(0) as usize;
    let blocks = count.div_ceil(DISCRETE_BLOCK);
    let configurations = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = replica_rng(seed, b as u64);
            let len = DISCRETE_BLOCK.min(count - b * DISCRETE_BLOCK);
            let cumulative = &cumulative;
            (0..len).map(move |_| {
                let u = rng.random::<f64>() * acc;
                let mask = cumulative.partition_point(|c| *c <= u).min(last_support);
                Configuration::from_mask(mask as u32)
            })
        })
        .collect();
    SampleBatch {
        configurations,
        seed,
        descriptor: format!("{descriptor} (exact inversion)"),
        diagnostics: Diagnostics::default(),
        correlated: false,
    }
}

fn uniform_point<S: Scalar>(bounds: &[(S, S)], rng: &mut ChaCha8Rng) -> Point<S> {
    let mut xs = [S::zero(); 3];
    for (x, (lo, hi)) in xs.iter_mut().zip(bounds) {
        *x = *lo + (*hi - *lo) * S::lit(rng.random::<f64>());
    }
    Point::at(&xs[..bounds.len()])
}

/// Poisson process with activity `z` on a window: Poisson total count and
/// i.i.d. locations, thinned when `z` is not constant.
pub fn sample_poisson_window<S: Scalar>(
    ground: &GroundSpace<S>,
    activity: &Activity<S>,
    count: usize,
    seed: u64,
) -> Result<SampleBatch<S>> {
    let GroundSpace::Window { bounds, .. } = ground else {
        return Err(Error::Unsupported("window sampler needs a continuous window".into()));
    };
    let bound = activity.bound();
    let mean = (bound * ground.total_mass()).as_f64();
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::InvalidModel(format!(
            "activity bound {bound} is not integrable on the window"
        )));
    }
    let poisson = if mean > 0.0 {
        Some(Poisson::new(mean).map_err(|e| Error::InvalidModel(e.to_string()))?)
    } else {
        None
    };
    let thinning = matches!(activity, Activity::Function { .. });
    let configurations = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, i as u64);
            let n = poisson.as_ref().map_or(0, |p| p.sample(&mut rng) as usize);
            let mut points = Vec::with_capacity(n);
            for _ in 0..n {
                let x = uniform_point(bounds, &mut rng);
                let keep = !thinning || S::lit(rng.random::<f64>()) * bound < activity.at(&x);
                if keep {
                    points.push(x);
                }
            }
            Configuration::new(points).expect("continuous draws are distinct")
        })
        .collect();
    Ok(SampleBatch {
        configurations,
        seed,
        descriptor: format!("poisson window (mean count {mean})"),
        diagnostics: Diagnostics::default(),
        correlated: false,
    })
}

/// Parameters of the birth–death chains; `None` selects the defaults
/// `steps = 50 (E|ξ| + 1)` and `burn_in = 100 steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirthDeath {
    pub steps_per_sample: Option<usize>,
    pub burn_in: Option<usize>,
    pub chains: usize,
}

impl Default for BirthDeath {
    fn default() -> Self {
        Self {
            steps_per_sample: None,
            burn_in: None,
            chains: DEFAULT_CHAINS,
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Moves {
    births: u64,
    births_accepted: u64,
    deaths: u64,
    deaths_accepted: u64,
}

/// One Metropolis–Hastings birth–death step with a 1/2–1/2 move mix.
fn birth_death_step<S: Scalar>(
    model: &Model<S>,
    bounds: &[(S, S)],
    mass: S,
    xi: Configuration<S>,
    rng: &mut ChaCha8Rng,
    moves: &mut Moves,
) -> Configuration<S> {
    let n = S::from_count(xi.len());
    if rng.random::<bool>() {
        moves.births += 1;
        let x = uniform_point(bounds, rng);
        let c = model.papangelou(&x, &xi).unwrap_or(S::zero());
        let ratio = mass * c / (n + S::one());
        if S::lit(rng.random::<f64>()) < ratio {
            moves.births_accepted += 1;
            return xi.with(x);
        }
        xi
    } else {
        if xi.is_empty() {
            return xi;
        }
        moves.deaths += 1;
        let x = xi.points()[rng.random_range(0..xi.len())];
        let rest = xi.without(&x);
        let c = model.papangelou(&x, &rest).unwrap_or(S::zero());
        let denominator = mass * c;
        // c = 0 is the limit of an infinite ratio: always accept
        if denominator <= S::zero() || S::lit(rng.random::<f64>()) < n / denominator {
            moves.deaths_accepted += 1;
            return rest;
        }
        xi
    }
}

/// Spatial birth–death Metropolis–Hastings chains targeting a Poisson or
/// pairwise Gibbs model on a window.
pub fn sample_gibbs_birth_death<S: Scalar>(
    model: &Model<S>,
    count: usize,
    params: BirthDeath,
    seed: u64,
) -> Result<SampleBatch<S>> {
    let GroundSpace::Window { bounds, .. } = model.ground() else {
        return Err(Error::Unsupported(
            "birth-death sampler needs a continuous window".into(),
        ));
    };
    let activity = match model.family() {
        Family::Poisson { activity } | Family::Gibbs { activity, .. } => activity,
        Family::Determinantal { .. } => {
            return Err(Error::Unsupported(
                "determinantal models are sampled exactly on discrete spaces".into(),
            ))
        }
    };
    let mass = model.ground().total_mass();
    let expected = (activity.bound() * mass).as_f64();
    let steps = params
        .steps_per_sample
        .unwrap_or_else(|| (50.0 * (expected + 1.0)).ceil() as usize)
        .max(1);
    let burn_in = params.burn_in.unwrap_or(100 * steps);
    let chains = params.chains.clamp(1, count.max(1));
    let per_chain = |c: usize| count / chains + usize::from(c < count % chains);
    let runs: Vec<(Vec<Configuration<S>>, Moves)> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = replica_rng(seed, c as u64);
            let mut moves = Moves::default();
            let mut xi = Configuration::empty();
            for _ in 0..burn_in {
                xi = birth_death_step(model, bounds, mass, xi, &mut rng, &mut moves);
            }
            let mut out = Vec::with_capacity(per_chain(c));
            for _ in 0..per_chain(c) {
                for _ in 0..steps {
                    xi = birth_death_step(model, bounds, mass, xi, &mut rng, &mut moves);
                }
                out.push(xi.clone());
            }
            (out, moves)
        })
        .collect();
    let mut total = Moves::default();
    let mut configurations = Vec::with_capacity(count);
    for (out, m) in runs {
        configurations.extend(out);
        total.births += m.births;
        total.births_accepted += m.births_accepted;
        total.deaths += m.deaths;
        total.deaths_accepted += m.deaths_accepted;
    }
    let rate = |a: u64, n: u64| (n > 0).then(|| a as f64 / n as f64);
    Ok(SampleBatch {
        configurations,
        seed,
        descriptor: format!("{} birth-death ({chains} chains)", model.family().name()),
        diagnostics: Diagnostics {
            birth_acceptance: rate(total.births_accepted, total.births),
            death_acceptance: rate(total.deaths_accepted, total.deaths),
            burn_in: Some(burn_in),
            steps_per_sample: Some(steps),
            chains,
        },
        correlated: true,
    })
}

/// Transition matrix over subset masks of the birth–death kernel on a discrete
/// space, where a birth proposes site `x` with probability `λ(x) / Λ`.
pub fn birth_death_transition_matrix<S: Scalar>(dist: &ExactDistribution<S>) -> Matrix<S> {
    let ground = dist.ground();
    let m = dist.site_count();
    let states = 1usize << m;
    let mass = ground.total_mass();
    let half = S::lit(0.5);
    let mut p = Matrix::zeros(states);
    for a in 0..states {
        let size = S::from_count((a as u32).count_ones() as usize);
        let mut stay = S::one();
        for x in 0..m {
            let bit = 1usize << x;
            if a & bit == 0 {
                let c = dist.papangelou(x, a as u32);
                let prob = half * ground.site_weight(x) / mass * (mass * c / (size + S::one())).min(S::one());
                p[(a, a | bit)] = prob;
                stay -= prob;
            } else {
                let c = dist.papangelou(x, (a & !bit) as u32);
                let denominator = mass * c;
                let accept = if denominator <= S::zero() {
                    S::one()
                } else {
                    (size / denominator).min(S::one())
                };
                let prob = half / size * accept;
                p[(a, a & !bit)] = prob;
                stay -= prob;
            }
        }
        p[(a, a)] = stay;
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub pass: bool,
}

/// Pearson chi-square test of a discrete batch against its exact law; cells
/// with expected count below 5 are pooled.
pub fn goodness_of_fit<S: Scalar>(batch: &SampleBatch<S>, dist: &ExactDistribution<S>) -> Result<GoodnessOfFit> {
    let mut observed = vec![0usize; dist.probabilities().len()];
    for xi in batch.configurations() {
        let mask = xi
            .site_mask()
            .ok_or_else(|| Error::Unsupported("goodness of fit needs discrete samples".into()))?;
        observed[mask as usize] += 1;
    }
    let n = batch.len() as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    let mut outside = 0usize;
    for (mask, p) in dist.probabilities().iter().enumerate() {
        let expected = p.as_f64() * n;
        let obs = observed[mask] as f64;
        if expected == 0.0 {
            outside += observed[mask];
        } else if expected < 5.0 {
            pooled.0 += obs;
            pooled.1 += expected;
        } else {
            cells.push((obs, expected));
        }
    }
    if pooled.1 > 0.0 {
        cells.push(pooled);
    }
    if outside > 0 {
        return Ok(GoodnessOfFit {
            statistic: f64::INFINITY,
            degrees_of_freedom: cells.len().saturating_sub(1),
            p_value: 0.0,
            pass: false,
        });
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidModel(e.to_string()))?;
        1.0 - chi.cdf(statistic)
    };
    Ok(GoodnessOfFit {
        statistic,
        degrees_of_freedom: dof,
        p_value,
        pass: p_value >= GOF_SIGNIFICANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::PairPotential;

    #[test]
    fn empty_batches() {
        let m = Model::poisson(GroundSpace::sites(2).unwrap(), Activity::Constant(1.0)).unwrap();
        assert!(sample_discrete(&m, 0, 1).unwrap().is_empty());
        let w = GroundSpace::unit_interval();
        let b = sample_poisson_window(&w, &Activity::Constant(0.0), 50, 3).unwrap();
        assert!(b.configurations().iter().all(Configuration::is_empty));
    }

    #[test]
    fn zero_activity_chain_stays_empty() {
        let m = Model::poisson(GroundSpace::unit_interval(), Activity::Constant(0.0)).unwrap();
        let params = BirthDeath {
            steps_per_sample: Some(10),
            burn_in: Some(10),
            chains: 2,
        };
        let b = sample_gibbs_birth_death(&m, 20, params, 9).unwrap();
        assert!(b.configurations().iter().all(Configuration::is_empty));
    }

    #[test]
    fn reproducible_across_thread_pools() {
        let model = Model::gibbs(
            GroundSpace::unit_interval(),
            Activity::Constant(3.0),
            PairPotential::hard_core(0.05),
        )
        .unwrap();
        let params = BirthDeath {
            steps_per_sample: Some(20),
            burn_in: Some(200),
            chains: 4,
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_gibbs_birth_death(&model, 40, params, 17).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn hard_core_samples_respect_radius() {
        let model = Model::gibbs(
            GroundSpace::unit_interval(),
            Activity::Constant(8.0),
            PairPotential::hard_core(0.1),
        )
        .unwrap();
        let b = sample_gibbs_birth_death(&model, 200, BirthDeath::default(), 5).unwrap();
        for xi in b.configurations() {
            for (i, x) in xi.points().iter().enumerate() {
                for y in &xi.points()[i + 1..] {
                    assert!(x.coords().unwrap().distance(y.coords().unwrap()) >= 0.1);
                }
            }
        }
        assert!(b.diagnostics().birth_acceptance.unwrap() > 0.0);
    }

    #[test]
    fn transition_rows_are_stochastic() {
        let m = Model::poisson(
            GroundSpace::discrete(vec![0.5, 1.0, 2.0]).unwrap(),
            Activity::Constant(0.7),
        )
        .unwrap();
        let p = birth_death_transition_matrix(&m.exact_distribution().unwrap());
        for a in 0..8 {
            let row: f64 = (0..8).map(|b| p[(a, b)]).sum();
            assert!((row - 1.0).abs() < 1e-14);
            assert!((0..8).all(|b| p[(a, b)] >= 0.0));
        }
    }
}
