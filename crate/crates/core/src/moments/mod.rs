//! Both sides of the moment identities of point processes with Papangelou
//! intensity: exact on discrete spaces, Monte Carlo over configurations
//! combined with tuple quadrature on windows.
//!
//! Integrals over `E^k` follow one convention throughout. On discrete spaces
//! they run over tuples of pairwise distinct sites (a repeated site is not a
//! null event there). On windows, axis `l` of a tuple uses its own midpoint
//! grid; the grids have node counts with distinct 2-adic valuations, so no two
//! coordinates of a tuple ever coincide.

mod divergence;
mod functions;
mod gnz;
mod product;

use rayon::prelude::*;

pub use divergence::{compensated_integral, difference_op, divergence, g_k_factor};
pub use functions::{ProcessFunction, SetFunction, StateFunction};
pub(crate) use product::partitions_by_blocks;
pub use product::{correlation_partition_sum, partition_product};

use crate::configuration::{Configuration, GroundSpace, Point};
use crate::estimator::{Evaluations, Law};
use crate::models::Intensity;
use crate::report::{Estimate, IdentityReport, Term};
use crate::scalar::{ordered_sum, Scalar};

/// Largest moment order accepted by the evaluators.
pub const MAX_ORDER: usize = 5;
/// Default relative tolerance of exact checks.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Default two-sided critical value of Monte Carlo checks.
pub const Z_CRIT: f64 = 4.0;
/// Relative change tolerated between a quadrature and its refinement.
pub const REFINEMENT_TOLERANCE: f64 = 1e-6;

const AXIS_OFFSETS: [usize; 6] = [0, 1, 2, 4, 8, 16];
const PARALLEL_TUPLES: usize = 1 << 14;

/// Midpoint tuple quadrature on windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadrature {
    /// Nodes per coordinate axis, rounded up to a multiple of 32.
    pub nodes: usize,
    /// Re-evaluate one configuration at twice the nodes and note disagreement.
    pub refine: bool,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            nodes: 64,
            refine: true,
        }
    }
}

/// Evaluates identities for one intensity under one law.
#[derive(Clone, Copy)]
pub struct Evaluator<'a, S> {
    intensity: &'a dyn Intensity<S>,
    law: Law<'a, S>,
    quadrature: Quadrature,
    tolerance: S,
    z_crit: S,
    compound_order: usize,
}

impl<'a, S: Scalar> Evaluator<'a, S> {
    pub fn new(intensity: &'a dyn Intensity<S>, law: Law<'a, S>) -> Self {
        Self {
            intensity,
            law,
            quadrature: Quadrature::default(),
            tolerance: S::lit(EXACT_TOLERANCE),
            z_crit: S::lit(Z_CRIT),
            compound_order: 4,
        }
    }

    pub fn with_quadrature(mut self, quadrature: Quadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    /// Relative tolerance of exact-mode checks.
    pub fn with_tolerance(mut self, tolerance: S) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_z_crit(mut self, z_crit: S) -> Self {
        self.z_crit = z_crit;
        self
    }

    /// Largest subset size of the compound GNZ sums on windows.
    pub fn with_compound_order(mut self, order: usize) -> Self {
        self.compound_order = order;
        self
    }

    pub fn intensity(&self) -> &'a dyn Intensity<S> {
        self.intensity
    }

    pub fn law(&self) -> Law<'a, S> {
        self.law
    }

    pub fn ground(&self) -> &'a GroundSpace<S> {
        self.intensity.ground()
    }

    pub(crate) fn nodes(&self) -> usize {
        self.quadrature.nodes
    }

    /// `∫_{E^k} f(x) λ(dx_1)...λ(dx_k)`; on discrete spaces the first
    /// `distinct` coordinates are pairwise distinct, the rest are free.
    pub fn integrate<F>(&self, k: usize, distinct: usize, nodes: usize, f: F) -> S
    where
        F: Fn(&[Point<S>]) -> S + Sync,
    {
        integrate_tuples(self.ground(), k, distinct, nodes, f)
    }

    /// Whether the right-hand side is the same for every configuration, so
    /// it can be evaluated once at `ξ = ∅`.
    fn configuration_free(&self, us: &[&ProcessFunction<S>], f: Option<&StateFunction<S>>) -> bool {
        !self.ground().is_discrete()
            && self.intensity.is_configuration_free()
            && us.iter().all(|u| u.is_deterministic())
            && f.is_none_or(StateFunction::is_constant)
    }

    /// Compares a per-configuration left side with a right side given as a
    /// list of per-configuration terms. Monte Carlo standard errors are paired.
    pub(crate) fn compare<L, R>(
        &self,
        name: &str,
        lhs: L,
        rhs: R,
        labels: Vec<String>,
        configuration_free: bool,
    ) -> IdentityReport<S>
    where
        L: Fn(&Configuration<S>) -> S + Sync,
        R: Fn(&Configuration<S>, usize) -> Vec<S> + Sync,
    {
        let nodes = self.nodes();
        let width = labels.len();
        let (lhs_est, terms, paired): (Estimate<S>, Vec<Estimate<S>>, Option<S>) = if configuration_free {
            let lhs_est = self.law.expect(&lhs);
            let terms = rhs(&Configuration::empty(), nodes)
                .into_iter()
                .map(Estimate::exact)
                .collect();
            (lhs_est, terms, None)
        } else {
            let rows: Evaluations<S> = self.law.evaluate(|xi| {
                let mut row = Vec::with_capacity(width + 1);
                row.push(lhs(xi));
                row.extend(rhs(xi, nodes));
                row
            });
            let terms = (1..=width).map(|j| rows.mean(j)).collect();
            let mut diff = vec![-S::one(); width + 1];
            diff[0] = S::one();
            (rows.mean(0), terms, Some(rows.combination(&diff).stderr))
        };
        let rhs_value = ordered_sum(terms.iter().map(|t| t.value));
        let rhs_se = ordered_sum(terms.iter().map(|t| t.stderr * t.stderr)).sqrt();
        let term_list = labels
            .iter()
            .zip(&terms)
            .map(|(l, t)| Term::new(l.clone(), *t))
            .collect();
        let mut report = if self.law.is_exact() {
            IdentityReport::exact(name, lhs_est.value, rhs_value, self.tolerance)
        } else {
            IdentityReport::monte_carlo(name, lhs_est, Estimate::new(rhs_value, rhs_se), paired, self.z_crit)
        }
        .with_terms(term_list);
        if !self.ground().is_discrete() && self.quadrature.refine {
            report = self.refinement_note(report, &rhs, configuration_free);
        }
        report
    }

    fn refinement_note<R>(&self, report: IdentityReport<S>, rhs: &R, configuration_free: bool) -> IdentityReport<S>
    where
        R: Fn(&Configuration<S>, usize) -> Vec<S> + Sync,
    {
        let xi = if configuration_free {
            Configuration::empty()
        } else {
            self.law.representative()
        };
        let coarse = ordered_sum(rhs(&xi, self.nodes()));
        let fine = ordered_sum(rhs(&xi, 2 * self.nodes()));
        let change = (fine - coarse).abs() / (S::one() + fine.abs());
        if change > S::lit(REFINEMENT_TOLERANCE) {
            report.with_note(format!(
                "quadrature resolution warning: right side changes by {:e} (relative) when refining to {} nodes",
                change.as_f64(),
                2 * round_nodes(self.nodes())
            ))
        } else {
            report.with_note(format!("quadrature refinement agrees within {:e}", change.as_f64()))
        }
    }
}

fn round_nodes(n: usize) -> usize {
    n.max(1).div_ceil(32) * 32
}

/// Nodes and weights of axis `axis` of a tuple quadrature.
fn axis_nodes<S: Scalar>(ground: &GroundSpace<S>, axis: usize, nodes: usize) -> Vec<(Point<S>, S)> {
    match ground {
        GroundSpace::Discrete { weights } => (0..weights.len()).map(|i| (Point::Site(i), weights[i])).collect(),
        GroundSpace::Window { bounds, density } => {
            assert!(axis < AXIS_OFFSETS.len(), "tuple quadrature supports at most 6 axes");
            let n = round_nodes(nodes) + AXIS_OFFSETS[axis];
            let steps: Vec<S> = bounds.iter().map(|(lo, hi)| (*hi - *lo) / S::from_count(n)).collect();
            let weight = steps.iter().fold(*density, |acc, h| acc * *h);
            let d = bounds.len();
            let total = n.pow(d as u32);
            (0..total)
                .map(|mut flat| {
                    let mut xs = [S::zero(); 3];
                    for j in 0..d {
                        let i = flat % n;
                        flat /= n;
                        xs[j] = bounds[j].0 + (S::from_count(i) + S::lit(0.5)) * steps[j];
                    }
                    (Point::at(&xs[..d]), weight)
                })
                .collect()
        }
    }
}

pub(crate) fn integrate_tuples<S, F>(ground: &GroundSpace<S>, k: usize, distinct: usize, nodes: usize, f: F) -> S
where
    S: Scalar,
    F: Fn(&[Point<S>]) -> S + Sync,
{
    if k == 0 {
        return f(&[]);
    }
    let axes: Vec<Vec<(Point<S>, S)>> = (0..k).map(|l| axis_nodes(ground, l, nodes)).collect();
    let discrete = ground.is_discrete();
    let tuples: usize = axes.iter().map(Vec::len).product();
    let first = |(x, w): &(Point<S>, S)| {
        let mut buf = Vec::with_capacity(k);
        buf.push(*x);
        *w * nest(&axes, 1, distinct, discrete, &mut buf, &f)
    };
    if tuples >= PARALLEL_TUPLES {
        let parts: Vec<S> = axes[0].par_iter().map(first).collect();
        ordered_sum(parts)
    } else {
        ordered_sum(axes[0].iter().map(first))
    }
}

fn nest<S: Scalar, F: Fn(&[Point<S>]) -> S>(
    axes: &[Vec<(Point<S>, S)>],
    depth: usize,
    distinct: usize,
    discrete: bool,
    buf: &mut Vec<Point<S>>,
    f: &F,
) -> S {
    if depth == axes.len() {
        return f(buf);
    }
    let mut acc = S::zero();
    for (x, w) in &axes[depth] {
        if discrete && depth < distinct && buf[..depth].contains(x) {
            continue;
        }
        buf.push(*x);
        acc += *w * nest(axes, depth + 1, distinct, discrete, buf, f);
        buf.pop();
    }
    acc
}
