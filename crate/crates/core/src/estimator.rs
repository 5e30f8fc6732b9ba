//! Expectations under an exact law or a sample batch.

use rayon::prelude::*;

use crate::configuration::Configuration;
use crate::models::ExactDistribution;
use crate::report::Estimate;
use crate::samplers::SampleBatch;
use crate::scalar::{ordered_sum, Scalar};

/// Source of `μ`-expectations.
#[derive(Clone, Copy, Debug)]
pub enum Law<'a, S> {
    Exact(&'a ExactDistribution<S>),
    Samples(&'a SampleBatch<S>),
}

impl<'a, S: Scalar> Law<'a, S> {
    pub fn is_exact(&self) -> bool {
        matches!(self, Law::Exact(_))
    }

    /// A configuration representative of the law, used for resolution checks.
    pub fn representative(&self) -> Configuration<S> {
        match self {
            Law::Exact(d) => d
                .support()
                .max_by_key(|m| m.count_ones())
                .map(Configuration::from_mask)
                .unwrap_or_default(),
            Law::Samples(b) => b
                .configurations()
                .iter()
                .max_by_key(|c| c.len())
                .cloned()
                .unwrap_or_default(),
        }
    }

    /// Evaluates a vector of statistics on every configuration of the law.
    /// Row order is fixed (support masks ascending, or sample order), so
    /// every aggregate is reproducible regardless of the thread count.
    pub fn evaluate<F>(&self, f: F) -> Evaluations<S>
    where
        F: Fn(&Configuration<S>) -> Vec<S> + Sync,
    {
        match self {
            Law::Exact(d) => {
                let masks: Vec<u32> = d.support().collect();
                let rows = masks.par_iter().map(|&m| f(&Configuration::from_mask(m))).collect();
                Evaluations {
                    rows,
                    probabilities: Some(masks.iter().map(|&m| d.probability(m)).collect()),
                    correlated: false,
                }
            }
            Law::Samples(b) => Evaluations {
                rows: b.configurations().par_iter().map(&f).collect(),
                probabilities: None,
                correlated: b.is_correlated(),
            },
        }
    }

    pub fn expect<F>(&self, f: F) -> Estimate<S>
    where
        F: Fn(&Configuration<S>) -> S + Sync,
    {
        self.evaluate(|xi| vec![f(xi)]).mean(0)
    }
}

/// Per-configuration statistics with the weights needed to average them.
#[derive(Clone, Debug)]
pub struct Evaluations<S> {
    rows: Vec<Vec<S>>,
    probabilities: Option<Vec<S>>,
    correlated: bool,
}

impl<S: Scalar> Evaluations<S> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn mean(&self, column: usize) -> Estimate<S> {
        let mut coeffs = vec![S::zero(); column + 1];
        coeffs[column] = S::one();
        self.combination(&coeffs)
    }

    /// Estimate of `E[Σ_j a_j X_j]`; the standard error accounts for the
    /// correlation between columns because it is computed per row.
    pub fn combination(&self, coeffs: &[S]) -> Estimate<S> {
        let values: Vec<S> = self
            .rows
            .iter()
            .map(|r| ordered_sum(coeffs.iter().zip(r).map(|(a, x)| *a * *x)))
            .collect();
        match &self.probabilities {
            Some(p) => Estimate::exact(ordered_sum(p.iter().zip(&values).map(|(p, v)| *p * *v))),
            None if self.correlated => batch_means(&values),
            None => iid_mean(&values),
        }
    }
}

pub(crate) fn iid_mean<S: Scalar>(values: &[S]) -> Estimate<S> {
    let n = values.len();
    if n == 0 {
        return Estimate::new(S::zero(), S::infinity());
    }
    let nf = S::from_count(n);
    let mean = ordered_sum(values.iter().copied()) / nf;
    if n == 1 {
        return Estimate::new(mean, S::infinity());
    }
    let var = ordered_sum(values.iter().map(|v| (*v - mean) * (*v - mean))) / S::from_count(n - 1);
    Estimate::new(mean, (var / nf).sqrt())
}

/// Batch-means estimate with `⌊√n⌋` contiguous batches.
pub(crate) fn batch_means<S: Scalar>(values: &[S]) -> Estimate<S> {
    let n = values.len();
    let size = (n as f64).sqrt().floor() as usize;
    if size < 2 {
        return iid_mean(values);
    }
    let batches: Vec<S> = values
        .chunks_exact(size)
        .map(|c| ordered_sum(c.iter().copied()) / S::from_count(size))
        .collect();
    let overall = ordered_sum(values.iter().copied()) / S::from_count(n);
    Estimate::new(overall, iid_mean(&batches).stderr)
}
