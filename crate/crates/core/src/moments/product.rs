use crate::configuration::{point_sum, Configuration, GroundSpace, Point};
use crate::error::{Error, Result};
use crate::estimator::Law;
use crate::partitions::{enumerate_partitions, Partition};
use crate::report::{Estimate, IdentityReport, Term};
use crate::scalar::{ordered_sum, Scalar};

use super::{integrate_tuples, Evaluator, ProcessFunction, StateFunction, MAX_ORDER};

/// `u^P(x, ξ) = Π_l Π_{i∈P_l} u_i(x_l, ξ)`.
pub fn partition_product<S: Scalar>(
    us: &[ProcessFunction<S>],
    p: &Partition,
    xs: &[Point<S>],
    xi: &Configuration<S>,
) -> S {
    debug_assert_eq!(us.len(), p.n());
    debug_assert_eq!(xs.len(), p.block_count());
    let mut acc = S::one();
    for (block, x) in p.blocks().iter().zip(xs) {
        for &i in block {
            acc *= us[i - 1].eval(x, xi);
        }
    }
    acc
}

/// Partitions of `{1..n}` grouped by block count, `k = 1..n`.
pub(crate) fn partitions_by_blocks(n: usize) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for k in 1..=n {
        out.extend(enumerate_partitions(n, Some(k))?);
    }
    Ok(out)
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::PartitionBound { n, max: MAX_ORDER });
    }
    Ok(())
}

/// `∫ v_1^P(x) ... ρ(x) λ_k(dx)` for every partition, with `ρ` supplied by
/// the caller (correlation functions of the law under study).
pub fn correlation_partition_sum<S, R>(
    ground: &GroundSpace<S>,
    vs: &[ProcessFunction<S>],
    rho: R,
    nodes: usize,
) -> Result<Vec<(String, S)>>
where
    S: Scalar,
    R: Fn(&[Point<S>]) -> S + Sync,
{
    check_order(vs.len())?;
    let empty = Configuration::empty();
    Ok(partitions_by_blocks(vs.len())?
        .iter()
        .map(|p| {
            let k = p.block_count();
            let value = integrate_tuples(ground, k, k, nodes, |x| partition_product(vs, p, x, &empty) * rho(x));
            (p.to_string(), value)
        })
        .collect())
}

impl<S: Scalar> Evaluator<'_, S> {
    fn product_terms(
        &self,
        f: &StateFunction<S>,
        us: &[ProcessFunction<S>],
    ) -> Result<(Vec<Partition>, impl Fn(&Configuration<S>, usize) -> Vec<S> + Sync + '_)> {
        check_order(us.len())?;
        let parts = partitions_by_blocks(us.len())?;
        let intensity = self.intensity;
        let ground = self.ground();
        let f = f.clone();
        let us = us.to_vec();
        let owned = parts.clone();
        let rhs = move |xi: &Configuration<S>, nodes: usize| {
            owned
                .iter()
                .map(|p| {
                    let k = p.block_count();
                    integrate_tuples(ground, k, k, nodes, |x| {
                        let c = intensity.c_hat(x, xi);
                        if c == S::zero() {
                            return S::zero();
                        }
                        let eta = xi.with_all(x);
                        c * f.eval(&eta) * partition_product(&us, p, x, &eta)
                    })
                })
                .collect()
        };
        Ok((parts, rhs))
    }

    /// `E[F Π_k ∫ u_k dξ]`.
    pub fn moment_product_lhs(&self, f: &StateFunction<S>, us: &[ProcessFunction<S>]) -> Result<Estimate<S>> {
        check_order(us.len())?;
        Ok(self.law.expect(|xi| product_lhs(f, us, xi)))
    }

    /// Partition expansion of `E[F Π_k ∫ u_k dξ]`, with one term per partition.
    pub fn moment_product_rhs(
        &self,
        f: &StateFunction<S>,
        us: &[ProcessFunction<S>],
    ) -> Result<(Estimate<S>, Vec<Term<S>>)> {
        let (parts, rhs) = self.product_terms(f, us)?;
        let refs: Vec<&ProcessFunction<S>> = us.iter().collect();
        let free = self.configuration_free(&refs, Some(f));
        let nodes = self.nodes();
        let terms: Vec<Estimate<S>> = if free {
            rhs(&Configuration::empty(), nodes)
                .into_iter()
                .map(Estimate::exact)
                .collect()
        } else {
            let rows = self.law.evaluate(|xi| rhs(xi, nodes));
            (0..parts.len()).map(|j| rows.mean(j)).collect()
        };
        let total = terms.iter().fold(Estimate::exact(S::zero()), |acc, t| acc.add(*t));
        let labelled = parts
            .iter()
            .zip(terms)
            .map(|(p, t)| Term::new(p.to_string(), t))
            .collect();
        Ok((total, labelled))
    }

    pub fn check_moment_product(&self, f: &StateFunction<S>, us: &[ProcessFunction<S>]) -> Result<IdentityReport<S>> {
        let (parts, rhs) = self.product_terms(f, us)?;
        let refs: Vec<&ProcessFunction<S>> = us.iter().collect();
        let free = self.configuration_free(&refs, Some(f));
        let labels = parts.iter().map(Partition::to_string).collect();
        let name = format!("moment-product(n={}, F={})", us.len(), f.label());
        let mut report = self.compare(&name, |xi| product_lhs(f, us, xi), rhs, labels, free);
        if let Some(cap) = f.cap() {
            report = report.with_note(format!("F truncated at {cap}"));
        }
        Ok(report)
    }

    /// `E[(∫ u dξ)^n]` against its partition expansion.
    pub fn check_moment_power(
        &self,
        f: &StateFunction<S>,
        u: &ProcessFunction<S>,
        n: usize,
    ) -> Result<IdentityReport<S>> {
        let us = vec![u.clone(); n];
        let mut report = self.check_moment_product(f, &us)?;
        report.identity = format!("moment-power(n={n}, u={}, F={})", u.label(), f.label());
        Ok(report)
    }

    /// Product moments of deterministic functions against the partition sum
    /// of the correlation functions. Exact laws use tabulated correlations;
    /// sample laws estimate `E[ĉ]` inside the integral.
    pub fn check_correlation_moments(&self, vs: &[ProcessFunction<S>]) -> Result<IdentityReport<S>> {
        check_order(vs.len())?;
        if vs.iter().any(|v| !v.is_deterministic()) {
            return Err(Error::InvalidModel(
                "correlation moments take deterministic functions".into(),
            ));
        }
        let name = format!("correlation-moment(n={})", vs.len());
        let one = StateFunction::one();
        if let Law::Exact(dist) = self.law {
            let lhs = self.law.expect(|xi| product_lhs(&one, vs, xi)).value;
            let terms = correlation_partition_sum(self.ground(), vs, |x| exact_rho(dist, x), self.nodes())?;
            let rhs = ordered_sum(terms.iter().map(|t| t.1));
            let terms = terms
                .into_iter()
                .map(|(l, v)| Term::new(l, Estimate::exact(v)))
                .collect();
            return Ok(IdentityReport::exact(name, lhs, rhs, self.tolerance).with_terms(terms));
        }
        let mut report = self.check_moment_product(&one, vs)?;
        report.identity = name;
        Ok(report)
    }

    /// `Cov(F, (∫ v dξ)^n) = rhs(F) − E[F] rhs(1)`, compared with the direct
    /// covariance.
    pub fn check_covariance(
        &self,
        f: &StateFunction<S>,
        v: &ProcessFunction<S>,
        n: usize,
    ) -> Result<IdentityReport<S>> {
        let us = vec![v.clone(); n];
        let one = StateFunction::one();
        let (_, rhs_f) = self.product_terms(f, &us)?;
        let (_, rhs_1) = self.product_terms(&one, &us)?;
        let nodes = self.nodes();
        let name = format!("covariance(n={n}, v={}, F={})", v.label(), f.label());
        // rows: F X^n, rhs(F), X^n, rhs(1), F
        let rows = self.law.evaluate(|xi| {
            let x = point_sum(|y, xi| v.eval(y, xi), xi).powi(n as i32);
            let fx = f.eval(xi);
            vec![
                fx * x,
                ordered_sum(rhs_f(xi, nodes)),
                x,
                ordered_sum(rhs_1(xi, nodes)),
                fx,
            ]
        });
        let mean_f = rows.mean(4).value;
        let z = S::zero();
        let one_s = S::one();
        let direct = rows.combination(&[one_s, z, -mean_f, z, z]);
        let formula = rows.combination(&[z, one_s, z, -mean_f, z]);
        if self.law.is_exact() {
            return Ok(IdentityReport::exact(name, direct.value, formula.value, self.tolerance));
        }
        let paired = rows.combination(&[one_s, -one_s, -mean_f, mean_f, z]).stderr;
        Ok(IdentityReport::monte_carlo(
            name,
            direct,
            formula,
            Some(paired),
            self.z_crit,
        ))
    }
}

pub(crate) fn product_lhs<S: Scalar>(f: &StateFunction<S>, us: &[ProcessFunction<S>], xi: &Configuration<S>) -> S {
    us.iter()
        .fold(f.eval(xi), |acc, u| acc * point_sum(|x, xi| u.eval(x, xi), xi))
}

/// Tabulated `ρ` of an exact law at a tuple of sites (0 for repeated sites).
pub(crate) fn exact_rho<S: Scalar>(dist: &crate::models::ExactDistribution<S>, x: &[Point<S>]) -> S {
    let mut mask = 0u32;
    for p in x {
        let Some(i) = p.site() else { return S::zero() };
        if mask >> i & 1 == 1 {
            return S::zero();
        }
        mask |= 1 << i;
    }
    dist.correlation(mask)
}
