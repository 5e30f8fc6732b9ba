//! Random shifts of point configurations and the correlation functions of
//! the shifted process.
//!
//! A shift `τ(x, ξ)` moves each point of `ξ`; it must not look at the point
//! being moved (exvisibility) and `τ(·, ξ)` must be invertible. Shifts are
//! declarative so that both properties can be checked structurally as well
//! as numerically.

use crate::configuration::{subsets_of, Configuration, GroundSpace, Point};
use crate::error::{Error, Result};
use crate::estimator::Law;
use crate::linalg::Matrix;
use crate::models::{ExactDistribution, Intensity};
use crate::moments::{
    difference_op, partition_product, partitions_by_blocks, Evaluator, ProcessFunction, StateFunction,
};
use crate::report::{Estimate, IdentityReport, Term};
use crate::scalar::Scalar;

/// Tolerance of pushforward-law comparisons.
pub const PUSHFORWARD_TOLERANCE: f64 = 1e-10;
/// Largest `|α|` compared by [`verify_pushforward_law`].
pub const PUSHFORWARD_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum Shift<S> {
    Identity,
    /// Site `i` moves to `map[i]`.
    Permutation(Vec<usize>),
    /// `x ↦ x + offset` on the first coordinate, wrapped into the window.
    Rotation {
        offset: S,
    },
    /// Swaps sites `a` and `b` when `trigger` is occupied.
    ConditionalSwap {
        a: usize,
        b: usize,
        trigger: usize,
    },
    /// `x ↦ x + step · |ξ ∖ B(x, radius)|` on the first coordinate, wrapped
    /// into the window.
    CountTranslate {
        radius: S,
        step: S,
    },
}

fn wrap<S: Scalar>(ground: &GroundSpace<S>, x: &Point<S>, delta: S) -> Result<Point<S>> {
    let (GroundSpace::Window { bounds, .. }, Point::Loc(c)) = (ground, x) else {
        return Err(Error::Unsupported("translations act on window points".into()));
    };
    let (lo, hi) = bounds[0];
    let len = hi - lo;
    let mut coords = c.as_slice().to_vec();
    let mut t = (coords[0] - lo + delta) % len;
    if t < S::zero() {
        t += len;
    }
    if t >= len {
        t -= len;
    }
    coords[0] = lo + t;
    Ok(Point::at(&coords))
}

/// Equality up to rounding of the wrapped translations.
fn same_location<S: Scalar>(a: &Point<S>, b: &Point<S>) -> bool {
    match (a.coords(), b.coords()) {
        (Some(p), Some(q)) => p.distance(q) <= S::lit(1e-9),
        _ => a == b,
    }
}

impl<S: Scalar> Shift<S> {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Shift::Identity | Shift::Permutation(_) | Shift::Rotation { .. })
    }

    /// Structural check: bijectivity of permutations, a trigger outside the
    /// swapped pair, a positive exclusion radius.
    pub fn validate(&self, ground: &GroundSpace<S>) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        match (self, ground.site_count()) {
            (Shift::Identity, _) => Ok(()),
            (Shift::Permutation(p), Some(m)) => {
                let mut seen = vec![false; m];
                if p.len() != m || p.iter().any(|&j| j >= m || std::mem::replace(&mut seen[j], true)) {
                    return bad(format!("{p:?} is not a permutation of {m} sites"));
                }
                Ok(())
            }
            (Shift::ConditionalSwap { a, b, trigger }, Some(m)) => {
                if *a.max(b).max(trigger) >= m || a == b {
                    return bad(format!("swap ({a} {b}) if {trigger}: sites out of range or equal"));
                }
                if trigger == a || trigger == b {
                    return bad("the trigger site lies in the swapped pair".into());
                }
                Ok(())
            }
            (Shift::Rotation { .. }, None) => Ok(()),
            (Shift::CountTranslate { radius, .. }, None) => {
                if *radius > S::zero() {
                    Ok(())
                } else {
                    bad("exclusion radius must be positive".into())
                }
            }
            _ => Err(Error::Unsupported(format!(
                "{self:?} does not act on this ground space"
            ))),
        }
    }

    /// `τ(x, ξ)`.
    pub fn apply(&self, ground: &GroundSpace<S>, x: &Point<S>, xi: &Configuration<S>) -> Result<Point<S>> {
        match (self, x) {
            (Shift::Identity, _) => Ok(*x),
            (Shift::Permutation(p), Point::Site(i)) => Ok(Point::Site(p[*i])),
            (Shift::ConditionalSwap { a, b, trigger }, Point::Site(i)) => {
                let on = xi.contains(&Point::Site(*trigger));
                Ok(Point::Site(match *i {
                    i if on && i == *a => *b,
                    i if on && i == *b => *a,
                    i => i,
                }))
            }
            (Shift::Rotation { offset }, _) => wrap(ground, x, *offset),
            (Shift::CountTranslate { radius, step }, Point::Loc(c)) => {
                let far = xi
                    .iter()
                    .filter(|y| y.coords().is_some_and(|d| c.distance(d) >= *radius))
                    .count();
                wrap(ground, x, *step * S::from_count(far))
            }
            _ => Err(Error::Unsupported(format!("{self:?} at {x:?}"))),
        }
    }

    /// `τ⁻¹(y, ξ)`: the unique `x` with `τ(x, ξ) = y`.
    pub fn inverse(&self, ground: &GroundSpace<S>, y: &Point<S>, xi: &Configuration<S>) -> Result<Point<S>> {
        match (self, y) {
            (Shift::Identity, _) => Ok(*y),
            (Shift::Permutation(p), Point::Site(j)) => p
                .iter()
                .position(|v| v == j)
                .map(Point::Site)
                .ok_or_else(|| Error::InverseFailure(format!("{y:?}"))),
            // an involution whose trigger is never moved
            (Shift::ConditionalSwap { .. }, _) => self.apply(ground, y, xi),
            (Shift::Rotation { offset }, _) => wrap(ground, y, -*offset),
            (Shift::CountTranslate { step, .. }, _) => {
                let mut found = None;
                for k in 0..=xi.len() {
                    let x = wrap(ground, y, -*step * S::from_count(k))?;
                    let back = self.apply(ground, &x, xi)?;
                    if same_location(&back, y) {
                        if found.is_some() {
                            return Err(Error::InverseFailure(format!("{y:?} has several preimages")));
                        }
                        found = Some(x);
                    }
                }
                found.ok_or_else(|| Error::InverseFailure(format!("{y:?}")))
            }
            _ => Err(Error::Unsupported(format!("{self:?} at {y:?}"))),
        }
    }

    /// The image `σ` of `λ` under `τ(·, ξ)`, which must not depend on `ξ`.
    pub fn target(&self, ground: &GroundSpace<S>) -> Result<GroundSpace<S>> {
        self.validate(ground)?;
        match (self, ground) {
            (Shift::Permutation(p), GroundSpace::Discrete { weights }) => {
                let mut out = weights.clone();
                for (i, j) in p.iter().enumerate() {
                    out[*j] = weights[i];
                }
                GroundSpace::discrete(out)
            }
            (Shift::ConditionalSwap { a, b, .. }, GroundSpace::Discrete { weights }) if weights[*a] != weights[*b] => {
                Err(Error::Unsupported(
                    "conditional swap of sites with unequal weights has no fixed image measure".into(),
                ))
            }
            _ => Ok(ground.clone()),
        }
    }
}

/// `τ_*(ξ) = Σ_{x∈ξ} δ_{τ(x, ξ)}`.
pub fn push_forward<S: Scalar>(
    shift: &Shift<S>,
    ground: &GroundSpace<S>,
    xi: &Configuration<S>,
) -> Result<Configuration<S>> {
    let mut image = Vec::with_capacity(xi.len());
    for x in xi.iter() {
        let y = shift.apply(ground, x, xi)?;
        if image.contains(&y) {
            return Err(Error::NonInjective(format!("{y:?}")));
        }
        image.push(y);
    }
    Configuration::new(image)
}

/// Largest violations of the exvisibility consequences over the test family.
#[derive(Clone, Debug, PartialEq)]
pub struct ExvisibilityReport {
    /// `max |D_x u(x, ξ)|`.
    pub self_violation: f64,
    /// `max |D_{x_1} u(x_2, ξ) D_{x_2} u(x_1, ξ)|` over distinct `x_1, x_2`.
    pub cyclic2: f64,
    /// The same cyclic product over distinct triples.
    pub cyclic3: f64,
    /// Where the self violation is attained.
    pub worst: Option<String>,
}

impl ExvisibilityReport {
    pub fn is_exvisible(&self) -> bool {
        self.self_violation == 0.0
    }
}

pub fn check_exvisibility<S: Scalar>(
    u: &ProcessFunction<S>,
    points: &[Point<S>],
    configurations: &[Configuration<S>],
) -> ExvisibilityReport {
    let d = |at: &Point<S>, x: &Point<S>, xi: &Configuration<S>| {
        let ux = u.clone();
        let x = *x;
        difference_op(&StateFunction::new("", move |c| ux.eval(&x, c)), at, xi)
    };
    let mut report = ExvisibilityReport {
        self_violation: 0.0,
        cyclic2: 0.0,
        cyclic3: 0.0,
        worst: None,
    };
    for xi in configurations {
        for x in points {
            let v = d(x, x, xi).abs().as_f64();
            if v > report.self_violation {
                report.self_violation = v;
                report.worst = Some(format!("x={x:?}, ξ={}", xi.to_line()));
            }
        }
        for (i, x1) in points.iter().enumerate() {
            for (j, x2) in points.iter().enumerate().filter(|(j, _)| *j != i) {
                let c2 = (d(x1, x2, xi) * d(x2, x1, xi)).abs().as_f64();
                report.cyclic2 = report.cyclic2.max(c2);
                for (_, x3) in points.iter().enumerate().filter(|(l, _)| *l != i && *l != j) {
                    let c3 = (d(x1, x2, xi) * d(x2, x3, xi) * d(x3, x1, xi)).abs().as_f64();
                    report.cyclic3 = report.cyclic3.max(c3);
                }
            }
        }
    }
    report
}

/// `max dist(τ(x, ξ ∪ x), τ(x, ξ ∖ x))`; discrete distances are 0 or 1.
pub fn check_shift_exvisibility<S: Scalar>(
    shift: &Shift<S>,
    ground: &GroundSpace<S>,
    points: &[Point<S>],
    configurations: &[Configuration<S>],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for xi in configurations {
        for x in points {
            let a = shift.apply(ground, x, &xi.with(*x))?;
            let b = shift.apply(ground, x, &xi.without(x))?;
            let gap = match (a, b) {
                (Point::Loc(p), Point::Loc(q)) => p.distance(&q).as_f64(),
                (p, q) => f64::from(u8::from(p != q)),
            };
            worst = worst.max(gap);
        }
    }
    Ok(worst)
}

/// `ρ_τ(α) = E[ĉ({τ⁻¹(x, ξ) : x ∈ α}, ξ)]`, a density with respect to the
/// target measure of the shift.
pub fn transformed_correlation<S: Scalar>(
    intensity: &dyn Intensity<S>,
    shift: &Shift<S>,
    alpha: &[Point<S>],
    law: Law<'_, S>,
) -> Result<Estimate<S>> {
    let ground = intensity.ground();
    let rows = law.evaluate(|xi| {
        alpha
            .iter()
            .map(|y| shift.inverse(ground, y, xi))
            .collect::<Result<Vec<_>>>()
            .map(|pre| vec![intensity.c_hat(&pre, xi)])
            .unwrap_or_default()
    });
    if rows.rows().iter().any(Vec::is_empty) {
        let xi = law.representative();
        for y in alpha {
            shift.inverse(ground, y, &xi)?;
        }
        return Err(Error::InverseFailure(format!(
            "{alpha:?} on some configuration of the law"
        )));
    }
    Ok(rows.mean(0))
}

/// The exact law of `τ_*ξ`, on the target measure of the shift.
pub fn pushforward_law<S: Scalar>(dist: &ExactDistribution<S>, shift: &Shift<S>) -> Result<ExactDistribution<S>> {
    let ground = dist.ground();
    let target = shift.target(ground)?;
    let mut p = vec![S::zero(); dist.probabilities().len()];
    for mask in dist.support() {
        let image = push_forward(shift, ground, &Configuration::from_mask(mask))?;
        let m = image.site_mask().expect("discrete configuration");
        p[m as usize] += dist.probability(mask);
    }
    ExactDistribution::from_probabilities(target, p)
}

/// Correlation functions of `τ_*ξ` against [`transformed_correlation`].
///
/// Discrete laws compare the exact pushforward for every `|α| ≤ 3`. Sample
/// laws compare `E[Π_k ∫ v_k d(τ_*ξ)]` for `v = 1_A` and `(1_A, 1)` against the
/// partition sums built from `ρ_τ`, paired configuration by configuration.
pub fn verify_pushforward_law<S: Scalar>(
    intensity: &dyn Intensity<S>,
    shift: &Shift<S>,
    law: Law<'_, S>,
    nodes: usize,
) -> Result<IdentityReport<S>> {
    let ground = intensity.ground();
    match law {
        Law::Exact(dist) => {
            let pushed = pushforward_law(dist, shift)?;
            let sites = Configuration::from_mask((1u32 << dist.site_count()) - 1);
            let mut terms = Vec::new();
            let mut worst = (S::zero(), S::zero(), -S::one());
            for alpha in subsets_of(&sites, Some(PUSHFORWARD_ORDER))? {
                if alpha.is_empty() {
                    continue;
                }
                let lhs = pushed.correlation(alpha.site_mask().expect("sites"));
                let rhs = transformed_correlation(intensity, shift, alpha.points(), law)?.value;
                if (lhs - rhs).abs() > worst.2 {
                    worst = (lhs, rhs, (lhs - rhs).abs());
                }
                terms.push(Term::new(format!("ρ_τ({})", alpha.to_line()), Estimate::exact(rhs)));
            }
            Ok(
                IdentityReport::exact("pushforward-law", worst.0, worst.1, S::lit(PUSHFORWARD_TOLERANCE))
                    .with_terms(terms)
                    .with_note("left: exact pushforward correlation at the worst α; right: transformed correlation"),
            )
        }
        Law::Samples(_) => {
            let target = shift.target(ground)?;
            let a = crate::fixtures::process_function("indicator", &target)?;
            let mut report = None;
            for vs in [vec![a.clone()], vec![a.clone(), ProcessFunction::constant(S::one())]] {
                let r = pushforward_moment(intensity, shift, &target, &vs, law, nodes)?;
                let failed = !r.pass;
                report = Some(r);
                if failed {
                    break;
                }
            }
            Ok(report.expect("two moment orders"))
        }
    }
}

fn pushforward_moment<S: Scalar>(
    intensity: &dyn Intensity<S>,
    shift: &Shift<S>,
    target: &GroundSpace<S>,
    vs: &[ProcessFunction<S>],
    law: Law<'_, S>,
    nodes: usize,
) -> Result<IdentityReport<S>> {
    let ground = intensity.ground();
    let partitions = partitions_by_blocks(vs.len())?;
    let labels = partitions.iter().map(|p| p.to_string()).collect();
    let empty = Configuration::empty();
    let lhs = |xi: &Configuration<S>| {
        let image = push_forward(shift, ground, xi).unwrap_or_default();
        vs.iter()
            .map(|v| image.iter().fold(S::zero(), |acc, y| acc + v.eval(y, &empty)))
            .fold(S::one(), |acc, s| acc * s)
    };
    let rhs = |xi: &Configuration<S>, nodes: usize| {
        partitions
            .iter()
            .map(|p| {
                crate::moments::integrate_tuples(target, p.block_count(), p.block_count(), nodes, |ys| {
                    let v = partition_product(vs, p, ys, &empty);
                    if v == S::zero() {
                        return S::zero();
                    }
                    match ys
                        .iter()
                        .map(|y| shift.inverse(ground, y, xi))
                        .collect::<Result<Vec<_>>>()
                    {
                        Ok(pre) => v * intensity.c_hat(&pre, xi),
                        Err(_) => S::nan(),
                    }
                })
            })
            .collect()
    };
    let labels_v: Vec<&str> = vs.iter().map(ProcessFunction::label).collect();
    let ev = Evaluator::new(intensity, law).with_quadrature(crate::moments::Quadrature { nodes, refine: false });
    let report = ev.compare(
        &format!("pushforward-moment(v={})", labels_v.join(",")),
        lhs,
        rhs,
        labels,
        false,
    );
    if report.rhs.value.is_nan() {
        return Err(Error::InverseFailure(
            "shift inverse failed on a sampled configuration".into(),
        ));
    }
    Ok(report)
}

/// For Poisson laws: `ρ_τ(α) = Π_{x∈α} ρ_τ({x})` on every `|α| ≤ order`.
pub fn check_poisson_factorization<S: Scalar>(
    intensity: &dyn Intensity<S>,
    shift: &Shift<S>,
    law: Law<'_, S>,
    order: usize,
) -> Result<IdentityReport<S>> {
    let ground = intensity.ground();
    let Some(m) = ground.site_count() else {
        return Err(Error::Unsupported(
            "factorization check needs a discrete ground space".into(),
        ));
    };
    let sites = Configuration::from_mask((1u32 << m) - 1);
    let singles: Vec<S> = (0..m)
        .map(|i| transformed_correlation(intensity, shift, &[Point::Site(i)], law).map(|e| e.value))
        .collect::<Result<_>>()?;
    let mut worst = (S::zero(), S::zero(), -S::one());
    let mut terms = Vec::new();
    for alpha in subsets_of(&sites, Some(order))? {
        if alpha.len() < 2 {
            continue;
        }
        let joint = transformed_correlation(intensity, shift, alpha.points(), law)?.value;
        let product = alpha
            .iter()
            .fold(S::one(), |acc, x| acc * singles[x.site().expect("site")]);
        if (joint - product).abs() > worst.2 {
            worst = (joint, product, (joint - product).abs());
        }
        terms.push(Term::new(format!("ρ_τ({})", alpha.to_line()), Estimate::exact(joint)));
    }
    Ok(
        IdentityReport::exact("poisson-factorization", worst.0, worst.1, S::lit(PUSHFORWARD_TOLERANCE))
            .with_terms(terms),
    )
}

/// `K_τ(x, y) = K(τ⁻¹x, τ⁻¹y)`; only deterministic relabelings keep the
/// pushforward determinantal.
pub fn transform_dpp_kernel<S: Scalar>(kernel: &Matrix<S>, shift: &Shift<S>) -> Result<Matrix<S>> {
    match shift {
        Shift::Identity => Ok(kernel.clone()),
        Shift::Permutation(p) => {
            shift.validate(&GroundSpace::sites(kernel.dim())?)?;
            Ok(kernel.permuted(p))
        }
        _ => Err(Error::Unsupported(
            "the pushforward of a determinantal law under a random shift is not determinantal in general".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigenvalues;
    use crate::models::{Activity, Model};

    #[test]
    fn discrete_shifts() {
        let g = GroundSpace::<f64>::sites(4).unwrap();
        let swap = Shift::Permutation(vec![1, 0, 2, 3]);
        assert_eq!(
            push_forward(&swap, &g, &Configuration::from_sites(&[0])).unwrap(),
            Configuration::from_sites(&[1])
        );
        assert_eq!(
            push_forward(&Shift::Identity, &g, &Configuration::from_sites(&[0, 2])).unwrap(),
            Configuration::from_sites(&[0, 2])
        );
        let cond = Shift::ConditionalSwap { a: 0, b: 1, trigger: 3 };
        assert_eq!(
            push_forward(&cond, &g, &Configuration::from_sites(&[0, 2])).unwrap(),
            Configuration::from_sites(&[0, 2])
        );
        assert_eq!(
            push_forward(&cond, &g, &Configuration::from_sites(&[0, 3])).unwrap(),
            Configuration::from_sites(&[1, 3])
        );
        let xi = Configuration::from_sites(&[1, 3]);
        assert_eq!(cond.inverse(&g, &Point::Site(0), &xi).unwrap(), Point::Site(1));
        assert!(Shift::<f64>::Permutation(vec![0, 0, 1, 2]).validate(&g).is_err());
        assert!(Shift::<f64>::ConditionalSwap { a: 0, b: 1, trigger: 1 }
            .validate(&g)
            .is_err());
        let collapse = Shift::<f64>::Permutation(vec![0, 0, 2, 3]);
        assert!(matches!(
            push_forward(&collapse, &g, &Configuration::from_sites(&[0, 1])),
            Err(Error::NonInjective(_))
        ));
    }

    #[test]
    fn count_translate_two_points() {
        let g = GroundSpace::<f64>::unit_interval();
        let tau = Shift::CountTranslate {
            radius: 0.2,
            step: 0.01,
        };
        let xi = Configuration::new(vec![Point::at(&[0.1]), Point::at(&[0.95])]).unwrap();
        let image = push_forward(&tau, &g, &xi).unwrap();
        let ys: Vec<f64> = image.iter().map(|p| p.coords().unwrap().as_slice()[0]).collect();
        // each point sees the other outside its ball: both move by 0.01, 0.96 stays inside
        assert!(ys.iter().any(|y| (y - 0.11).abs() < 1e-12));
        assert!(ys.iter().any(|y| (y - 0.96).abs() < 1e-12));
        let back = tau.inverse(&g, &Point::at(&[0.11]), &xi).unwrap();
        assert!((back.coords().unwrap().as_slice()[0] - 0.1).abs() < 1e-12);
        let wrapped = tau.apply(&g, &Point::at(&[0.995]), &xi).unwrap();
        assert!((wrapped.coords().unwrap().as_slice()[0] - 0.005).abs() < 1e-12);
    }

    #[test]
    fn exvisibility_examples() {
        let g = GroundSpace::<f64>::sites(3).unwrap();
        let pts = g.site_points();
        let cfgs: Vec<_> = (0..8).map(Configuration::from_mask).collect();
        let v = ProcessFunction::deterministic("v", |x: &Point<f64>| x.site().unwrap() as f64);
        let r = check_exvisibility(&v, &pts, &cfgs);
        assert_eq!((r.self_violation, r.cyclic2, r.cyclic3), (0.0, 0.0, 0.0));
        let simple = crate::fixtures::process_function("exvisible", &g).unwrap();
        let r = check_exvisibility(&simple, &pts, &cfgs);
        assert!(r.is_exvisible() && r.cyclic2 == 0.0 && r.cyclic3 == 0.0, "{r:?}");
        let card = ProcessFunction::new("card", |_, xi: &Configuration<f64>| xi.len() as f64);
        let r = check_exvisibility(&card, &pts, &cfgs);
        assert_eq!(r.self_violation, 1.0);
        assert!(!r.is_exvisible());
        let cond = Shift::<f64>::ConditionalSwap { a: 0, b: 1, trigger: 2 };
        assert_eq!(check_shift_exvisibility(&cond, &g, &pts, &cfgs).unwrap(), 0.0);
    }

    #[test]
    fn kernel_relabeling() {
        let k = Matrix::diagonal(&[0.2_f64, 0.5]);
        let swapped = transform_dpp_kernel(&k, &Shift::Permutation(vec![1, 0])).unwrap();
        assert_eq!(swapped, Matrix::diagonal(&[0.5, 0.2]));
        assert_eq!(transform_dpp_kernel(&k, &Shift::Identity).unwrap(), k);
        let k3 = crate::fixtures::random_kernel::<f64>(3);
        let cycled = transform_dpp_kernel(&k3, &Shift::Permutation(vec![1, 2, 0])).unwrap();
        let (mut a, mut b) = (symmetric_eigenvalues(&k3), symmetric_eigenvalues(&cycled));
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
        let cond = Shift::ConditionalSwap { a: 0, b: 1, trigger: 2 };
        assert!(matches!(transform_dpp_kernel(&k3, &cond), Err(Error::Unsupported(_))));
    }

    #[test]
    fn identity_and_deterministic_correlations() {
        let k = Matrix::from_rows(vec![vec![0.5_f64, 0.25], vec![0.25, 0.5]]).unwrap();
        let m = Model::determinantal(GroundSpace::sites(2).unwrap(), k).unwrap();
        let d = m.exact_distribution().unwrap();
        let law = Law::Exact(&d);
        let pair = [Point::Site(0), Point::Site(1)];
        let id = transformed_correlation(&m, &Shift::Identity, &pair, law).unwrap().value;
        assert!((id - 0.1875).abs() < 1e-14);
        let r = verify_pushforward_law(&m, &Shift::Permutation(vec![1, 0]), law, 0).unwrap();
        assert!(r.pass, "{r:?}");
        let pushed = pushforward_law(&d, &Shift::Permutation(vec![1, 0])).unwrap();
        assert!(pushed.total_variation(&d) < 1e-15);
    }

    #[test]
    fn unequal_weights_have_no_image_measure() {
        let g = GroundSpace::discrete(vec![1.0_f64, 2.0, 1.0]).unwrap();
        let cond = Shift::ConditionalSwap { a: 0, b: 1, trigger: 2 };
        assert!(cond.target(&g).is_err());
        let perm = Shift::Permutation(vec![1, 2, 0]);
        assert_eq!(perm.target(&g).unwrap().weights().unwrap(), &[1.0, 1.0, 2.0]);
        let model = Model::poisson(g, Activity::Constant(1.0)).unwrap();
        assert!(model.exact_distribution().is_ok());
    }
}
