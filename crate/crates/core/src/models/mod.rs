//! Point process families with evaluable Papangelou intensities.
//!
//! On discrete spaces every model defines an unnormalized weight `w(ξ)` and
//! the law `P(ξ) ∝ w(ξ) Π_{x∈ξ} λ(x)`. The Papangelou intensity is then
//! `c(x, ξ) = w(ξ ∪ x) / w(ξ)` for `x ∉ ξ` and, by convention, `0` for
//! `x ∈ ξ` (the event has positive probability on a finite space, and this is
//! the only choice for which the GNZ identity holds exactly).

pub mod determinantal;
mod exact;
mod intensity;

use std::fmt;
use std::sync::Arc;

pub use exact::ExactDistribution;
pub use intensity::Intensity;

use crate::configuration::{Configuration, Coords, GroundSpace, Point};
use crate::error::{Error, Result};
use crate::estimator::Law;
use crate::linalg::Matrix;
use crate::report::Estimate;
use crate::scalar::{ordered_sum, Scalar};

/// Activity `z(x) >= 0`.
#[derive(Clone)]
pub enum Activity<S> {
    Constant(S),
    PerSite(Vec<S>),
    /// Window activity with a known upper bound (used for thinning).
    Function {
        f: Arc<dyn Fn(&Coords<S>) -> S + Send + Sync>,
        bound: S,
    },
}

impl<S: fmt::Debug> fmt::Debug for Activity<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activity::Constant(z) => write!(f, "Constant({z:?})"),
            Activity::PerSite(z) => write!(f, "PerSite({z:?})"),
            Activity::Function { bound, .. } => write!(f, "Function(bound = {bound:?})"),
        }
    }
}

impl<S: Scalar> Activity<S> {
    pub fn at(&self, x: &Point<S>) -> S {
        match (self, x) {
            (Activity::Constant(z), _) => *z,
            (Activity::PerSite(z), Point::Site(i)) => z[*i],
            (Activity::Function { f, .. }, Point::Loc(c)) => f(c),
            _ => panic!("activity evaluated on a point of the wrong kind"),
        }
    }

    /// `sup z`.
    pub fn bound(&self) -> S {
        match self {
            Activity::Constant(z) => *z,
            Activity::PerSite(z) => z.iter().copied().fold(S::zero(), S::max),
            Activity::Function { bound, .. } => *bound,
        }
    }

    fn validate(&self, ground: &GroundSpace<S>) -> Result<()> {
        let ok = |z: &S| *z >= S::zero() && z.is_finite();
        match (self, ground) {
            (Activity::Constant(z), _) if ok(z) => Ok(()),
            (Activity::PerSite(z), GroundSpace::Discrete { weights })
                if z.len() == weights.len() && z.iter().all(ok) =>
            {
                Ok(())
            }
            (Activity::Function { bound, .. }, GroundSpace::Window { .. }) if ok(bound) => Ok(()),
            _ => Err(Error::InvalidModel(format!(
                "activity {self:?} is not a finite nonnegative intensity on this ground space"
            ))),
        }
    }
}

/// Symmetric pair potential `φ(x, y) ∈ [0, +∞]`; `+∞` is a hard-core exclusion.
#[derive(Clone, Debug, PartialEq)]
pub enum PairPotential<S> {
    None,
    /// Site table (diagonal ignored).
    Table(Matrix<S>),
    /// `φ(x, y) = strength` when `|x - y| < radius`, else 0.
    Radial {
        radius: S,
        strength: S,
    },
}

impl<S: Scalar> PairPotential<S> {
    pub fn hard_core(radius: S) -> Self {
        PairPotential::Radial {
            radius,
            strength: S::infinity(),
        }
    }

    pub fn between(&self, x: &Point<S>, y: &Point<S>) -> S {
        match (self, x, y) {
            (PairPotential::None, _, _) => S::zero(),
            (PairPotential::Table(t), Point::Site(i), Point::Site(j)) => t[(*i, *j)],
            (PairPotential::Radial { radius, strength }, Point::Loc(a), Point::Loc(b)) => {
                if a.distance(b) < *radius {
                    *strength
                } else {
                    S::zero()
                }
            }
            _ => panic!("pair potential evaluated on points of the wrong kind"),
        }
    }

    fn validate(&self, ground: &GroundSpace<S>) -> Result<()> {
        let ok = |v: S| !v.is_nan() && v >= S::zero();
        match (self, ground) {
            (PairPotential::None, _) => Ok(()),
            (PairPotential::Table(t), GroundSpace::Discrete { weights }) => {
                if t.dim() != weights.len() {
                    return Err(Error::InvalidModel("potential table dimension mismatch".into()));
                }
                for i in 0..t.dim() {
                    for j in 0..t.dim() {
                        if i != j && (!ok(t[(i, j)]) || t[(i, j)] != t[(j, i)]) {
                            return Err(Error::InvalidModel(
                                "potential table must be symmetric with values in [0, +inf]".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
            (PairPotential::Radial { radius, strength }, GroundSpace::Window { .. })
                if ok(*radius) && radius.is_finite() && ok(*strength) =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidModel(format!(
                "potential {self:?} does not fit this ground space"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Family<S> {
    Poisson {
        activity: Activity<S>,
    },
    Gibbs {
        activity: Activity<S>,
        potential: PairPotential<S>,
    },
    Determinantal {
        kernel: Matrix<S>,
        interaction: Matrix<S>,
    },
}

impl<S> Family<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Poisson { .. } => "poisson",
            Family::Gibbs { .. } => "gibbs",
            Family::Determinantal { .. } => "determinantal",
        }
    }
}

/// A point process on a ground space. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Model<S> {
    ground: GroundSpace<S>,
    family: Family<S>,
}

impl<S: Scalar> Model<S> {
    pub fn poisson(ground: GroundSpace<S>, activity: Activity<S>) -> Result<Self> {
        activity.validate(&ground)?;
        Ok(Self {
            ground,
            family: Family::Poisson { activity },
        })
    }

    pub fn gibbs(ground: GroundSpace<S>, activity: Activity<S>, potential: PairPotential<S>) -> Result<Self> {
        activity.validate(&ground)?;
        potential.validate(&ground)?;
        Ok(Self {
            ground,
            family: Family::Gibbs { activity, potential },
        })
    }

    /// Determinantal process with correlation kernel `K` with respect to the
    /// site weights of `ground`.
    pub fn determinantal(ground: GroundSpace<S>, kernel: Matrix<S>) -> Result<Self> {
        let weights = ground
            .weights()
            .ok_or_else(|| Error::Unsupported("determinantal models are implemented on discrete spaces only".into()))?;
        let interaction = determinantal::weighted_interaction(&kernel, weights)?;
        Ok(Self {
            ground,
            family: Family::Determinantal { kernel, interaction },
        })
    }

    pub fn ground(&self) -> &GroundSpace<S> {
        &self.ground
    }

    pub fn family(&self) -> &Family<S> {
        &self.family
    }

    /// True when `c(x, ξ)` does not depend on `ξ` (Poisson on a window).
    pub fn is_configuration_free(&self) -> bool {
        matches!(self.family, Family::Poisson { .. }) && !self.ground.is_discrete()
    }

    /// Interaction energy increment `Σ_{y∈ξ} φ(x, y)`.
    fn energy_increment(&self, potential: &PairPotential<S>, x: &Point<S>, xi: &Configuration<S>) -> S {
        ordered_sum(xi.iter().filter(|y| *y != x).map(|y| potential.between(x, y)))
    }

    /// Unnormalized weight `w(ξ)` of a discrete configuration.
    pub fn weight(&self, xi: &Configuration<S>) -> Result<S> {
        if !self.ground.is_discrete() {
            return Err(Error::Unsupported("weights are defined on discrete spaces only".into()));
        }
        for x in xi.iter() {
            self.ground.check(x)?;
        }
        Ok(match &self.family {
            Family::Poisson { activity } => xi.iter().fold(S::one(), |acc, x| acc * activity.at(x)),
            Family::Gibbs { activity, potential } => {
                let pts = xi.points();
                let mut energy = S::zero();
                for (a, x) in pts.iter().enumerate() {
                    for y in &pts[a + 1..] {
                        energy += potential.between(x, y);
                    }
                }
                let activity = xi.iter().fold(S::one(), |acc, x| acc * activity.at(x));
                if energy.is_infinite() {
                    S::zero()
                } else {
                    activity * (-energy).exp()
                }
            }
            Family::Determinantal { interaction, .. } => {
                let idx: Vec<usize> = xi.iter().filter_map(Point::site).collect();
                interaction.principal(&idx).determinant().max(S::zero())
            }
        })
    }

    /// Papangelou intensity `c(x, ξ)`.
    pub fn papangelou(&self, x: &Point<S>, xi: &Configuration<S>) -> Result<S> {
        self.ground.check(x)?;
        if self.ground.is_discrete() {
            let w = self.weight(xi)?;
            if w <= S::zero() {
                return Err(Error::DegenerateConfiguration);
            }
            if xi.contains(x) {
                return Ok(S::zero());
            }
            return Ok(match &self.family {
                Family::Determinantal { .. } => self.weight(&xi.with(*x))? / w,
                _ => self.window_or_product_intensity(x, xi),
            });
        }
        Ok(self.window_or_product_intensity(x, xi))
    }

    // z(x) e^{-Σ φ(x, y)}; for discrete Gibbs the caller has excluded x ∈ ξ
    fn window_or_product_intensity(&self, x: &Point<S>, xi: &Configuration<S>) -> S {
        match &self.family {
            Family::Poisson { activity } => activity.at(x),
            Family::Gibbs { activity, potential } => {
                let z = activity.at(x);
                if z == S::zero() {
                    return S::zero();
                }
                let e = if self.ground.is_discrete() {
                    self.energy_increment(potential, x, xi)
                } else {
                    ordered_sum(xi.iter().map(|y| potential.between(x, y)))
                };
                if e.is_infinite() {
                    S::zero()
                } else {
                    z * (-e).exp()
                }
            }
            Family::Determinantal { .. } => unreachable!("determinantal models are discrete"),
        }
    }

    /// Compound intensity `ĉ(α, ξ)`. Discrete: `w(α ∪ ξ) / w(ξ)`, zero on overlap.
    pub fn compound_papangelou(&self, alpha: &Configuration<S>, xi: &Configuration<S>) -> Result<S> {
        if alpha.is_empty() {
            return Ok(S::one());
        }
        if self.ground.is_discrete() {
            for x in alpha.iter() {
                self.ground.check(x)?;
            }
            let w = self.weight(xi)?;
            if w <= S::zero() {
                return Err(Error::DegenerateConfiguration);
            }
            if !alpha.is_disjoint(xi) {
                return Ok(S::zero());
            }
            return Ok(self.weight(&alpha.union(xi))? / w);
        }
        self.compound_papangelou_telescoping(alpha.points(), xi)
    }

    /// `ĉ(α, ξ) = Π_l c(α_l, ξ ∪ {α_1, ..., α_{l-1}})`.
    pub fn compound_papangelou_telescoping(&self, alpha: &[Point<S>], xi: &Configuration<S>) -> Result<S> {
        if self.ground.is_discrete() && self.weight(xi)? <= S::zero() {
            return Err(Error::DegenerateConfiguration);
        }
        let mut acc = S::one();
        let mut grown = xi.clone();
        for x in alpha {
            if acc == S::zero() {
                return Ok(acc);
            }
            acc *= self.papangelou(x, &grown)?;
            grown = grown.with(*x);
        }
        Ok(acc)
    }

    /// Exhaustive law of a discrete model.
    pub fn exact_distribution(&self) -> Result<ExactDistribution<S>> {
        ExactDistribution::new(self)
    }

    /// `ρ(α) = E[ĉ(α, ξ)]`.
    pub fn correlation(&self, alpha: &Configuration<S>, law: &Law<'_, S>) -> Result<Estimate<S>> {
        if let Law::Exact(dist) = law {
            let mask = alpha
                .site_mask()
                .ok_or_else(|| Error::Unsupported("exact correlation needs a discrete configuration".into()))?;
            return Ok(Estimate::exact(dist.correlation(mask)));
        }
        let mut first_error = None;
        let est = law.expect(|xi| match self.compound_papangelou(alpha, xi) {
            Ok(v) => v,
            Err(_) => S::zero(),
        });
        if alpha.iter().any(|x| !self.ground.contains(x)) {
            first_error = Some(Error::PointOutsideGround(alpha.to_string()));
        }
        match first_error {
            Some(e) => Err(e),
            None => Ok(est),
        }
    }

    /// Laplace functional `L(f) = E[exp(-Σ_{x∈ξ} f(x))]`.
    pub fn laplace_functional(&self, f: impl Fn(&Point<S>) -> S + Sync, law: &Law<'_, S>) -> Estimate<S> {
        law.expect(|xi| (-ordered_sum(xi.iter().map(&f))).exp())
    }
}

/// Closed-form Poisson Laplace functional `exp(-∫ (1 - e^{-f}) z dλ)` on a
/// one-dimensional window, by composite midpoint quadrature.
pub fn poisson_laplace_closed_form<S: Scalar>(model: &Model<S>, f: impl Fn(&Point<S>) -> S, nodes: usize) -> Result<S> {
    let Family::Poisson { activity } = model.family() else {
        return Err(Error::Unsupported("closed form exists for Poisson models only".into()));
    };
    let integral = match model.ground() {
        GroundSpace::Discrete { weights } => ordered_sum((0..weights.len()).map(|i| {
            let x = Point::Site(i);
            // discrete Poisson: independent sites, log E[e^{-f}] per site
            let z = activity.at(&x) * weights[i];
            ((S::one() + z) / (S::one() + z * (-f(&x)).exp())).ln()
        })),
        GroundSpace::Window { bounds, density } => {
            if bounds.len() != 1 {
                return Err(Error::Unsupported("closed form quadrature is one-dimensional".into()));
            }
            let (lo, hi) = bounds[0];
            let h = (hi - lo) / S::from_count(nodes);
            ordered_sum((0..nodes).map(|i| {
                let x = Point::at(&[lo + (S::from_count(i) + S::lit(0.5)) * h]);
                (S::one() - (-f(&x)).exp()) * activity.at(&x) * *density * h
            }))
        }
    };
    Ok((-integral).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_k() -> Matrix<f64> {
        Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap()
    }

    fn ln2_table() -> PairPotential<f64> {
        let mut t = Matrix::zeros(2);
        t[(0, 1)] = std::f64::consts::LN_2;
        t[(1, 0)] = std::f64::consts::LN_2;
        PairPotential::Table(t)
    }

    #[test]
    fn weights() {
        let g = GroundSpace::sites(2).unwrap();
        let both = Configuration::from_sites(&[0, 1]);
        let p = Model::poisson(g.clone(), Activity::Constant(0.5)).unwrap();
        assert_eq!(p.weight(&both).unwrap(), 0.25);
        assert_eq!(p.weight(&Configuration::empty()).unwrap(), 1.0);
        let gibbs = Model::gibbs(g.clone(), Activity::Constant(1.0), ln2_table()).unwrap();
        assert!((gibbs.weight(&both).unwrap() - 0.5).abs() < 1e-15);
        let d = Model::determinantal(g, fixture_k()).unwrap();
        assert!((d.weight(&both).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(d.weight(&Configuration::empty()).unwrap(), 1.0);
    }

    #[test]
    fn hard_core_weight_is_zero() {
        let mut t = Matrix::zeros(2);
        t[(0, 1)] = f64::INFINITY;
        t[(1, 0)] = f64::INFINITY;
        let m = Model::gibbs(
            GroundSpace::sites(2).unwrap(),
            Activity::Constant(1.0),
            PairPotential::Table(t),
        )
        .unwrap();
        let both = Configuration::from_sites(&[0, 1]);
        assert_eq!(m.weight(&both).unwrap(), 0.0);
        assert_eq!(
            m.papangelou(&Point::Site(0), &both),
            Err(Error::DegenerateConfiguration)
        );
        assert_eq!(
            m.papangelou(&Point::Site(0), &Configuration::from_sites(&[1])).unwrap(),
            0.0
        );
    }

    #[test]
    fn papangelou_examples() {
        let g = GroundSpace::sites(2).unwrap();
        let p = Model::poisson(g.clone(), Activity::Constant(0.5)).unwrap();
        assert_eq!(
            p.papangelou(&Point::Site(0), &Configuration::from_sites(&[1])).unwrap(),
            0.5
        );
        assert_eq!(
            p.papangelou(&Point::Site(0), &Configuration::from_sites(&[0])).unwrap(),
            0.0
        );
        let d = Model::determinantal(g.clone(), fixture_k()).unwrap();
        let c = d.papangelou(&Point::Site(0), &Configuration::empty()).unwrap();
        assert!((c - 5.0 / 3.0).abs() < 1e-14);
        let gibbs = Model::gibbs(g, Activity::Constant(1.0), ln2_table()).unwrap();
        let c = gibbs
            .papangelou(&Point::Site(0), &Configuration::from_sites(&[1]))
            .unwrap();
        assert!((c - 0.5).abs() < 1e-15);
    }

    #[test]
    fn compound_examples() {
        let g = GroundSpace::sites(2).unwrap();
        let d = Model::determinantal(g.clone(), fixture_k()).unwrap();
        let both = Configuration::from_sites(&[0, 1]);
        for xi in [Configuration::empty(), Configuration::from_sites(&[0]), both.clone()] {
            assert_eq!(d.compound_papangelou(&Configuration::empty(), &xi).unwrap(), 1.0);
        }
        assert!((d.compound_papangelou(&both, &Configuration::empty()).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(
            d.compound_papangelou(&Configuration::from_sites(&[0]), &Configuration::from_sites(&[0]))
                .unwrap(),
            0.0
        );
        let t = d
            .compound_papangelou_telescoping(both.points(), &Configuration::empty())
            .unwrap();
        assert!((t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn window_intensities() {
        let w = GroundSpace::unit_interval();
        let p = Model::poisson(w.clone(), Activity::Constant(2.0)).unwrap();
        let xi = Configuration::new(vec![Point::at(&[0.3])]).unwrap();
        assert_eq!(p.papangelou(&Point::at(&[0.5]), &xi).unwrap(), 2.0);
        assert!(p.is_configuration_free());
        let hc = Model::gibbs(w, Activity::Constant(2.0), PairPotential::hard_core(0.1)).unwrap();
        assert_eq!(hc.papangelou(&Point::at(&[0.35]), &xi).unwrap(), 0.0);
        assert_eq!(hc.papangelou(&Point::at(&[0.5]), &xi).unwrap(), 2.0);
        let two = hc
            .compound_papangelou(
                &Configuration::new(vec![Point::at(&[0.5]), Point::at(&[0.55])]).unwrap(),
                &xi,
            )
            .unwrap();
        assert_eq!(two, 0.0);
    }

    #[test]
    fn invalid_models() {
        let g = GroundSpace::<f64>::sites(2).unwrap();
        assert!(Model::poisson(g.clone(), Activity::Constant(-1.0)).is_err());
        assert!(Model::poisson(g.clone(), Activity::PerSite(vec![1.0])).is_err());
        let mut t = Matrix::zeros(2);
        t[(0, 1)] = -1.0;
        t[(1, 0)] = -1.0;
        assert!(Model::gibbs(g.clone(), Activity::Constant(1.0), PairPotential::Table(t)).is_err());
        assert!(Model::gibbs(g.clone(), Activity::Constant(1.0), PairPotential::hard_core(0.1)).is_err());
        assert!(Model::determinantal(GroundSpace::unit_interval(), Matrix::<f64>::zeros(1)).is_err());
        let bad = Matrix::diagonal(&[1.2, 0.5]);
        assert!(matches!(
            Model::determinantal(g, bad),
            Err(Error::SpectrumViolation { .. })
        ));
    }

    #[test]
    fn laplace_closed_forms() {
        let p = Model::poisson(GroundSpace::unit_interval(), Activity::Constant(2.0)).unwrap();
        let v = poisson_laplace_closed_form(&p, |_| 1.0, 64).unwrap();
        assert!((v - (-2.0 * (1.0 - (-1.0f64).exp())).exp()).abs() < 1e-12);
        assert!((v - 0.28246).abs() < 1e-5);
        let d = Model::poisson(GroundSpace::sites(1).unwrap(), Activity::Constant(1.0)).unwrap();
        let v = poisson_laplace_closed_form(&d, |_| std::f64::consts::LN_2, 1).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
    }
}
