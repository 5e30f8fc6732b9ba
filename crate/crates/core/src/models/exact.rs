use crate::configuration::{Configuration, GroundSpace, Point, MAX_EXACT_SITES};
use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};

use super::Model;

/// Exhaustive law of a discrete point process: one entry per subset of the
/// sites, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution<S> {
    ground: GroundSpace<S>,
    /// Unnormalized weights `w(ξ)`, `w(∅) = 1` unless the empty set is null.
    weights: Vec<S>,
    probabilities: Vec<S>,
}

impl<S: Scalar> ExactDistribution<S> {
    pub fn new(model: &Model<S>) -> Result<Self> {
        let m = discrete_size(model.ground())?;
        let weights = (0u32..1 << m)
            .map(|mask| model.weight(&Configuration::from_mask(mask)))
            .collect::<Result<Vec<S>>>()?;
        Self::from_weights(model.ground().clone(), weights)
    }

    /// Law with `P(ξ) ∝ w(ξ) Π_{x∈ξ} λ(x)`.
    pub fn from_weights(ground: GroundSpace<S>, weights: Vec<S>) -> Result<Self> {
        let m = discrete_size(&ground)?;
        assert_eq!(weights.len(), 1 << m, "one weight per subset");
        let unnormalized: Vec<S> = weights
            .iter()
            .enumerate()
            .map(|(mask, &w)| w * lambda_product(&ground, mask as u32))
            .collect();
        let total = ordered_sum(unnormalized.iter().copied());
        if !(total > S::zero()) || !total.is_finite() {
            return Err(Error::InvalidModel("all configuration weights vanish".into()));
        }
        let probabilities = unnormalized.into_iter().map(|p| p / total).collect();
        Ok(Self {
            ground,
            weights,
            probabilities,
        })
    }

    /// Law given by a probability table; weights are recovered as `P(ξ) / Π λ`.
    pub fn from_probabilities(ground: GroundSpace<S>, probabilities: Vec<S>) -> Result<Self> {
        let m = discrete_size(&ground)?;
        assert_eq!(probabilities.len(), 1 << m, "one probability per subset");
        if probabilities.iter().any(|p| *p < S::zero() || !p.is_finite()) {
            return Err(Error::InvalidModel(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let weights = probabilities
            .iter()
            .enumerate()
            .map(|(mask, &p)| p / lambda_product(&ground, mask as u32))
            .collect();
        Self::from_weights(ground, weights)
    }

    pub fn ground(&self) -> &GroundSpace<S> {
        &self.ground
    }

    pub fn site_count(&self) -> usize {
        self.ground.site_count().expect("discrete ground")
    }

    pub fn probabilities(&self) -> &[S] {
        &self.probabilities
    }

    pub fn probability(&self, mask: u32) -> S {
        self.probabilities[mask as usize]
    }

    pub fn weight(&self, mask: u32) -> S {
        self.weights[mask as usize]
    }

    /// Masks of positive probability, ascending.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.probabilities.len() as u32).filter(|&m| self.probabilities[m as usize] > S::zero())
    }

    /// `E[f(ξ)]` by exhaustive summation over the support.
    pub fn expect(&self, f: impl Fn(u32) -> S) -> S {
        ordered_sum(self.support().map(|mask| self.probability(mask) * f(mask)))
    }

    /// `P(α ⊆ ξ)`.
    pub fn inclusion_probability(&self, alpha: u32) -> S {
        ordered_sum(
            (0..self.probabilities.len() as u32)
                .filter(|m| m & alpha == alpha)
                .map(|m| self.probability(m)),
        )
    }

    /// Tabulated `c(x, ξ) = w(ξ ∪ x) / w(ξ)`; zero on overlap or null `ξ`.
    pub fn papangelou(&self, site: usize, mask: u32) -> S {
        self.compound_papangelou(1 << site, mask)
    }

    /// Tabulated `ĉ(α, ξ) = w(α ∪ ξ) / w(ξ)`; zero on overlap or null `ξ`.
    pub fn compound_papangelou(&self, alpha: u32, mask: u32) -> S {
        if alpha == 0 {
            return S::one();
        }
        let w = self.weight(mask);
        if alpha & mask != 0 || w <= S::zero() {
            return S::zero();
        }
        self.weight(alpha | mask) / w
    }

    /// Correlation function `ρ(α) = E[ĉ(α, ξ)]`.
    pub fn correlation(&self, alpha: u32) -> S {
        self.expect(|mask| self.compound_papangelou(alpha, mask))
    }

    pub fn total_variation(&self, other: &Self) -> S {
        let half = S::lit(0.5);
        half * ordered_sum(
            self.probabilities
                .iter()
                .zip(&other.probabilities)
                .map(|(a, b)| (*a - *b).abs()),
        )
    }

    /// The configuration behind a mask.
    pub fn configuration(mask: u32) -> Configuration<S> {
        Configuration::from_mask(mask)
    }
}

fn discrete_size<S: Scalar>(ground: &GroundSpace<S>) -> Result<usize> {
    let m = ground
        .site_count()
        .ok_or_else(|| Error::Unsupported("exact distributions need a discrete ground space".into()))?;
    if m > MAX_EXACT_SITES {
        return Err(Error::InvalidGround(format!(
            "exact evaluation supports at most {MAX_EXACT_SITES} sites, got {m}"
        )));
    }
    Ok(m)
}

pub(crate) fn lambda_product<S: Scalar>(ground: &GroundSpace<S>, mask: u32) -> S {
    Configuration::<S>::from_mask(mask)
        .iter()
        .map(|p| match p {
            Point::Site(i) => ground.site_weight(*i),
            Point::Loc(_) => unreachable!(),
        })
        .fold(S::one(), |a, b| a * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::models::{Activity, PairPotential};

    fn assert_table(got: &[f64], want: &[f64]) {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-14, "{got:?} != {want:?}");
        }
    }

    #[test]
    fn poisson_uniform() {
        let m = Model::poisson(GroundSpace::sites(2).unwrap(), Activity::Constant(1.0)).unwrap();
        assert_table(m.exact_distribution().unwrap().probabilities(), &[0.25; 4]);
        let one = Model::poisson(GroundSpace::sites(1).unwrap(), Activity::Constant(1.0)).unwrap();
        assert_table(one.exact_distribution().unwrap().probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn determinantal_table() {
        let k = Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        let m = Model::determinantal(GroundSpace::sites(2).unwrap(), k).unwrap();
        let d = m.exact_distribution().unwrap();
        assert_table(d.probabilities(), &[3.0 / 16.0, 5.0 / 16.0, 5.0 / 16.0, 3.0 / 16.0]);
        assert!((d.correlation(0b11) - 0.1875).abs() < 1e-14);
        assert!((d.correlation(0b01) - 0.5).abs() < 1e-14);
        assert_eq!(d.correlation(0), 1.0);
    }

    #[test]
    fn gibbs_table() {
        let mut t = Matrix::zeros(2);
        t[(0, 1)] = std::f64::consts::LN_2;
        t[(1, 0)] = std::f64::consts::LN_2;
        let m = Model::gibbs(
            GroundSpace::sites(2).unwrap(),
            Activity::Constant(1.0),
            PairPotential::Table(t),
        )
        .unwrap();
        assert_table(
            m.exact_distribution().unwrap().probabilities(),
            &[2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
        );
    }

    #[test]
    fn all_null_is_rejected() {
        let m = Model::poisson(GroundSpace::sites(2).unwrap(), Activity::Constant(0.0)).unwrap();
        // only the empty configuration survives
        assert_table(m.exact_distribution().unwrap().probabilities(), &[1.0, 0.0, 0.0, 0.0]);
        let g = GroundSpace::sites(1).unwrap();
        assert!(ExactDistribution::from_weights(g, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn weighted_probabilities_round_trip() {
        let g = GroundSpace::discrete(vec![0.5f64, 2.0]).unwrap();
        let m = Model::poisson(g.clone(), Activity::Constant(1.0)).unwrap();
        let d = m.exact_distribution().unwrap();
        let back = ExactDistribution::from_probabilities(g, d.probabilities().to_vec()).unwrap();
        assert!(d.total_variation(&back) < 1e-15);
        for mask in 0..4 {
            assert!((d.compound_papangelou(0b01, mask) - back.compound_papangelou(0b01, mask)).abs() < 1e-14);
        }
    }
}
