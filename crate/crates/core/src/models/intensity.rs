use crate::configuration::{Configuration, GroundSpace, Point};
use crate::scalar::Scalar;

use super::{ExactDistribution, Model};

/// Evaluable Papangelou intensities, as consumed by the identity checks.
///
/// Evaluations never fail: conditioning on a null configuration yields 0,
/// which is harmless because such configurations carry no mass.
pub trait Intensity<S: Scalar>: Sync {
    fn ground(&self) -> &GroundSpace<S>;

    fn c(&self, x: &Point<S>, xi: &Configuration<S>) -> S;

    /// `ĉ({α_1, ..., α_k}, ξ)`; an ordered tuple with a repeated point is
    /// treated as overlapping and gives 0 on discrete spaces.
    fn c_hat(&self, alpha: &[Point<S>], xi: &Configuration<S>) -> S;

    /// True when `c(x, ξ)` does not depend on `ξ`.
    fn is_configuration_free(&self) -> bool {
        false
    }
}

impl<S: Scalar> Intensity<S> for Model<S> {
    fn ground(&self) -> &GroundSpace<S> {
        Model::ground(self)
    }

    fn c(&self, x: &Point<S>, xi: &Configuration<S>) -> S {
        self.papangelou(x, xi).unwrap_or(S::zero())
    }

    fn c_hat(&self, alpha: &[Point<S>], xi: &Configuration<S>) -> S {
        self.compound_papangelou_telescoping(alpha, xi).unwrap_or(S::zero())
    }

    fn is_configuration_free(&self) -> bool {
        Model::is_configuration_free(self)
    }
}

impl<S: Scalar> Intensity<S> for ExactDistribution<S> {
    fn ground(&self) -> &GroundSpace<S> {
        ExactDistribution::ground(self)
    }

    fn c(&self, x: &Point<S>, xi: &Configuration<S>) -> S {
        let (Some(site), Some(mask)) = (x.site(), xi.site_mask()) else {
            return S::zero();
        };
        self.papangelou(site, mask)
    }

    fn c_hat(&self, alpha: &[Point<S>], xi: &Configuration<S>) -> S {
        let Some(mask) = xi.site_mask() else {
            return S::zero();
        };
        let mut a = 0u32;
        for x in alpha {
            let Some(i) = x.site() else { return S::zero() };
            if a >> i & 1 == 1 {
                return S::zero();
            }
            a |= 1 << i;
        }
        self.compound_papangelou(a, mask)
    }
}
