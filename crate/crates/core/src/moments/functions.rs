use std::fmt;
use std::sync::Arc;

use crate::configuration::{Configuration, Point};
use crate::scalar::Scalar;

type PointFn<S> = dyn Fn(&Point<S>, &Configuration<S>) -> S + Send + Sync;
type StateFn<S> = dyn Fn(&Configuration<S>) -> S + Send + Sync;
type SetFn<S> = dyn Fn(&Configuration<S>, &Configuration<S>) -> S + Send + Sync;

/// A random field `u(x, ξ)`.
#[derive(Clone)]
pub struct ProcessFunction<S> {
    label: String,
    f: Arc<PointFn<S>>,
    deterministic: bool,
    nonnegative: bool,
    bound: Option<S>,
}

impl<S: Scalar> ProcessFunction<S> {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(&Point<S>, &Configuration<S>) -> S + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            deterministic: false,
            nonnegative: false,
            bound: None,
        }
    }

    /// A function `v(x)` of the location only.
    pub fn deterministic(label: impl Into<String>, v: impl Fn(&Point<S>) -> S + Send + Sync + 'static) -> Self {
        Self {
            deterministic: true,
            ..Self::new(label, move |x, _| v(x))
        }
    }

    pub fn constant(value: S) -> Self {
        let mut u = Self::deterministic(format!("const({value})"), move |_| value);
        u.nonnegative = value >= S::zero();
        u.bound = Some(value.abs());
        u
    }

    pub fn nonnegative(mut self) -> Self {
        self.nonnegative = true;
        self
    }

    pub fn bounded_by(mut self, bound: S) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn bound(&self) -> Option<S> {
        self.bound
    }

    pub fn eval(&self, x: &Point<S>, xi: &Configuration<S>) -> S {
        (self.f)(x, xi)
    }

    /// Spot check of the deterministic flag: the value at each point must not
    /// change across the given configurations.
    pub fn check_deterministic(&self, points: &[Point<S>], configurations: &[Configuration<S>]) -> bool {
        if !self.deterministic {
            return true;
        }
        points.iter().all(|x| {
            let base = self.eval(x, &Configuration::empty());
            configurations.iter().all(|xi| self.eval(x, xi) == base)
        })
    }
}

impl<S> fmt::Debug for ProcessFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProcessFunction({})", self.label)
    }
}

/// A function `F(ξ)` of the configuration, optionally capped from above.
#[derive(Clone)]
pub struct StateFunction<S> {
    label: String,
    f: Arc<StateFn<S>>,
    constant: bool,
    cap: Option<S>,
}

impl<S: Scalar> StateFunction<S> {
    pub fn new(label: impl Into<String>, f: impl Fn(&Configuration<S>) -> S + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            constant: false,
            cap: None,
        }
    }

    pub fn constant(value: S) -> Self {
        Self {
            constant: true,
            ..Self::new(format!("const({value})"), move |_| value)
        }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// `F ∧ cap`, making unbounded fixtures such as `|ξ|` bounded.
    pub fn capped(mut self, cap: S) -> Self {
        self.cap = Some(cap);
        self.label = format!("min({}, {cap})", self.label);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn cap(&self) -> Option<S> {
        self.cap
    }

    pub fn eval(&self, xi: &Configuration<S>) -> S {
        let v = (self.f)(xi);
        match self.cap {
            Some(c) => v.min(c),
            None => v,
        }
    }
}

impl<S> fmt::Debug for StateFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateFunction({})", self.label)
    }
}

/// A function `u(α, ξ)` of a finite configuration and a configuration.
#[derive(Clone)]
pub struct SetFunction<S> {
    label: String,
    f: Arc<SetFn<S>>,
}

impl<S: Scalar> SetFunction<S> {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(&Configuration<S>, &Configuration<S>) -> S + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, alpha: &Configuration<S>, xi: &Configuration<S>) -> S {
        (self.f)(alpha, xi)
    }
}

impl<S> fmt::Debug for SetFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFunction({})", self.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_flag_is_checked() {
        let good = ProcessFunction::<f64>::deterministic("v", |x| x.site().unwrap() as f64);
        let liar = ProcessFunction::<f64> {
            deterministic: true,
            ..ProcessFunction::new("card", |_, xi| xi.len() as f64)
        };
        let pts = [Point::Site(0), Point::Site(1)];
        let cfgs = [Configuration::from_sites(&[0]), Configuration::from_sites(&[0, 1])];
        assert!(good.check_deterministic(&pts, &cfgs));
        assert!(!liar.check_deterministic(&pts, &cfgs));
    }

    #[test]
    fn capped_state_function() {
        let f = StateFunction::<f64>::new("card", |xi| xi.len() as f64).capped(1.0);
        assert_eq!(f.eval(&Configuration::from_sites(&[0, 1, 2])), 1.0);
        assert_eq!(f.eval(&Configuration::empty()), 0.0);
        assert!(StateFunction::<f64>::one().is_constant());
    }
}
