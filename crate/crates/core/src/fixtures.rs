//! Named test functions and models, selectable by string.
//!
//! Names take optional comma-separated parameters after a colon, such as
//! `affine:0.5,0.25` or `site-indicator:1`. Sites are numbered from 0.
//!
//! | process functions `u(x, ξ)` | |
//! |---|---|
//! | `const[:c]` | `c` (default 1) |
//! | `position` | `1 + p(x)`, `p` the site index or first coordinate |
//! | `indicator` | `1_A(x)` with `A` the lower half of the ground space |
//! | `site-indicator:s` | `1_{x = s}` (discrete only) |
//! | `cardinality` | `|ξ|` |
//! | `affine[:a,b]` | `a (1 + p(x)) + b |ξ ∖ x|` (defaults 0.5, 0.25) |
//! | `exvisible` | `1_A(x) (1 + |ξ ∖ A|)` |
//!
//! State functions `F(ξ)`: `one`, `const:c`, `cardinality[:cap]`,
//! `empty-indicator`. Set functions `u(α, ξ)`: `one`, `size`,
//! `size-over-cardinality` (`|α|² / (1 + |ξ|)`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::configuration::{Configuration, GroundSpace, Point};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::models::{Activity, Model, PairPotential};
use crate::moments::{ProcessFunction, SetFunction, StateFunction};
use crate::scalar::Scalar;

fn split(name: &str) -> (&str, Vec<&str>) {
    match name.split_once(':') {
        Some((head, args)) => (head.trim(), args.split(',').map(str::trim).collect()),
        None => (name.trim(), Vec::new()),
    }
}

fn param<S: Scalar>(name: &str, args: &[&str], i: usize, default: Option<f64>) -> Result<S> {
    match args.get(i) {
        Some(s) => s
            .parse::<f64>()
            .map(S::lit)
            .map_err(|_| Error::Parse(format!("fixture `{name}`: parameter `{s}` is not a number"))),
        None => default
            .map(S::lit)
            .ok_or_else(|| Error::Parse(format!("fixture `{name}` needs parameter {}", i + 1))),
    }
}

fn position<S: Scalar>(x: &Point<S>) -> S {
    match x {
        Point::Site(i) => S::from_count(*i),
        Point::Loc(c) => c.as_slice()[0],
    }
}

/// Membership in the lower half: sites `< ⌈m/2⌉`, or first coordinate below
/// the midpoint.
fn lower_half<S: Scalar>(ground: &GroundSpace<S>) -> impl Fn(&Point<S>) -> bool + Send + Sync + 'static {
    let (sites, mid) = match ground {
        GroundSpace::Discrete { weights } => (weights.len().div_ceil(2), S::zero()),
        GroundSpace::Window { bounds, .. } => (0, (bounds[0].0 + bounds[0].1) / S::lit(2.0)),
    };
    move |x| match x {
        Point::Site(i) => *i < sites,
        Point::Loc(c) => c.as_slice()[0] < mid,
    }
}

fn indicator<S: Scalar>(b: bool) -> S {
    if b {
        S::one()
    } else {
        S::zero()
    }
}

pub fn process_function<S: Scalar>(name: &str, ground: &GroundSpace<S>) -> Result<ProcessFunction<S>> {
    let (head, args) = split(name);
    let u = match head {
        "const" => ProcessFunction::constant(param(name, &args, 0, Some(1.0))?),
        "position" => ProcessFunction::deterministic(name, |x| S::one() + position(x)).nonnegative(),
        "indicator" => {
            let a = lower_half(ground);
            ProcessFunction::deterministic(name, move |x| indicator(a(x)))
                .nonnegative()
                .bounded_by(S::one())
        }
        "site-indicator" => {
            let s = param::<S>(name, &args, 0, None)?;
            let site = s.to_usize().filter(|i| S::from_count(*i) == s);
            match (site, ground.site_count()) {
                (Some(site), Some(m)) if site < m => {
                    ProcessFunction::deterministic(name, move |x| indicator(x.site() == Some(site)))
                        .nonnegative()
                        .bounded_by(S::one())
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "fixture `{name}` needs a site of a discrete space"
                    )))
                }
            }
        }
        "cardinality" => ProcessFunction::new(name, |_, xi| S::from_count(xi.len())).nonnegative(),
        "affine" => {
            let a = param::<S>(name, &args, 0, Some(0.5))?;
            let b = param::<S>(name, &args, 1, Some(0.25))?;
            let u = ProcessFunction::new(name, move |x, xi| {
                let rest = xi.len() - usize::from(xi.contains(x));
                a * (S::one() + position(x)) + b * S::from_count(rest)
            });
            if a >= S::zero() && b >= S::zero() {
                u.nonnegative()
            } else {
                u
            }
        }
        "exvisible" => {
            let a = lower_half(ground);
            ProcessFunction::new(name, move |x, xi| {
                if a(x) {
                    S::one() + S::from_count(xi.iter().filter(|y| !a(y)).count())
                } else {
                    S::zero()
                }
            })
            .nonnegative()
        }
        _ => return Err(Error::Parse(format!("unknown process function `{name}`"))),
    };
    Ok(u)
}

/// A deterministic `v(x)`; names resolving to ξ-dependent functions are
/// rejected.
pub fn deterministic_function<S: Scalar>(name: &str, ground: &GroundSpace<S>) -> Result<ProcessFunction<S>> {
    let v = process_function(name, ground)?;
    if v.is_deterministic() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("fixture `{name}` depends on the configuration")))
    }
}

pub fn state_function<S: Scalar>(name: &str) -> Result<StateFunction<S>> {
    let (head, args) = split(name);
    let f = match head {
        "one" => StateFunction::one(),
        "const" => StateFunction::constant(param(name, &args, 0, None)?),
        "cardinality" => {
            let f = StateFunction::new("cardinality", |xi: &Configuration<S>| S::from_count(xi.len()));
            if args.is_empty() {
                f
            } else {
                f.capped(param(name, &args, 0, None)?)
            }
        }
        "empty-indicator" => StateFunction::new(name, |xi: &Configuration<S>| indicator(xi.is_empty())),
        _ => return Err(Error::Parse(format!("unknown state function `{name}`"))),
    };
    Ok(f)
}

pub fn set_function<S: Scalar>(name: &str) -> Result<SetFunction<S>> {
    let u = match split(name).0 {
        "one" => SetFunction::new(name, |_, _| S::one()),
        "size" => SetFunction::new(name, |a: &Configuration<S>, _| S::from_count(a.len())),
        "size-over-cardinality" => SetFunction::new(name, |a: &Configuration<S>, xi: &Configuration<S>| {
            S::from_count(a.len() * a.len()) / S::from_count(1 + xi.len())
        }),
        _ => return Err(Error::Parse(format!("unknown set function `{name}`"))),
    };
    Ok(u)
}

/// A symmetric 3×3 kernel with spectrum in `[0, 0.9]`, fixed by the seed.
pub fn random_kernel<S: Scalar>(seed: u64) -> Matrix<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut m = vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            m[3 * i + j] = (0..3).map(|l| a[3 * i + l] * a[3 * j + l]).sum();
        }
    }
    let gram = Matrix::from_row_major(3, m).expect("3×3");
    let top = symmetric_eigenvalues(&gram).into_iter().fold(0.0, f64::max);
    gram.map(|v| S::lit(0.9 * *v / top))
}

/// The discrete acceptance fixtures: Poisson `z ∈ {0.5, 1}` on 1 to 3 sites,
/// Gibbs with `φ(0,1) = ln 2` and a hard-core chain, and three determinantal
/// kernels.
pub fn discrete_models<S: Scalar>() -> Vec<(String, Model<S>)> {
    let mut out = Vec::new();
    for z in [0.5, 1.0] {
        for m in 1..=3 {
            let model = Model::poisson(GroundSpace::sites(m).expect("m ≥ 1"), Activity::Constant(S::lit(z)));
            out.push((format!("poisson(z={z}, m={m})"), model.expect("valid")));
        }
    }
    let ln2 = Matrix::from_rows(vec![
        vec![S::zero(), S::lit(std::f64::consts::LN_2)],
        vec![S::lit(std::f64::consts::LN_2), S::zero()],
    ])
    .expect("2×2");
    let gibbs = Model::gibbs(
        GroundSpace::sites(2).expect("2"),
        Activity::Constant(S::one()),
        PairPotential::Table(ln2),
    );
    out.push(("gibbs(ln2, m=2)".into(), gibbs.expect("valid")));
    let inf = S::infinity();
    let chain = Matrix::from_rows(vec![
        vec![S::zero(), inf, S::zero()],
        vec![inf, S::zero(), inf],
        vec![S::zero(), inf, S::zero()],
    ])
    .expect("3×3");
    let hard = Model::gibbs(
        GroundSpace::sites(3).expect("3"),
        Activity::Constant(S::one()),
        PairPotential::Table(chain),
    );
    out.push(("gibbs(hard-core chain, m=3)".into(), hard.expect("valid")));
    let k1 = Matrix::from_rows(vec![vec![S::lit(0.5), S::lit(0.25)], vec![S::lit(0.25), S::lit(0.5)]]).expect("2×2");
    let k2 = Matrix::diagonal(&[S::lit(0.2), S::lit(0.5)]);
    for (name, k) in [
        ("[[0.5,0.25],[0.25,0.5]]", k1),
        ("diag(0.2,0.5)", k2),
        ("random 3×3", random_kernel(7)),
    ] {
        let m = k.dim();
        let model = Model::determinantal(GroundSpace::sites(m).expect("m ≥ 1"), k).expect("valid kernel");
        out.push((format!("determinantal({name})"), model));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        let g = GroundSpace::<f64>::sites(3).unwrap();
        for name in [
            "const",
            "const:2",
            "position",
            "indicator",
            "site-indicator:2",
            "cardinality",
            "affine",
            "affine:1,0.5",
            "exvisible",
        ] {
            assert!(process_function(name, &g).is_ok(), "{name}");
        }
        assert!(process_function("site-indicator:3", &g).is_err());
        assert!(process_function("site-indicator:1.5", &g).is_err());
        assert!(process_function("nope", &g).is_err());
        assert!(deterministic_function("cardinality", &g).is_err());
        assert!(state_function::<f64>("cardinality:4").unwrap().cap().is_some());
        assert!(state_function::<f64>("const").is_err());
        assert!(set_function::<f64>("size").is_ok());
    }

    #[test]
    fn fixture_values() {
        let g = GroundSpace::<f64>::sites(3).unwrap();
        let xi = Configuration::from_sites(&[0, 2]);
        let aff = process_function("affine:0.5,0.25", &g).unwrap();
        assert_eq!(aff.eval(&Point::Site(2), &xi), 0.5 * 3.0 + 0.25);
        assert_eq!(aff.eval(&Point::Site(1), &xi), 0.5 * 2.0 + 0.5);
        let ind = process_function("indicator", &g).unwrap();
        assert_eq!(ind.eval(&Point::Site(1), &xi), 1.0);
        assert_eq!(ind.eval(&Point::Site(2), &xi), 0.0);
        let ex = process_function("exvisible", &g).unwrap();
        assert_eq!(ex.eval(&Point::Site(0), &xi), 2.0);
        let empty = state_function::<f64>("empty-indicator").unwrap();
        assert_eq!(empty.eval(&Configuration::empty()), 1.0);
        assert_eq!(empty.eval(&xi), 0.0);
    }

    #[test]
    fn random_kernel_spectrum() {
        let k = random_kernel::<f64>(7);
        let ev = symmetric_eigenvalues(&k);
        assert!(ev.iter().all(|e| *e >= -1e-12 && *e <= 0.9 + 1e-12));
        assert!(ev.iter().any(|e| (*e - 0.9).abs() < 1e-12));
    }

    #[test]
    fn fixtures_build() {
        assert_eq!(discrete_models::<f64>().len(), 11);
    }
}
