use crate::configuration::{point_sum, reduced_point_sum, Configuration, GroundSpace, Point};
use crate::error::{Error, Result};
use crate::models::Intensity;
use crate::partitions::{enumerate_partitions, Partition};
use crate::report::{Estimate, IdentityReport, Term};
use crate::scalar::{ordered_sum, Scalar};

use super::{axis_nodes, integrate_tuples, Evaluator, ProcessFunction, StateFunction, MAX_ORDER};

/// `∫ f(y) λ(dy)` on quadrature axis `axis`.
fn integrate_on_axis<S: Scalar>(ground: &GroundSpace<S>, axis: usize, nodes: usize, f: impl Fn(&Point<S>) -> S) -> S {
    ordered_sum(axis_nodes(ground, axis, nodes).iter().map(|(x, w)| *w * f(x)))
}

/// `∫ u(y, ξ) c(y, ξ) λ(dy)`.
fn compensator<S: Scalar>(
    intensity: &dyn Intensity<S>,
    u: &ProcessFunction<S>,
    xi: &Configuration<S>,
    axis: usize,
    nodes: usize,
) -> S {
    integrate_on_axis(intensity.ground(), axis, nodes, |y| {
        let c = intensity.c(y, xi);
        if c == S::zero() {
            S::zero()
        } else {
            u.eval(y, xi) * c
        }
    })
}

/// `∫ u(y, ξ) ν(dy) = Σ_{y∈ξ} u(y, ξ) − ∫ u(y, ξ) c(y, ξ) λ(dy)`.
pub fn compensated_integral<S: Scalar>(
    intensity: &dyn Intensity<S>,
    u: &ProcessFunction<S>,
    xi: &Configuration<S>,
    nodes: usize,
) -> S {
    point_sum(|y, xi| u.eval(y, xi), xi) - compensator(intensity, u, xi, 0, nodes)
}

/// `δ(u) = Σ_{y∈ξ} u(y, ξ∖y) − ∫ u(y, ξ) c(y, ξ) λ(dy)`.
pub fn divergence<S: Scalar>(
    intensity: &dyn Intensity<S>,
    u: &ProcessFunction<S>,
    xi: &Configuration<S>,
    nodes: usize,
) -> S {
    reduced_point_sum(|y, xi| u.eval(y, xi), xi) - compensator(intensity, u, xi, 0, nodes)
}

/// `D_x F(ξ) = F(ξ ∪ x) − F(ξ ∖ x)`.
pub fn difference_op<S: Scalar>(f: &StateFunction<S>, x: &Point<S>, xi: &Configuration<S>) -> S {
    f.eval(&xi.with(*x)) - f.eval(&xi.without(x))
}

/// `G = ĉ({x_1..x_k}, ξ) Π_j c(z_j, ξ ∪ {x_1..x_k})`.
pub fn g_k_factor<S: Scalar>(
    intensity: &dyn Intensity<S>,
    xs: &[Point<S>],
    zs: &[Point<S>],
    xi: &Configuration<S>,
) -> S {
    let mut g = intensity.c_hat(xs, xi);
    if g == S::zero() || zs.is_empty() {
        return g;
    }
    let grown = xi.with_all(xs);
    for z in zs {
        g *= intensity.c(z, &grown);
        if g == S::zero() {
            break;
        }
    }
    g
}

fn binomial<S: Scalar>(n: usize, i: usize) -> S {
    S::lit((0..i).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64))
}

/// `(i, P)` pairs of the binomial-partition expansion; `T_0` is the empty partition.
fn binomial_partitions(n: usize) -> Result<Vec<(usize, Option<Partition>)>> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::PartitionBound { n, max: MAX_ORDER });
    }
    let mut out = Vec::new();
    for i in 0..=n {
        if i == n {
            out.push((i, None));
            continue;
        }
        for k in 1..=n - i {
            for p in enumerate_partitions(n - i, Some(k))? {
                out.push((i, Some(p)));
            }
        }
    }
    Ok(out)
}

fn binomial_label(i: usize, p: &Option<Partition>) -> String {
    match p {
        Some(p) => format!("i={i} {p}"),
        None => format!("i={i} ∅"),
    }
}

fn block_sizes(p: &Option<Partition>) -> Vec<i32> {
    p.as_ref()
        .map(|p| p.block_sizes().map(|s| s as i32).collect())
        .unwrap_or_default()
}

impl<S: Scalar> Evaluator<'_, S> {
    /// `E[F δ(u)] = E[∫ D_z F(ξ) u(z, ξ) c(z, ξ) λ(dz)]`.
    pub fn check_duality(&self, f: &StateFunction<S>, u: &ProcessFunction<S>) -> IdentityReport<S> {
        let intensity = self.intensity;
        let ground = self.ground();
        let rhs = |xi: &Configuration<S>, nodes: usize| {
            vec![integrate_tuples(ground, 1, 1, nodes, |z| {
                let c = intensity.c(&z[0], xi);
                if c == S::zero() {
                    return S::zero();
                }
                difference_op(f, &z[0], xi) * u.eval(&z[0], xi) * c
            })]
        };
        let free = self.configuration_free(&[u], Some(f));
        let nodes = self.nodes();
        self.compare(
            &format!("duality(u={}, F={})", u.label(), f.label()),
            |xi| f.eval(xi) * divergence(intensity, u, xi, nodes),
            rhs,
            vec!["∫ D F u c dλ".into()],
            free,
        )
    }

    /// `E[δ(u)²]` against the three-term expansion (squared-intensity term,
    /// two-point cross term, squared compensator).
    pub fn check_skorohod(&self, u: &ProcessFunction<S>) -> IdentityReport<S> {
        let intensity = self.intensity;
        let ground = self.ground();
        let rhs = |xi: &Configuration<S>, nodes: usize| {
            let t1 = integrate_tuples(ground, 1, 1, nodes, |y| {
                let c = intensity.c(&y[0], xi);
                if c == S::zero() {
                    return S::zero();
                }
                u.eval(&y[0], xi).powi(2) * c
            });
            let t2 = integrate_tuples(ground, 2, 2, nodes, |yz| {
                let c = intensity.c_hat(yz, xi);
                if c == S::zero() {
                    return S::zero();
                }
                let (y, z) = (&yz[0], &yz[1]);
                let two = S::lit(2.0);
                u.eval(y, &xi.with(*z)) * (u.eval(z, &xi.with(*y)) - two * u.eval(z, xi)) * c
            });
            let t3 = compensator(intensity, u, xi, 0, nodes).powi(2);
            vec![t1, t2, t3]
        };
        let free = self.configuration_free(&[u], None);
        let nodes = self.nodes();
        self.compare(
            &format!("skorohod(u={})", u.label()),
            |xi| divergence(intensity, u, xi, nodes).powi(2),
            rhs,
            vec!["∫ u² c dλ".into(), "∫∫ cross ĉ dλ²".into(), "(∫ u c dλ)²".into()],
            free,
        )
    }

    /// `E[δ(u)²]` against the difference-operator grouping of the same terms:
    /// `∫ u² c`, `∫∫ D_z u(y) D_y u(z) ĉ({y,z})` and `−∫∫ u(z) u(y) c(z) D_z c(y)`.
    pub fn check_skorohod_difference_form(&self, u: &ProcessFunction<S>) -> IdentityReport<S> {
        let intensity = self.intensity;
        let ground = self.ground();
        let d =
            |v: &Point<S>, at: &Point<S>, xi: &Configuration<S>| u.eval(v, &xi.with(*at)) - u.eval(v, &xi.without(at));
        let rhs = |xi: &Configuration<S>, nodes: usize| {
            let t1 = integrate_tuples(ground, 1, 1, nodes, |y| {
                let c = intensity.c(&y[0], xi);
                if c == S::zero() {
                    return S::zero();
                }
                u.eval(&y[0], xi).powi(2) * c
            });
            let t2 = integrate_tuples(ground, 2, 2, nodes, |yz| {
                let c = intensity.c_hat(yz, xi);
                if c == S::zero() {
                    return S::zero();
                }
                let (y, z) = (&yz[0], &yz[1]);
                d(y, z, xi) * d(z, y, xi) * c
            });
            // all pairs, the diagonal included
            let t3 = integrate_tuples(ground, 2, 0, nodes, |yz| {
                let (y, z) = (&yz[0], &yz[1]);
                let cz = intensity.c(z, xi);
                if cz == S::zero() {
                    return S::zero();
                }
                let dc = intensity.c(y, &xi.with(*z)) - intensity.c(y, &xi.without(z));
                -(u.eval(z, xi) * u.eval(y, xi) * cz * dc)
            });
            vec![t1, t2, t3]
        };
        let free = self.configuration_free(&[u], None);
        let nodes = self.nodes();
        self.compare(
            &format!("skorohod-difference-form(u={})", u.label()),
            |xi| divergence(intensity, u, xi, nodes).powi(2),
            rhs,
            vec!["∫ u² c dλ".into(), "∫∫ Du Du ĉ dλ²".into(), "−∫∫ u u c Dc dλ²".into()],
            free,
        )
    }

    fn compensated_terms<'s>(
        &'s self,
        f: &'s StateFunction<S>,
        u: &'s ProcessFunction<S>,
        n: usize,
    ) -> Result<(Vec<String>, impl Fn(&Configuration<S>, usize) -> Vec<S> + Sync + 's)> {
        let expansion = binomial_partitions(n)?;
        let labels = expansion.iter().map(|(i, p)| binomial_label(*i, p)).collect();
        let intensity = self.intensity;
        let ground = self.ground();
        let rhs = move |xi: &Configuration<S>, nodes: usize| {
            expansion
                .iter()
                .map(|(i, p)| {
                    let sign = if i % 2 == 0 { S::one() } else { -S::one() };
                    let coef = sign * binomial::<S>(n, *i);
                    let sizes = block_sizes(p);
                    let k = sizes.len();
                    coef * integrate_tuples(ground, k, k, nodes, |x| {
                        let c = intensity.c_hat(x, xi);
                        if c == S::zero() {
                            return S::zero();
                        }
                        let eta = xi.with_all(x);
                        let mut v = c * f.eval(&eta);
                        for (xl, s) in x.iter().zip(&sizes) {
                            v *= u.eval(xl, &eta).powi(*s);
                        }
                        if *i > 0 {
                            v *= compensator(intensity, u, &eta, k, nodes).powi(*i as i32);
                        }
                        v
                    })
                })
                .collect()
        };
        Ok((labels, rhs))
    }

    /// Binomial-partition expansion of `E[F (∫ u dν)^n]`.
    pub fn compensated_moment_rhs(
        &self,
        f: &StateFunction<S>,
        u: &ProcessFunction<S>,
        n: usize,
    ) -> Result<(Estimate<S>, Vec<Term<S>>)> {
        let (labels, rhs) = self.compensated_terms(f, u, n)?;
        Ok(self.expand(labels, rhs, self.configuration_free(&[u], Some(f))))
    }

    pub fn check_compensated_moment(
        &self,
        f: &StateFunction<S>,
        u: &ProcessFunction<S>,
        n: usize,
    ) -> Result<IdentityReport<S>> {
        let (labels, rhs) = self.compensated_terms(f, u, n)?;
        let intensity = self.intensity;
        let nodes = self.nodes();
        Ok(self.compare(
            &format!("compensated-moment(n={n}, u={}, F={})", u.label(), f.label()),
            |xi| f.eval(xi) * compensated_integral(intensity, u, xi, nodes).powi(n as i32),
            rhs,
            labels,
            self.configuration_free(&[u], Some(f)),
        ))
    }

    fn divergence_terms<'s>(
        &'s self,
        f: &'s StateFunction<S>,
        u: &'s ProcessFunction<S>,
        n: usize,
    ) -> Result<(Vec<String>, impl Fn(&Configuration<S>, usize) -> Vec<S> + Sync + 's)> {
        let expansion = binomial_partitions(n)?;
        let labels = expansion.iter().map(|(i, p)| binomial_label(*i, p)).collect();
        let intensity = self.intensity;
        let ground = self.ground();
        let rhs = move |xi: &Configuration<S>, nodes: usize| {
            expansion
                .iter()
                .map(|(i, p)| {
                    let sign = if i % 2 == 0 { S::one() } else { -S::one() };
                    let coef = sign * binomial::<S>(n, *i);
                    let sizes = block_sizes(p);
                    let k = sizes.len();
                    coef * integrate_tuples(ground, k + i, k, nodes, |all| {
                        let (xs, zs) = all.split_at(k);
                        let g = g_k_factor(intensity, xs, zs, xi);
                        if g == S::zero() {
                            return S::zero();
                        }
                        let eta = xi.with_all(xs);
                        let mut v = g * f.eval(&eta);
                        for z in zs {
                            v *= u.eval(z, &eta);
                        }
                        for (xl, s) in xs.iter().zip(&sizes) {
                            v *= u.eval(xl, &eta.without(xl)).powi(*s);
                        }
                        v
                    })
                })
                .collect()
        };
        Ok((labels, rhs))
    }

    /// Expansion of `E[F δ(u)^n]` with the `G_k` factor over `E^{i+k}`.
    pub fn divergence_moment_rhs(
        &self,
        f: &StateFunction<S>,
        u: &ProcessFunction<S>,
        n: usize,
    ) -> Result<(Estimate<S>, Vec<Term<S>>)> {
        let (labels, rhs) = self.divergence_terms(f, u, n)?;
        Ok(self.expand(labels, rhs, self.configuration_free(&[u], Some(f))))
    }

    pub fn check_divergence_moment(
        &self,
        f: &StateFunction<S>,
        u: &ProcessFunction<S>,
        n: usize,
    ) -> Result<IdentityReport<S>> {
        let (labels, rhs) = self.divergence_terms(f, u, n)?;
        let intensity = self.intensity;
        let nodes = self.nodes();
        Ok(self.compare(
            &format!("divergence-moment(n={n}, u={}, F={})", u.label(), f.label()),
            |xi| f.eval(xi) * divergence(intensity, u, xi, nodes).powi(n as i32),
            rhs,
            labels,
            self.configuration_free(&[u], Some(f)),
        ))
    }

    fn expand<R>(&self, labels: Vec<String>, rhs: R, free: bool) -> (Estimate<S>, Vec<Term<S>>)
    where
        R: Fn(&Configuration<S>, usize) -> Vec<S> + Sync,
    {
        let nodes = self.nodes();
        let terms: Vec<Estimate<S>> = if free {
            rhs(&Configuration::empty(), nodes)
                .into_iter()
                .map(Estimate::exact)
                .collect()
        } else {
            let rows = self.law.evaluate(|xi| rhs(xi, nodes));
            (0..labels.len()).map(|j| rows.mean(j)).collect()
        };
        let total = terms.iter().fold(Estimate::exact(S::zero()), |acc, t| acc.add(*t));
        (
            total,
            labels.into_iter().zip(terms).map(|(l, t)| Term::new(l, t)).collect(),
        )
    }
}
