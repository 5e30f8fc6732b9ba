//! Ground spaces and finite simple configurations.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};

/// Largest discrete ground space.
pub const MAX_SITES: usize = 20;
/// Largest discrete ground space for exact (exhaustive) evaluation.
pub const MAX_EXACT_SITES: usize = 15;
/// Largest configuration accepted by [`subsets_of`].
pub const MAX_SUBSET_POINTS: usize = 20;

/// Coordinates of a point of a continuous window, `dim <= 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coords<S> {
    xs: [S; 3],
    dim: u8,
}

impl<S: Scalar> Coords<S> {
    pub fn new(coords: &[S]) -> Self {
        assert!((1..=3).contains(&coords.len()), "dimension must be 1, 2 or 3");
        let mut xs = [S::zero(); 3];
        xs[..coords.len()].copy_from_slice(coords);
        Self {
            xs,
            dim: coords.len() as u8,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn as_slice(&self) -> &[S] {
        &self.xs[..self.dim()]
    }

    pub fn distance(&self, other: &Self) -> S {
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .sum::<S>()
            .sqrt()
    }
}

/// A point of the ground space: a site index or window coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point<S> {
    Site(usize),
    Loc(Coords<S>),
}

impl<S: Scalar> Point<S> {
    pub fn at(coords: &[S]) -> Self {
        Point::Loc(Coords::new(coords))
    }

    pub fn site(&self) -> Option<usize> {
        match self {
            Point::Site(i) => Some(*i),
            Point::Loc(_) => None,
        }
    }

    pub fn coords(&self) -> Option<&Coords<S>> {
        match self {
            Point::Site(_) => None,
            Point::Loc(c) => Some(c),
        }
    }

    fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Point::Site(a), Point::Site(b)) => a.cmp(b),
            (Point::Loc(a), Point::Loc(b)) => a
                .as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal),
            (Point::Site(_), Point::Loc(_)) => std::cmp::Ordering::Less,
            (Point::Loc(_), Point::Site(_)) => std::cmp::Ordering::Greater,
        }
    }
}

impl<S: Scalar> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Site(i) => write!(f, "{i}"),
            Point::Loc(c) => {
                write!(f, "(")?;
                for (i, x) in c.as_slice().iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Reference space `E` with its measure `lambda`.
#[derive(Clone, Debug, PartialEq)]
pub enum GroundSpace<S> {
    /// Sites `0..m` with weights `lambda(x) > 0`.
    Discrete { weights: Vec<S> },
    /// Axis-aligned box with `lambda = density * Lebesgue`.
    Window { bounds: Vec<(S, S)>, density: S },
}

impl<S: Scalar> GroundSpace<S> {
    pub fn discrete(weights: Vec<S>) -> Result<Self> {
        if weights.is_empty() || weights.len() > MAX_SITES {
            return Err(Error::InvalidGround(format!(
                "site count {} outside 1..={MAX_SITES}",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > S::zero() && w.is_finite())) {
            return Err(Error::InvalidGround(format!("site weight {w} must be positive")));
        }
        Ok(GroundSpace::Discrete { weights })
    }

    /// `m` sites of unit weight.
    pub fn sites(m: usize) -> Result<Self> {
        Self::discrete(vec![S::one(); m])
    }

    pub fn window(bounds: Vec<(S, S)>, density: S) -> Result<Self> {
        if !(1..=3).contains(&bounds.len()) {
            return Err(Error::InvalidGround(format!(
                "window dimension {} outside 1..=3",
                bounds.len()
            )));
        }
        if bounds
            .iter()
            .any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::InvalidGround("window bounds must be finite with lo < hi".into()));
        }
        if !(density > S::zero() && density.is_finite()) {
            return Err(Error::InvalidGround("window density must be positive".into()));
        }
        Ok(GroundSpace::Window { bounds, density })
    }

    pub fn unit_interval() -> Self {
        GroundSpace::Window {
            bounds: vec![(S::zero(), S::one())],
            density: S::one(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, GroundSpace::Discrete { .. })
    }

    pub fn site_count(&self) -> Option<usize> {
        match self {
            GroundSpace::Discrete { weights } => Some(weights.len()),
            GroundSpace::Window { .. } => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            GroundSpace::Discrete { .. } => None,
            GroundSpace::Window { bounds, .. } => Some(bounds.len()),
        }
    }

    /// `lambda({x})` for a site.
    pub fn site_weight(&self, site: usize) -> S {
        match self {
            GroundSpace::Discrete { weights } => weights[site],
            GroundSpace::Window { .. } => panic!("site weight on a continuous window"),
        }
    }

    pub fn weights(&self) -> Option<&[S]> {
        match self {
            GroundSpace::Discrete { weights } => Some(weights),
            GroundSpace::Window { .. } => None,
        }
    }

    /// Lebesgue volume of a window.
    pub fn volume(&self) -> S {
        match self {
            GroundSpace::Discrete { weights } => S::from_count(weights.len()),
            GroundSpace::Window { bounds, .. } => bounds.iter().fold(S::one(), |acc, (lo, hi)| acc * (*hi - *lo)),
        }
    }

    /// `lambda(E)`.
    pub fn total_mass(&self) -> S {
        match self {
            GroundSpace::Discrete { weights } => ordered_sum(weights.iter().copied()),
            GroundSpace::Window { density, .. } => *density * self.volume(),
        }
    }

    pub fn contains(&self, x: &Point<S>) -> bool {
        match (self, x) {
            (GroundSpace::Discrete { weights }, Point::Site(i)) => *i < weights.len(),
            (GroundSpace::Window { bounds, .. }, Point::Loc(c)) => {
                c.dim() == bounds.len()
                    && c.as_slice()
                        .iter()
                        .zip(bounds)
                        .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
            }
            _ => false,
        }
    }

    pub fn check(&self, x: &Point<S>) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideGround(x.to_string()))
        }
    }

    /// All sites as points (discrete only).
    pub fn site_points(&self) -> Vec<Point<S>> {
        (0..self.site_count().unwrap_or(0)).map(Point::Site).collect()
    }
}

/// A finite simple point set. Discrete configurations are kept sorted by
/// site; window configurations keep their points sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Configuration<S> {
    points: Vec<Point<S>>,
}

impl<S: Scalar> Configuration<S> {
    pub fn empty() -> Self {
        Self { points: Vec::new() }
    }

    /// Builds a configuration, rejecting duplicates.
    pub fn new(mut points: Vec<Point<S>>) -> Result<Self> {
        points.sort_by(|a, b| a.cmp_key(b));
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel(format!("duplicate point {}", w[0])));
        }
        Ok(Self { points })
    }

    pub fn from_sites(sites: &[usize]) -> Self {
        Self::new(sites.iter().map(|&i| Point::Site(i)).collect()).expect("distinct sites")
    }

    /// Sites whose bits are set in `mask`.
    pub fn from_mask(mask: u32) -> Self {
        Self {
            points: (0..32)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| Point::Site(i as usize))
                .collect(),
        }
    }

    /// Bitmask of the occupied sites; `None` for window configurations.
    pub fn site_mask(&self) -> Option<u32> {
        self.points
            .iter()
            .try_fold(0u32, |acc, p| p.site().map(|i| acc | 1 << i))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point<S>> {
        self.points.iter()
    }

    pub fn contains(&self, x: &Point<S>) -> bool {
        self.points.iter().any(|p| p == x)
    }

    /// `xi ∪ x` (unchanged when `x` is already present).
    pub fn with(&self, x: Point<S>) -> Self {
        if self.contains(&x) {
            return self.clone();
        }
        let at = self.points.partition_point(|p| p.cmp_key(&x).is_lt());
        let mut points = self.points.clone();
        points.insert(at, x);
        Self { points }
    }

    /// `xi ∪ {x_1, ..., x_k}`.
    pub fn with_all<'a>(&self, xs: impl IntoIterator<Item = &'a Point<S>>) -> Self {
        xs.into_iter().fold(self.clone(), |acc, x| acc.with(*x))
    }

    /// `xi \ x` (unchanged when `x` is absent).
    pub fn without(&self, x: &Point<S>) -> Self {
        Self {
            points: self.points.iter().filter(|p| *p != x).copied().collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.with_all(other.iter())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self {
            points: self.points.iter().filter(|p| !other.contains(p)).copied().collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !self.points.iter().any(|p| other.contains(p))
    }

    /// Serializes as one line: comma-separated indices or coordinate tuples.
    pub fn to_line(&self) -> String {
        self.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Parses the line format of [`Configuration::to_line`] against a ground space.
    pub fn parse_line(line: &str, ground: &GroundSpace<S>) -> Result<Self> {
        let line = line.trim();
        if line.is_empty() {
            return Ok(Self::empty());
        }
        let points = match ground {
            GroundSpace::Discrete { .. } => line
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map(Point::Site)
                        .map_err(|e| Error::Parse(format!("site index {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?,
            GroundSpace::Window { .. } => line
                .split(',')
                .map(|t| {
                    let inner = t
                        .trim()
                        .strip_prefix('(')
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| Error::Parse(format!("coordinate tuple {t:?}")))?;
                    let coords = inner
                        .split_whitespace()
                        .map(|c| {
                            c.parse::<f64>()
                                .map(S::lit)
                                .map_err(|e| Error::Parse(format!("coordinate {c:?}: {e}")))
                        })
                        .collect::<Result<Vec<S>>>()?;
                    if !(1..=3).contains(&coords.len()) {
                        return Err(Error::Parse(format!("tuple {t:?} has bad dimension")));
                    }
                    Ok(Point::at(&coords))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        for p in &points {
            ground.check(p)?;
        }
        Self::new(points).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<S: Scalar> fmt::Display for Configuration<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_line())
    }
}

/// `∫ u(x, xi) xi(dx) = sum_{x in xi} u(x, xi)`.
pub fn point_sum<S: Scalar>(u: impl Fn(&Point<S>, &Configuration<S>) -> S, xi: &Configuration<S>) -> S {
    ordered_sum(xi.iter().map(|x| u(x, xi)))
}

/// `sum_{x in xi} u(x, xi \ x)`.
pub fn reduced_point_sum<S: Scalar>(u: impl Fn(&Point<S>, &Configuration<S>) -> S, xi: &Configuration<S>) -> S {
    ordered_sum(xi.iter().map(|x| u(x, &xi.without(x))))
}

/// All subsets of `xi` (of size `k` when given), ordered by the bitmask of
/// their positions within `xi`.
pub fn subsets_of<S: Scalar>(xi: &Configuration<S>, k: Option<usize>) -> Result<Vec<Configuration<S>>> {
    let n = xi.len();
    if n > MAX_SUBSET_POINTS {
        return Err(Error::SubsetOverflow {
            len: n,
            max: MAX_SUBSET_POINTS,
        });
    }
    Ok((0u32..1 << n)
        .filter(|mask| k.is_none_or(|k| mask.count_ones() as usize == k))
        .map(|mask| Configuration {
            points: (0..n).filter(|i| mask >> i & 1 == 1).map(|i| xi.points[i]).collect(),
        })
        .collect())
}
