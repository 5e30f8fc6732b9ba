//! Outcome of a numerical identity check.

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "mc",
        }
    }
}

/// A value with its standard error (zero for exact evaluations).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate<S> {
    pub value: S,
    pub stderr: S,
}

impl<S: Scalar> Estimate<S> {
    pub fn exact(value: S) -> Self {
        Self {
            value,
            stderr: S::zero(),
        }
    }

    pub fn new(value: S, stderr: S) -> Self {
        Self { value, stderr }
    }

    pub fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            stderr: (self.stderr * self.stderr + other.stderr * other.stderr).sqrt(),
        }
    }

    pub fn scale(self, factor: S) -> Self {
        Self {
            value: self.value * factor,
            stderr: self.stderr * factor.abs(),
        }
    }
}

/// One summand of a right-hand side (a partition, a binomial index, ...).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term<S> {
    pub label: String,
    pub value: S,
    pub stderr: S,
}

impl<S: Scalar> Term<S> {
    pub fn new(label: impl Into<String>, estimate: Estimate<S>) -> Self {
        Self {
            label: label.into(),
            value: estimate.value,
            stderr: estimate.stderr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport<S> {
    pub identity: String,
    pub mode: Mode,
    pub lhs: Estimate<S>,
    pub rhs: Estimate<S>,
    /// Relative tolerance in exact mode, critical z-value in Monte Carlo mode.
    pub tolerance: S,
    /// Standard error of `lhs - rhs`.
    pub stderr: S,
    pub pass: bool,
    pub terms: Vec<Term<S>>,
    pub notes: Vec<String>,
}

impl<S: Scalar> IdentityReport<S> {
    /// `pass` iff `|lhs - rhs| <= tol * (1 + |lhs|)`.
    pub fn exact(identity: impl Into<String>, lhs: S, rhs: S, tol: S) -> Self {
        let pass = (lhs - rhs).abs() <= tol * (S::one() + lhs.abs());
        Self {
            identity: identity.into(),
            mode: Mode::Exact,
            lhs: Estimate::exact(lhs),
            rhs: Estimate::exact(rhs),
            tolerance: tol,
            stderr: S::zero(),
            pass,
            terms: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// `pass` iff `|lhs - rhs| <= z_crit * stderr`, with the standard error of
    /// the difference taken as independent unless `paired_stderr` is given.
    /// The standard error is floored at `1e-12 (1 + |lhs|)` so that two
    /// error-free sides are compared up to rounding.
    pub fn monte_carlo(
        identity: impl Into<String>,
        lhs: Estimate<S>,
        rhs: Estimate<S>,
        paired_stderr: Option<S>,
        z_crit: S,
    ) -> Self {
        let se = paired_stderr.unwrap_or_else(|| (lhs.stderr * lhs.stderr + rhs.stderr * rhs.stderr).sqrt());
        let floor = S::lit(1e-12) * (S::one() + lhs.value.abs());
        let pass = (lhs.value - rhs.value).abs() <= z_crit * se.max(floor);
        Self {
            identity: identity.into(),
            mode: Mode::MonteCarlo,
            lhs,
            rhs,
            tolerance: z_crit,
            stderr: se,
            pass,
            terms: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_terms(mut self, terms: Vec<Term<S>>) -> Self {
        self.terms = terms;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn difference(&self) -> S {
        self.lhs.value - self.rhs.value
    }

    /// CSV columns `identity,mode,lhs,rhs,stderr,tolerance,pass`.
    pub fn csv_record(&self) -> [String; 7] {
        [
            self.identity.clone(),
            self.mode.as_str().to_string(),
            format!("{:e}", self.lhs.value.as_f64()),
            format!("{:e}", self.rhs.value.as_f64()),
            format!("{:e}", self.stderr.as_f64()),
            format!("{:e}", self.tolerance.as_f64()),
            self.pass.to_string(),
        ]
    }
}

pub const CSV_HEADER: [&str; 7] = ["identity", "mode", "lhs", "rhs", "stderr", "tolerance", "pass"];
