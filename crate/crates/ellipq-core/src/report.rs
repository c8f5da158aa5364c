//! Structured pass/fail records with residual witnesses.

use alloc::string::String;
use alloc::vec::Vec;

/// First nonzero coefficient of a failed identity: where it sits and what
/// it is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Matrix position (row, col) for image-level residuals.
    pub entry: Option<(usize, usize)>,
    /// Exponent vector of the offending series term, as (variable, power).
    pub exponents: Vec<(String, i32)>,
    /// Rendered value of the coefficient (or tensor term).
    pub value: String,
}

/// Outcome of one identity check.
#[derive(Debug, Clone)]
pub struct IdentityResult {
    /// Stable identifier, e.g. "pentagon" or "face-diff-eq[p1,z1]".
    pub id: String,
    /// Residual was identically zero at the configured orders.
    pub zero: bool,
    /// Present exactly when `zero` is false.
    pub witness: Option<Witness>,
    /// Deliberately broken variant: the check *must* produce a nonzero
    /// residual, and "pass" means it did.
    pub negative_control: bool,
}

impl IdentityResult {
    pub fn pass(id: impl Into<String>) -> Self {
        IdentityResult {
            id: id.into(),
            zero: true,
            witness: None,
            negative_control: false,
        }
    }

    pub fn fail(id: impl Into<String>, witness: Witness) -> Self {
        IdentityResult {
            id: id.into(),
            zero: false,
            witness: Some(witness),
            negative_control: false,
        }
    }

    pub fn from_residual(id: impl Into<String>, witness: Option<Witness>) -> Self {
        match witness {
            None => Self::pass(id),
            Some(w) => Self::fail(id, w),
        }
    }

    /// Mark as negative control (the expected outcome inverts).
    pub fn negative(mut self) -> Self {
        self.negative_control = true;
        self
    }

    /// Did the check behave as required?
    pub fn ok(&self) -> bool {
        if self.negative_control {
            !self.zero
        } else {
            self.zero
        }
    }
}

/// A batch of identity checks run under one configuration.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub results: Vec<IdentityResult>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: IdentityResult) {
        self.results.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = IdentityResult>) {
        self.results.extend(rs);
    }

    /// Every non-control identity reduced to zero and every negative
    /// control produced a residual.
    pub fn all_ok(&self) -> bool {
        self.results.iter().all(|r| r.ok())
    }

    pub fn failed(&self) -> impl Iterator<Item = &IdentityResult> {
        self.results.iter().filter(|r| !r.ok())
    }
}

/// Witness helpers for matrix-of-series residuals.
pub mod witness {
    use super::Witness;
    use crate::ratfunc::RatFunc;
    use crate::series::TruncatedSeries;
    use crate::superop::SuperOp;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec::Vec;

    /// Witness from a matrix of truncated series (first nonzero entry and
    /// its lexicographically first term).
    pub fn from_series_op(residual: &SuperOp<TruncatedSeries>) -> Option<Witness> {
        residual.first_nonzero().map(|(r, c, s)| {
            let (exponents, value) = s
                .first_term()
                .map(|(e, v)| (e, format!("{v}")))
                .unwrap_or((Vec::new(), "0".to_string()));
            Witness {
                entry: Some((r, c)),
                exponents,
                value,
            }
        })
    }

    /// Witness from a matrix of rational functions.
    pub fn from_ratfunc_op(residual: &SuperOp<RatFunc>) -> Option<Witness> {
        residual.first_nonzero().map(|(r, c, v)| Witness {
            entry: Some((r, c)),
            exponents: Vec::new(),
            value: format!("{v}"),
        })
    }

    /// Free-form witness for tensor-algebra residuals.
    pub fn from_text(value: impl ToString) -> Witness {
        Witness {
            entry: None,
            exponents: Vec::new(),
            value: value.to_string(),
        }
    }
}
