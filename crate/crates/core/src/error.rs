use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An enumeration or construction would exceed a configured cap.
    #[error("resource limit exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    /// Input violates the operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A property that is supposed to hold by construction or by a theorem failed.
    #[error("property violated: {0}")]
    PropertyViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}

/// Caps shared by the enumeration-heavy operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Limits {
    /// Maximum number of enumerated search units (subsets, multisets, tuples).
    pub budget: u64,
    /// Maximum number of convex sets produced by an intersection closure.
    pub closure_cap: usize,
    /// Maximum |P| for which the subset lattice 2^|P| is materialized.
    pub lattice_points: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            budget: 500_000_000,
            closure_cap: 1 << 20,
            lattice_points: 13,
        }
    }
}

impl Limits {
    pub fn with_budget(budget: u64) -> Self {
        Limits {
            budget,
            ..Limits::default()
        }
    }

    pub(crate) fn charge(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.budget as u128 {
            return Err(Error::ResourceLimit {
                what,
                needed,
                cap: self.budget as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_lattice(&self, points: usize) -> Result<()> {
        if points > self.lattice_points {
            return Err(Error::ResourceLimit {
                what: "subset lattice 2^|P|",
                needed: 1u128 << points.min(127),
                cap: 1u128 << self.lattice_points,
            });
        }
        Ok(())
    }
}
