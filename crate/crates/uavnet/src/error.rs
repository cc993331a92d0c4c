use thiserror::Error;

/// Errors produced by scenario construction, link math, and the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// A scenario or generation request with zero users.
    #[error("scenario has no users")]
    EmptyScenario,

    /// Only one- and two-UAV deployments are supported.
    #[error("unsupported UAV count {0} (expected 1 or 2)")]
    UnsupportedUavCount(usize),

    /// A numeric argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A positive rate was requested over a zero-bandwidth link.
    #[error("infeasible link: rate {rate_bps} bps requested over zero bandwidth")]
    InfeasibleLink { rate_bps: f64 },

    /// More channel groups than users to fill them.
    #[error("cannot split {users} users into {groups} groups")]
    TooManyGroups { groups: usize, users: usize },

    /// Link lists for the two UAVs do not cover the same users.
    #[error("link lists cover different user sets")]
    MismatchedUserSets,

    /// Two-UAV deployments need an even number of non-real-time channels.
    #[error("two-UAV deployment requires an even non-real-time channel count, got {0}")]
    OddGroupCount(usize),

    /// UAVs placed closer than the configured separation floor.
    #[error("UAV separation {actual_m} m below required minimum {required_m} m")]
    UavSeparation { required_m: f64, actual_m: f64 },

    /// An allocation problem the solver cannot accept.
    #[error("invalid allocation problem: {0}")]
    InvalidProblem(String),

    /// A scenario document that fails validation.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A sweep point whose solve failed; carries the offending coordinates.
    #[error("sweep failed at value {value}, replication {replication}: {source}")]
    SweepPoint {
        value: f64,
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
