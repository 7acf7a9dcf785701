use thiserror::Error;

/// Errors reported by solvers, evaluators and classification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The supplied bracket does not straddle a root.
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The iteration budget was exhausted before |f| dropped below tolerance.
    #[error(
        "root iteration did not converge after {iterations} steps (x = {last}, |f| = {residual:e})"
    )]
    MaxIterations {
        last: f64,
        residual: f64,
        iterations: usize,
    },

    /// An argument lies outside the interval an operation is defined on.
    #[error("{name} = {value} outside {bound}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },

    /// An intersection family that only exists in the other capture-radius regime.
    #[error("intersection {pair} requires the {need} regime (ell = {ell})")]
    RegimeMismatch {
        pair: &'static str,
        need: &'static str,
        ell: f64,
    },

    /// Requested quantity is not defined for this piece.
    #[error("{0} is not defined for this piece")]
    Unsupported(&'static str),

    /// Adjacent cap branches disagree at an interval junction, indicating a
    /// wrong root that would silently corrupt the assembled barrier.
    #[error("{family} cap branches disagree at vartheta = {vartheta}: {a} vs {b}")]
    JunctionMismatch {
        family: &'static str,
        vartheta: f64,
        a: f64,
        b: f64,
    },

    /// The state lies outside the chart of the requested parametrization.
    #[error("state is outside the {family} chart: {reason}")]
    OutOfChart {
        family: &'static str,
        reason: &'static str,
    },

    /// The queried state is strictly inside the capture disc.
    #[error("state at distance {r} is inside the capture circle of radius {ell}")]
    InsideCapture { r: f64, ell: f64 },

    /// Feedback controls were requested for a state no barrier piece matches.
    #[error("state does not lie on (the layer of) any barrier piece")]
    NotOnBarrier,

    /// A feedback policy produced a control outside [-1, 1].
    #[error("policy returned control {value} outside [-1, 1]")]
    PolicyRange { value: f64 },

    /// The strategy grid of the discretized game exceeds the configured cap.
    #[error("oracle grid of {size} strategy pairs exceeds cap {cap}")]
    BudgetExceeded { size: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
