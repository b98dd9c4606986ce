use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} must be positive, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no shock window: f(P0) = {f_min:.6e} >= 0, f has fewer than two positive roots")]
    NoShockWindow { f_min: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("trajectory reached vacuum (P = {p:.3e}) at y = {y:.6}")]
    VacuumHit { y: f64, p: f64 },

    #[error("profile did not converge: residual {residual:.3e} after span {span:.3}")]
    NoConvergence { residual: f64, span: f64 },

    #[error("no solution inside bracket: {0}")]
    Bracket(String),

    #[error("ambiguous splitting at lambda = {lambda}: spatial root with Re = {re:.3e}")]
    SplittingAmbiguous { lambda: Complex64, re: f64 },

    #[error("splitting at lambda = {lambda} is ({unstable} unstable, {stable} stable), expected (2, 2)")]
    InconsistentSplitting {
        lambda: Complex64,
        unstable: usize,
        stable: usize,
    },

    #[error("manifold integration blew up at lambda = {lambda} (growth {growth:.3e})")]
    IntegrationBlowup { lambda: Complex64, growth: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("contour refinement exceeded depth {max_depth} near lambda = {lambda}")]
    ResolutionFailure { lambda: Complex64, max_depth: usize },

    #[error("infeasible Young parameters: eps1/2 + eps3/2 = {sum:.6} must be < mu = {mu:.6} and eps2 > 0")]
    InfeasibleEps { sum: f64, mu: f64 },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("high-frequency conditions never hold for |lambda| <= {upper:.3e}")]
    NoRadius { upper: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}
