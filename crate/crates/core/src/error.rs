use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("root finding failed in {op} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("no feasible delta_T > {min:e} on the search grid: {msg}")]
    DeltaInfeasible { min: f64, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("evolution became non-finite at t = {t} (step {step}): {msg}")]
    Instability { t: f64, step: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
