use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Argument outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    /// Pole search exhausted its iteration budget; `trail` holds every iterate.
    #[error("pole search did not converge in {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        trail: Vec<Complex64>,
    },

    /// The iterate left the disc where the chosen Riemann-sheet expansion converges.
    #[error("pole iterate {iterate} left the convergence disc of radius {radius:e} around -i*omega0 (sheet {sheet})")]
    WrongSheet {
        iterate: Complex64,
        radius: f64,
        sheet: String,
    },

    #[error("zero convergence radius: B equals omega0 ({0})")]
    DegenerateRadius(f64),

    #[error("step size underflow at t = {t:e} (h = {step:e}); {hint}")]
    Stiffness { t: f64, step: f64, hint: String },

    /// Requested horizon exceeds half the Poincare recurrence time of the mode grid.
    #[error("t_final = {t_final:e} exceeds half the recurrence time {t_recurrence:e} of the mode grid")]
    Recurrence { t_final: f64, t_recurrence: f64 },

    #[error("grid refinement needed: {0}")]
    Refinement(String),

    #[error("fit quality: {0}")]
    FitQuality(String),

    #[error("ill-conditioned roots: {0}")]
    Conditioning(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
