use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the admissible domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("net benefit condition fails: p(0) ≤ m(mu)")]
    NoPositiveRate,

    #[error("golden-section ({golden}) and Newton ({newton}) optimizers disagree")]
    Numerical { golden: f64, newton: f64 },

    #[error("invalid simulation config: {0}")]
    Config(&'static str),

    #[error("dual process is not ergodic: p(0) ≤ m(mu)")]
    NonErgodic,
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    pub(crate) fn param(name: &'static str, value: f64) -> Self {
        Error::InvalidParameter { name, value }
    }
}
