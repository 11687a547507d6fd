use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arith: {0}")]
    Arith(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("cf: {0}")]
    Cf(String),
    #[error("red: {0}")]
    Red(String),
    #[error("coset: {0}")]
    Coset(String),
    #[error("symbols: {0}")]
    Symbols(String),
    #[error("cusp: {0}")]
    Cusp(String),
    #[error("lms: {0}")]
    Lms(String),
    #[error("qsm: {0}")]
    Qsm(String),
}

impl Error {
    /// Module-qualified short code, used by the CLI's error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Arith(_) => "arith",
            Error::Parse(_) => "parse",
            Error::Cf(_) => "cf",
            Error::Red(_) => "red",
            Error::Coset(_) => "coset",
            Error::Symbols(_) => "symbols",
            Error::Cusp(_) => "cusp",
            Error::Lms(_) => "lms",
            Error::Qsm(_) => "qsm",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
