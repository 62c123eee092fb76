use thiserror::Error;

pub type Result<T> = std::result::Result<T, FockError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("non-positive weight mass {mass} on square centered at ({re}, {im}) with side {side}")]
    NonPositiveMass {
        mass: f64,
        re: f64,
        im: f64,
        side: f64,
    },
    /// The running supremum kept growing as the window was enlarged.
    #[error("constant diverges with the window: trace {trace:?}")]
    DivergentConstant { trace: Vec<f64> },
    #[error("weight vanishes on a quadrature node of the square centered at ({re}, {im})")]
    ZeroInfimum { re: f64, im: f64 },
    #[error("degenerate weight: mass {mass} at ({re}, {im})")]
    DegenerateWeight { mass: f64, re: f64, im: f64 },
    #[error("truncation radius too tight: boundary/peak ratio {ratio:e}")]
    TruncationTooTight { ratio: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FockError {
    fn from(e: std::io::Error) -> Self {
        FockError::Io(e.to_string())
    }
}
