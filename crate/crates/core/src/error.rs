use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("perturbation parameter {0} outside [0, 1)")]
    InvalidPerturbation(f64),
    #[error("multiplier outside closed unit disk: |λ| = {0}")]
    MultiplierOutsideDisk(f64),
    #[error("multiplier is not on the unit circle: |λ| = {0}")]
    NotOnUnitCircle(f64),
    #[error("rotation number is rational ({p}/{q}); expected an irrational rotation")]
    RationalRotation { p: u32, q: u32 },
    #[error("composition depth {0} exceeds the supported maximum of 7")]
    CompositionTooDeep(u32),
    #[error("λ^{q} is not 1 (|λ^q − 1| = {residual:e})")]
    NotParabolic { q: u32, residual: f64 },
    #[error("degenerate germ: coefficients of order 2..={max_order} all vanish")]
    DegenerateGerm { max_order: usize },
    #[error("germ order m = {m} is neither q = {q} nor 2q")]
    UnexpectedGermOrder { m: usize, q: u32 },
    #[error("target {target} is not an attracting fixed point (|f'| = {multiplier_abs})")]
    NotAttracting { target: num_complex::Complex64, multiplier_abs: f64 },
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("period {got} exceeds the cap of {max}")]
    PeriodCap { got: u32, max: u32 },
    #[error("flagged set touches the window border; enlarge the window")]
    WindowTooSmall,
    #[error("invalid resolution {0}x{1}")]
    InvalidResolution(u32, u32),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("tile decode failed: {0}")]
    TileFormat(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for errors caused by the caller's input rather than by the
    /// computation itself.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::CompositionTooDeep(_) | Error::DegenerateGerm { .. } | Error::UnexpectedGermOrder { .. } | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
