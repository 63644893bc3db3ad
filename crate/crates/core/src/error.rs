use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` is not finite ({value})")]
    NonFiniteParameter { name: &'static str, value: f64 },

    #[error("ring of {n_cells} unit cells is too small (need at least {min})")]
    SizeTooSmall { n_cells: usize, min: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("start and end configurations have different field kinds")]
    MixedFieldKinds,

    #[error("degenerate modes at k = {k}: eigenvalues {values:?}")]
    DegenerateMode { k: f64, values: Vec<(f64, f64)> },

    #[error("ground-state energy acquires imaginary part {imag:e} at k = {k}{}", sample.map(|s| format!(" (sample {s})")).unwrap_or_default())]
    ComplexEnergy {
        k: f64,
        imag: f64,
        sample: Option<usize>,
    },

    #[error("pair energy ε₊₊+ε₊₋ is complex (imaginary part {imag:e} at k = {k}); invariants are undefined in the broken regime")]
    ComplexSpectrum { k: f64, imag: f64 },

    #[error("angle θ(k) undefined: (cos k − p, sin k) vanishes at k = {k} (p = {p})")]
    OriginHit { k: f64, p: f64 },

    #[error("two-level gap closes at k = {k}, φ = {phi}")]
    GapClosed { k: f64, phi: f64 },

    #[error("QR iteration did not converge after {iterations} iterations (n = {n})")]
    NoConvergence { n: usize, iterations: usize },

    #[error("matrix dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl Error {
    /// Stable identifier used on the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFiniteParameter { .. } => "NonFiniteParameter",
            Error::SizeTooSmall { .. } => "SizeTooSmall",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::MixedFieldKinds => "MixedFieldKinds",
            Error::DegenerateMode { .. } => "DegenerateMode",
            Error::ComplexEnergy { .. } => "ComplexEnergy",
            Error::ComplexSpectrum { .. } => "ComplexSpectrum",
            Error::OriginHit { .. } => "OriginHit",
            Error::GapClosed { .. } => "GapClosed",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::TooLarge { .. } => "TooLarge",
            Error::Dimension(_) => "Dimension",
        }
    }

    /// Input validation failures, as opposed to failures of a computation on valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteParameter { .. }
                | Error::SizeTooSmall { .. }
                | Error::InvalidGrid(_)
                | Error::MixedFieldKinds
                | Error::TooLarge { .. }
                | Error::Dimension(_)
        )
    }
}
