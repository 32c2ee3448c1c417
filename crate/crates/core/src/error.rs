use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the evaluation and verification routines.
///
/// Every variant names the module that raised it and the offending data, so
/// a message can be traced back to the hyperplane, gamma factor or chamber
/// wall that caused it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("hcseries: spectral hyperplane <nu-2xi,nu> = 0 hit at nu = {nu:?} (|<nu-2xi,nu>| = {magnitude:.3e})")]
    SpectralPlaneSingularity { nu: Vec<i32>, magnitude: f64 },

    #[error("{module}: position {x:?} is outside the {family} chamber ({reason})")]
    ChamberViolation {
        module: &'static str,
        family: &'static str,
        x: Vec<f64>,
        reason: String,
    },

    #[error("special: gamma pole in {factor} at argument {arg}")]
    PoleOfGamma { factor: String, arg: Complex64 },

    #[error("wavefn: spectral point lies within {distance:.3e} of hyperplane {hyperplane}; use the regularized evaluation")]
    NearSingularSpectral { hyperplane: String, distance: f64 },

    #[error("wavefn: extrapolation toward {hyperplane} diverges like 1/delta (samples {samples:?})")]
    ExtrapolationDivergence { hyperplane: String, samples: Vec<f64> },

    #[error("bispectral: rational pole in {factor} at argument {arg}")]
    RationalPole { factor: String, arg: Complex64 },

    #[error("{module}: invalid argument: {message}")]
    InvalidArgument {
        module: &'static str,
        message: String,
    },

    #[error("export: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(module: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            module,
            message: message.into(),
        }
    }

    /// Short machine-readable tag of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SpectralPlaneSingularity { .. } => "SpectralPlaneSingularity",
            Error::ChamberViolation { .. } => "ChamberViolation",
            Error::PoleOfGamma { .. } => "PoleOfGamma",
            Error::NearSingularSpectral { .. } => "NearSingularSpectral",
            Error::ExtrapolationDivergence { .. } => "ExtrapolationDivergence",
            Error::RationalPole { .. } => "RationalPole",
            Error::InvalidArgument { .. } => "InvalidArgument",
            Error::Format(_) => "Format",
        }
    }

    /// Module that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "domain",
            Error::SpectralPlaneSingularity { .. } => "hcseries",
            Error::ChamberViolation { module, .. } => module,
            Error::PoleOfGamma { .. } => "special",
            Error::NearSingularSpectral { .. } | Error::ExtrapolationDivergence { .. } => "wavefn",
            Error::RationalPole { .. } => "bispectral",
            Error::InvalidArgument { module, .. } => module,
            Error::Format(_) => "export",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
