use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// The chart point lies on the principal branch cut `{x = 0, 0 < |y| ≤ 1}`.
    #[error("chart point ({x}, {y}) lies on the branch cut x = 0, 0 < |y| <= 1")]
    OnCut { x: f64, y: f64 },

    #[error("degenerate operator: eigenvalue gap {gap:e} below threshold {threshold:e}")]
    Degenerate { gap: f64, threshold: f64 },

    #[error("adiabaticity criterion undefined at degeneracy (|alpha| = {alpha:e})")]
    AtDegeneracy { alpha: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("phase series undersampled near t = {t}: jump of {jump} rad is ambiguous")]
    Undersampled { t: f64, jump: f64 },

    #[error("state norm {norm:e} left [1e-12, 1e12] at t = {t}")]
    NormOutOfRange { t: f64, norm: f64 },

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("fidelity sample at t = {t} fell on the branch cut")]
    OnCutSample { t: f64 },

    #[error("coupling Omega is not real at t = {t} (|Im phidot|/|phidot| = {ratio:e})")]
    NonRealOmega { t: f64, ratio: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a numerical breakdown.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::NonFinite(_)
                | Error::OnCut { .. }
                | Error::NonRealOmega { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}
