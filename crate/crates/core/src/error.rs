use thiserror::Error;

/// Errors surfaced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A genericity constraint failed (parameter too close to a forbidden lattice).
    #[error("genericity violation: {what} (margin {margin:.3e})")]
    Genericity { what: String, margin: f64 },

    /// A sampling system was too ill-conditioned to trust the expansion.
    #[error("sampling system ill-conditioned: cond {cond:.3e} exceeds 1e8")]
    Conditioning { cond: f64 },

    /// An image function failed to lie in the expected target space.
    #[error("membership residual {residual:.3e} exceeds bound {bound:.3e}")]
    Membership { residual: f64, bound: f64 },

    /// An intertwiner matrix could not be inverted reliably.
    #[error("intertwiner matrix numerically singular: cond {cond:.3e}")]
    Singular { cond: f64 },

    /// The regularized diagonal branch needs partial derivatives the
    /// function did not supply.
    #[error("partial derivatives required near the diagonal set")]
    DerivativeRequired,
}

pub type Result<T> = std::result::Result<T, CoreError>;
