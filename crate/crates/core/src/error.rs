use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("characteristic function has a pole here (|denominator| = {0:e})")]
    Pole(f64),

    #[error("unsupported derivative order ({order_w}, {order_qh}): total order must not exceed 4")]
    UnsupportedOrder { order_w: usize, order_qh: usize },

    #[error("undefined quantity: {0}")]
    Undefined(String),

    #[error("truncation n_max = {n_max} is too small ({reason}); try n_max >= {suggested}")]
    TruncationTooSmall {
        n_max: usize,
        suggested: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
