use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {requested} exceeds the configured cap of {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("no sign change of B_{order} found on (0, {bound}]")]
    NoRoot { order: usize, bound: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate basis: {0}")]
    DegenerateBasis(&'static str),

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
