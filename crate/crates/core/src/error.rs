use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dense expansion or matrix would exceed the configured size limit.
    #[error("resource limit: {what} needs {needed} entries, limit is {limit} (raise --max-dense)")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not Hermitian: |H[{row}][{col}] - conj(H[{col}][{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below tolerance")]
    NotPsd { eigenvalue: f64 },

    /// Input density matrix does not have the party-site-symmetric structure.
    #[error("not a party-site-symmetric reduction: entry {entry} is {found}, class value is {expected} (deviation {deviation:e})")]
    NotPss {
        entry: String,
        expected: String,
        found: String,
        deviation: f64,
    },

    #[error("no closed form: {0}")]
    NotCovered(String),

    #[error("theorem inapplicable: {0}")]
    Inapplicable(String),

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
