use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("{what}: {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Point or region dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The rejection sampler exhausted its attempt budget.
    #[error("rejection budget of {attempts} attempts exceeded (acceptance rate {acceptance_rate:.3e})")]
    BudgetExceeded { attempts: u64, acceptance_rate: f64 },

    /// The truncated partition series cannot certify the requested accuracy.
    #[error("series truncated at k = {k_max}: Poisson tail {tail:.3e} exceeds relative tolerance {rel_tol:.1e}")]
    TruncationInsufficient { k_max: usize, tail: f64, rel_tol: f64 },

    /// A union of caps whose members overlap.
    #[error("cap union members {0} and {1} overlap")]
    OverlappingCaps(usize, usize),

    /// A union of boxes whose members overlap.
    #[error("box union members {0} and {1} overlap")]
    OverlappingBoxes(usize, usize),

    /// Rejection sampling of a region that should be non-empty found nothing.
    #[error("no sample of {0} landed in the target set")]
    EmptyIntersection(&'static str),

    /// A region literal or other textual input failed to parse.
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    /// A value that must be finite was NaN or infinite.
    #[error("{0} is not finite")]
    NotFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(
    what: &'static str,
    value: f64,
    ok: bool,
    domain: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            domain,
        })
    }
}
