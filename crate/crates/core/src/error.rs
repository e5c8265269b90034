use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A perturbation exceeds the first-order regime.
    #[error("perturbation {name} = {value:e} exceeds the first-order cap {cap:e}")]
    PerturbationTooLarge {
        name: &'static str,
        value: f64,
        cap: f64,
    },

    /// The slab refinement did not settle before the slab limit.
    #[error(
        "transfer matrix did not converge after {slabs} slabs: \
         last iterates t = {last:?}, previous t = {previous:?}"
    )]
    NonConvergence {
        slabs: usize,
        last: (f64, f64),
        previous: (f64, f64),
    },

    /// Transmitted weight too small to normalize packet averages.
    #[error("transmitted number {0:e} is too small to normalize packet averages")]
    DegenerateTransmission(f64),

    /// The required run count does not fit the count type.
    #[error("required run count {required:e} overflows the run counter")]
    RunCountOverflow { required: f64 },

    /// Two phase budgets that were not computed under the same conditions.
    #[error("incompatible budgets: {0}")]
    IncompatibleBudgets(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
