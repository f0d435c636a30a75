pub mod cli;
pub mod constants;
pub mod error;
pub mod functionals;
pub mod optimizer;
pub mod profiles;
pub mod quad;
pub mod report;
pub mod specfn;
pub mod transforms;

pub use error::{Error, Result};
