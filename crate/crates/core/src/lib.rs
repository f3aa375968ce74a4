pub mod analytic;
pub mod basis;
pub mod cli;
pub mod copula;
pub mod data;
pub mod error;
pub mod inference;
pub mod joint;
pub mod link;
pub mod marginal;
pub mod normal;
pub mod optim;
pub mod sim;
mod terms;

pub use basis::{BasisSpec, MonotoneCoefficients};
pub use data::{Column, Dataset, Observation};
pub use error::{Error, Result};
pub use inference::{FitResult, Method};
pub use link::Link;
pub use marginal::{fit_marginal, MarginalOutcomeModel};
