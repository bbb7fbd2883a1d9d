//! Local surrogation of quantum learning models.
//!
//! Small statevector simulation of data-reuploading circuits, training of
//! local quantum surrogates on windows of a target's input space, and
//! classical Fourier surrogates fitted to those circuits.

pub mod dataprep;
pub mod error;
pub mod metrics;
pub mod optim;
pub mod qsvm;
mod linalg;
pub mod qstate;
pub mod regions;
pub mod reupload;
pub mod surrogate;
pub mod targets;

pub use error::{Error, Result};
