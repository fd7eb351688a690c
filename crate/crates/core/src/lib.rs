//! Exact secular-coefficient engine for renormalization-group perturbation
//! of ordinary differential equations.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod difference;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod perturb;
pub mod rg;
pub mod verify;

pub use error::{Error, Result};
pub use gaussian::{GaussianRational, Gq};
