#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod contraction;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod gwt;
mod math;
pub mod matrix;
pub mod models;
pub mod operator;
pub mod oracle;
pub mod ordering;
pub mod scalar;

pub use error::{GwtError, Result};
