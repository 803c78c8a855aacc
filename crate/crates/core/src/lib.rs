//! Exact spectra of the Lichnerowicz Laplacian on symmetric tensor fields
//! over complex projective space, computed upstairs on `C^{n+1}` with
//! polynomial tensor models and exact rational linear algebra.

pub mod cli;
pub mod dims;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod polyring;
pub mod spaces;
pub mod spectra;
pub mod tensorops;

pub use error::{Error, Result};
