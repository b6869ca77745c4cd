pub mod besselpot;
pub mod error;
pub mod gamma;
pub mod hypwave;
pub mod jet;
pub mod modbessel;
pub mod quad;
pub mod report;
pub mod verifier;

pub use error::{HypwaveError, Result};
pub use num_complex::Complex64;
