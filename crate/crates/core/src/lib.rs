pub mod dga;
pub mod error;
pub mod factorize;
pub mod gca;
pub mod homology;
pub mod jet;
pub mod linalg;
pub mod tate;
pub mod trace;

pub use error::{Error, Result};
