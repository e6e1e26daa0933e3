pub mod block;
pub mod block_prescribe;
pub mod cli;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod prescribe;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
