pub mod error;
pub mod generate;
pub mod instance;
pub mod koszul;
pub mod liealg;
pub mod numkit;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
