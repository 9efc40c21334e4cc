pub mod error;
pub mod freegroup;
pub mod outer_space;
pub mod random;
pub mod report;
pub mod stats;
pub mod tree;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
