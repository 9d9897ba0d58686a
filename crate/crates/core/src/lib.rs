pub mod data;
pub mod error;
pub mod filtration;
pub mod killing;
pub mod linalg;
pub mod model;
pub mod nomizu;
pub mod recovery;
pub mod reductivity;
pub mod report;
pub mod tensor;

pub use error::{Error, Result};
