pub mod building;
pub mod cli;
pub mod endoscopy;
pub mod error;
pub mod linalg;
pub mod local_field;
pub mod root_datum;
pub mod tori_cohomology;
pub mod value;

pub use error::{Error, Result};
