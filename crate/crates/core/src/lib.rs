pub mod error;
pub mod family;
pub mod lattice;
pub mod log_kodaira;
pub mod matrix;
pub mod obstruction;
pub mod projection;
pub mod scenario;
mod serde_int;
pub mod surfaces;
pub mod threefold;

pub use error::{Error, Result};
