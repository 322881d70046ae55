pub mod algebra;
pub mod cartier;
pub mod drw;
pub mod error;
pub mod oracle;
pub mod witt;

pub use error::{Error, Result};
