pub mod error;
pub mod bgw;
pub mod kdv;
pub mod psdo;
pub mod series;
pub mod verify;
pub mod wk;

pub use error::{Error, Result};

/// Engine version, stamped into caches and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
