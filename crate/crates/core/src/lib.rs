//! Exact p-adic Hecke machinery.

pub mod arith;
pub mod canonical;
pub mod cm;
pub mod divisor;
pub mod error;
pub mod exec;
pub mod kite;
pub mod orbit;
pub mod padic;
pub mod qexp;

pub use arith::{Rat, Val};
pub use divisor::Divisor;
pub use error::{Error, Result};
pub use exec::Exec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
