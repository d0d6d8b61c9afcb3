//! Sessions, persistence, the HTTP service and the command-line front end of the workbench.

pub mod cli;
pub mod error;
pub mod http;
pub mod session;
pub mod store;

pub use error::{GatewayError, Result};
pub use session::Session;
pub use store::Store;
