pub mod cli;
pub mod server;
pub mod service;

pub use cli::{run_cli, CliOutput};
pub use service::{Response, Service};
