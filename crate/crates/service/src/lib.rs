//! Command-line tool, HTTP service and bench harness around the `floorwalk`
//! routing core.

pub mod bench;
pub mod cli;
pub mod protocol;
pub mod route;
pub mod server;
pub mod store;
