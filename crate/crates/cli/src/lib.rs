//! Command-line and HTTP frontends for `contact-core`.

pub mod api;
pub mod server;
