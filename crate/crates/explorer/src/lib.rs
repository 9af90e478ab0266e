//! Command-line and HTTP front end for `cubiclab`.

pub mod cache;
pub mod cli;
pub mod config;
pub mod jobs;
pub mod pool;
pub mod server;
