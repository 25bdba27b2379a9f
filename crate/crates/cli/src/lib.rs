//! Library surface of the command-line front end: subcommand
//! implementations, config schemas and the table emitter, reused by the
//! binary and its integration tests.

pub mod commands;
pub mod config;
pub mod table;
