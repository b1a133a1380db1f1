//! Library surface of the batch driver, exposed so the test suites can call
//! the commands in-process.

pub mod commands;
pub mod config;
pub mod csv;
