//! Configuration, runners and output writers behind the `g2flow` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
