//! Command implementations behind the `fairnoma` binary, split out so the
//! pieces can be unit tested.

pub mod checks;
pub mod commands;
pub mod error;
pub mod rows;
