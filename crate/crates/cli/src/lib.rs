// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end: input parsing, report writers and the command
//! implementations behind the `optblocks` binary.

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
