//! Command-line front end for the `gwt-core` engine: expression parser,
//! registry configuration files and output renderers.

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod lexer;
pub mod render;
pub mod scalar;
