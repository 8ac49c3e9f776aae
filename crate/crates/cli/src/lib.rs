//! Command-line and HTTP front ends over [`stockgraph::engine::Engine`].

pub mod app;
pub mod commands;
pub mod config;
pub mod http;
