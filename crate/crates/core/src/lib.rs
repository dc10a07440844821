//! Static test-quality analysis for Unity C# projects.

pub mod cli;
pub mod config;
pub mod csharp;
pub mod diag;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod scanner;
pub mod smells;
pub mod taxonomy;
pub mod text;
