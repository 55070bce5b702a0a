//! Random data generators, brute-force oracles, fixture loaders, published
//! reference values and a service-process helper shared by the workbench
//! test suites.

pub mod fixtures;
pub mod gen;
pub mod oracle;
pub mod server;
pub mod tables;
