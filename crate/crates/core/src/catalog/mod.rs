//! Manifold catalog, scenario files, the runner and reports.

pub mod manifolds;
pub mod report;
pub mod runner;
pub mod scenario;
