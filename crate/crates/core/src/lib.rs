pub mod bench;
pub mod conic;
pub mod error;
pub mod gcs;
pub mod heuristics;
pub mod instances;
pub mod oracle;
mod perspective;
pub mod relaxation;
pub mod report;
pub mod search;
