pub mod classify;
pub mod dem;
pub mod error;
pub mod fixtures;
pub mod morphology;
pub mod oracle;
pub mod spectrum;
