pub mod features;
pub mod fixtures;
pub mod oracle;
pub mod spectrum;
pub mod tree;
