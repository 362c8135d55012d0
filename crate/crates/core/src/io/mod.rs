pub mod document;
pub mod dot;
pub mod formats;
pub mod generators;
pub mod report;
