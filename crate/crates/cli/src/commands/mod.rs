pub mod amend;
pub mod annotate;
pub mod report;
pub mod score;
pub mod validate;

mod outputs;
