pub mod check;
pub mod condition;
pub mod experiment;
pub mod generate;

/// Seed streams of the command-line front end.
pub const STREAM_GENERATE: u64 = 10;
pub const STREAM_CONDITION: u64 = 11;
pub const STREAM_TI: u64 = 12;
pub const STREAM_TRUTH: u64 = 13;
