//! Seeded synthetic data: test signals, speech-like audio, feature tables and
//! whole session cohorts with planted structure.

pub mod audio;
pub mod corpus;
pub mod cohort;
