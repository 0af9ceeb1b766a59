//! Batch analytics for recorded human-avatar conversation sessions.
//!
//! The crate ingests session bundles (audio, emotion-probability frames,
//! moment-by-moment rating streams and post-conversation surveys), scores them,
//! maps facial emotion output onto a valence/activation plane, extracts a fixed
//! 53-entry prosodic feature vector from participant audio, and predicts
//! conversational success with a linear SVM under leave-one-out validation.
//!
//! ```text
//! bundle dir -> session_store -> impact_metrics ----------> stats_report
//!                            \-> emotion_space --\
//!                            \-> audio_dsp -------+-> predictor
//! ```

pub mod audio_dsp;
pub mod cli;
pub mod config;
pub mod emotion_space;
pub mod impact_metrics;
pub mod predictor;
pub mod session_store;
pub mod stats_report;
pub mod synth;
