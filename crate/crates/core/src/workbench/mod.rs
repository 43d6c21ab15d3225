//! Workbench support: materialisation and answer statistics, and the
//! synthetic university data generator.

pub mod generator;
pub mod stats;

pub use generator::{generate_abox, generate_kb, generate_kb_with_tbox, DEFAULT_TBOX};
pub use stats::{compute_answer_stats, compute_stats, AnswerStats, MaterialisationStats};
