//! Conference participant recommender core.
//!
//! The pipeline estimates pairwise social ties from physical contact logs
//! (frequency times duration over a time window, blended across a past and
//! a present epoch), scores personality similarity as the Pearson
//! correlation of Big Five trait ratings, merges the two signals, and
//! recommends every pair whose merged score clears a threshold. Around that
//! sit two contact-only baseline scorers, a seeded train/test evaluation
//! harness reporting accuracy, MAE, and NMAE per score bucket, a synthetic
//! data generator with exact marginals, and CSV/JSON persistence.

pub mod baselines;
pub mod error;
pub mod evaluation;
pub mod hybrid;
pub mod io;
pub mod matrix;
pub mod model;
pub mod personality;
pub mod synth;
pub mod tie;

pub use error::Error;
pub use evaluation::{
    accuracy, is_relevant, mae, nmae, run_experiment, run_experiment_serial, split_pairs,
    successful_count, DatasetView, Method, MetricsReport, MetricsRow, RelevanceCriteria,
    RelevanceMode, SplitSpec,
};
pub use hybrid::{
    merge_scores, recommend, recommend_with_components, run_pipeline, Recommendation,
};
pub use matrix::PairScoreMatrix;
pub use model::{
    pair_index, validate_dataset, ConferenceConfig, ContactRecord, Dataset, Epoch,
    NormalizationMode, Pair, ParticipantId, PersonalityTrait, PersonalityVector, Violation,
};
pub use personality::{pearson, pearson_personality, personality_matrix, PersonalitySimilarity};
pub use synth::{generate_synthetic, Histogram, SynthesisParams};
pub use tie::{
    estimate_tie, raw_tie, tie_estimates, tie_matrix, OverflowPolicy, RawTie, TieEstimate,
};
