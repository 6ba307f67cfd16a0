//! Shared error type for the library.

use thiserror::Error;

use crate::model::{Epoch, ParticipantId, PersonalityTrait, Violation};

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient participants: need at least 2, got {count}")]
    InsufficientParticipants { count: usize },

    #[error("insufficient pairs: need at least 2, got {count}")]
    InsufficientPairs { count: usize },

    #[error("duplicate participant id {id}")]
    DuplicateParticipant { id: ParticipantId },

    #[error("unknown participant {id}")]
    UnknownParticipant { id: ParticipantId },

    #[error("participant {id} has no personality profile")]
    MissingProfile { id: ParticipantId },

    #[error("{id} cannot be paired with themselves")]
    SelfPair { id: ParticipantId },

    #[error("total time must be finite and positive, got {value}")]
    NonPositiveTotalTime { value: f64 },

    #[error("beta must lie in [0, 1], got {value}")]
    BetaOutOfRange { value: f64 },

    #[error("contact duration must be finite and non-negative, got {value}")]
    InvalidContactDuration { value: f64 },

    #[error("tie values must be finite and non-negative, got {value}")]
    InvalidTieValue { value: f64 },

    #[error("raw tie {value} exceeds 1 under the strict overflow policy")]
    TieOverflow { value: f64 },

    #[error(
        "raw tie for ({a}, {b}) in the {epoch} epoch exceeds 1 under the \
         strict overflow policy: {value}"
    )]
    PairTieOverflow {
        a: ParticipantId,
        b: ParticipantId,
        epoch: Epoch,
        value: f64,
    },

    #[error("{trait_name} rating {value} outside [1, 5]")]
    RatingOutOfRange {
        trait_name: PersonalityTrait,
        value: u8,
    },

    #[error("matrix dimension mismatch: {left} vs {right} participants")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrices cover different participant sets")]
    ParticipantSetMismatch,

    #[error("lambda must be finite and non-negative, got {value}")]
    InvalidLambda { value: f64 },

    #[error("dataset failed validation with {} violation(s)", violations.len())]
    InvalidDataset { violations: Vec<Violation> },

    #[error("train ratio must lie strictly between 0 and 1, got {value}")]
    InvalidTrainRatio { value: f64 },

    #[error("accuracy undefined on zero recommendations")]
    AccuracyUndefined,

    #[error("accuracy must lie in [0, 1], got {value}")]
    AccuracyOutOfRange { value: f64 },

    #[error("mean absolute error must lie in [0, 1], got {value}")]
    MaeOutOfRange { value: f64 },

    #[error("rating bounds must satisfy min < max, got [{r_min}, {r_max}]")]
    InvalidRatingBounds { r_min: f64, r_max: f64 },

    #[error("tau must be finite, got {value}")]
    TauNotFinite { value: f64 },

    #[error("no betas supplied")]
    NoBetas,

    #[error("no methods supplied")]
    NoMethods,

    #[error("unknown epoch '{token}'")]
    UnknownEpoch { token: String },

    #[error("unknown normalization mode '{token}'")]
    UnknownNormalizationMode { token: String },

    #[error("unknown method '{token}'")]
    UnknownMethod { token: String },

    #[error("unknown relevance mode '{token}'")]
    UnknownRelevanceMode { token: String },

    #[error("unknown report format '{token}'")]
    UnknownReportFormat { token: String },

    #[error("row {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("malformed report: {message}")]
    MalformedReport { message: String },

    #[error("{epoch} duration histogram holds {total} contacts but only {capacity} fit")]
    HistogramOverCapacity {
        epoch: Epoch,
        total: usize,
        capacity: usize,
    },

    #[error("{trait_name} rating counts sum to {sum}, expected {expected}")]
    TraitCountMismatch {
        trait_name: PersonalityTrait,
        sum: usize,
        expected: usize,
    },

    #[error("invalid {epoch} histogram: {message}")]
    InvalidHistogram { epoch: Epoch, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
