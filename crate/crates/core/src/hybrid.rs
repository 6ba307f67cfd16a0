//! Merged tie + personality scoring, thresholding, and the end-to-end
//! recommendation pipeline.
//!
//! The merged score of a pair is the plain sum of its estimated tie and its
//! personality similarity. Under min-max normalization that sum is rescaled
//! linearly onto [0, 1] across all pairs, which puts the recommendation
//! threshold on a dataset-relative footing; `raw_sum` keeps the absolute
//! scale, where a personality similarity of 1 alone can carry a pair with no
//! contact history over thresholds up to 1.

use std::num::NonZeroUsize;

use crate::error::Error;
use crate::matrix::PairScoreMatrix;
use crate::model::{validate_dataset, Dataset, NormalizationMode, ParticipantId};
use crate::personality::personality_matrix;
use crate::tie::tie_matrix;

/// One directed recommendation row.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub for_participant: ParticipantId,
    pub suggested: ParticipantId,
    pub merged_score: f64,
    /// Estimated tie of the pair, 0.0 for scorers without a decomposition.
    pub tie_component: f64,
    /// Personality similarity of the pair, 0.0 for scorers without one.
    pub personality_component: f64,
    /// `merged_score` rounded to one decimal; groups rows for evaluation.
    pub bucket: f64,
}

/// One-decimal bucket of a merged score, as an integer count of tenths.
pub(crate) fn bucket_tenths(score: f64) -> i64 {
    (score * 10.0).round() as i64
}

/// One-decimal bucket label of a merged score.
pub fn score_bucket(score: f64) -> f64 {
    bucket_tenths(score) as f64 / 10.0
}

/// Elementwise tie + personality sum over two matrices sharing one roster,
/// rescaled according to `mode`. Min-max over a constant matrix maps every
/// pair to 0.5.
pub fn merge_scores(
    ties: &PairScoreMatrix,
    personalities: &PairScoreMatrix,
    mode: NormalizationMode,
) -> Result<PairScoreMatrix, Error> {
    if ties.len() != personalities.len() {
        return Err(Error::DimensionMismatch {
            left: ties.len(),
            right: personalities.len(),
        });
    }
    if !ties.same_roster(personalities) {
        return Err(Error::ParticipantSetMismatch);
    }
    let mut merged = ties.clone();
    for (slot, &p) in merged.values_mut().iter_mut().zip(personalities.values()) {
        *slot += p;
    }
    if mode == NormalizationMode::MinMax {
        let (min, max) = merged.min_max();
        let range = max - min;
        for slot in merged.values_mut() {
            *slot = if range == 0.0 {
                0.5
            } else {
                (*slot - min) / range
            };
        }
    }
    Ok(merged)
}

/// Threshold pass over merged scores. Every pair at or above `gamma` is
/// emitted in both directions; each participant's list is ordered by
/// descending score with ties broken by ascending partner id, then cut to
/// `top_n`. Participants themselves appear in roster order.
pub fn recommend(
    merged: &PairScoreMatrix,
    gamma: f64,
    top_n: Option<NonZeroUsize>,
) -> Vec<Recommendation> {
    recommend_with_components(merged, None, gamma, top_n)
        .expect("absent components cannot mismatch")
}

/// Same pass, carrying per-pair tie and personality components into the
/// emitted rows. Component matrices must share the merged matrix's roster.
pub fn recommend_with_components(
    merged: &PairScoreMatrix,
    components: Option<(&PairScoreMatrix, &PairScoreMatrix)>,
    gamma: f64,
    top_n: Option<NonZeroUsize>,
) -> Result<Vec<Recommendation>, Error> {
    if let Some((ties, personalities)) = components {
        if !merged.same_roster(ties) || !merged.same_roster(personalities) {
            return Err(Error::ParticipantSetMismatch);
        }
    }

    let n = merged.len();
    let mut out = Vec::new();
    for i in 0..n {
        let mut rows: Vec<Recommendation> = (0..n)
            .filter(|&j| j != i)
            .filter_map(|j| {
                let score = merged.at_rank(i, j);
                (score >= gamma).then(|| {
                    let (tie, personality) = components
                        .map(|(t, p)| (t.at_rank(i, j), p.at_rank(i, j)))
                        .unwrap_or((0.0, 0.0));
                    Recommendation {
                        for_participant: merged.ids()[i].clone(),
                        suggested: merged.ids()[j].clone(),
                        merged_score: score,
                        tie_component: tie,
                        personality_component: personality,
                        bucket: score_bucket(score),
                    }
                })
            })
            .collect();
        rows.sort_by(|x, y| {
            y.merged_score
                .partial_cmp(&x.merged_score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| x.suggested.cmp(&y.suggested))
        });
        if let Some(limit) = top_n {
            rows.truncate(limit.get());
        }
        out.extend(rows);
    }
    Ok(out)
}

/// Full scoring pass over a dataset: tie matrix, personality matrix, merge,
/// threshold. Refuses datasets that fail validation.
pub fn run_pipeline(d: &Dataset) -> Result<Vec<Recommendation>, Error> {
    let violations = validate_dataset(d);
    if !violations.is_empty() {
        return Err(Error::InvalidDataset { violations });
    }
    let ties = tie_matrix(d, d.config.beta)?;
    let personalities = personality_matrix(d)?;
    let merged = merge_scores(&ties, &personalities, d.config.normalization_mode)?;
    recommend_with_components(
        &merged,
        Some((&ties, &personalities)),
        d.config.gamma,
        d.config.top_n,
    )
}
