//! Train/test pair splitting, relevance judgment, and the metric sweep.
//!
//! Evaluation splits the *pair universe*, not the participants: every
//! unordered pair lands in exactly one side, scorers are fitted on the
//! contact records of train pairs only, and a recommendation counts as
//! successful when its pair looks relevant in the held-out view. Accuracy is
//! the successful share, MAE its complement, and NMAE spreads MAE over the
//! rating scale width.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{c1_score, c2_score};
use crate::error::Error;
use crate::hybrid::{
    bucket_tenths, merge_scores, recommend, recommend_with_components, Recommendation,
};
use crate::matrix::PairScoreMatrix;
use crate::model::{pair_index, validate_dataset, Dataset, Epoch, Pair, PersonalityVector};
use crate::personality::{pearson_personality, personality_matrix, PersonalitySimilarity};
use crate::tie::{estimate_tie, raw_tie, OverflowPolicy};

pub const DEFAULT_TRAIN_RATIO: f64 = 0.7;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TAU: f64 = 0.5;

/// Metric buckets reported by the sweep, as one-decimal score labels.
pub const EVALUATED_BUCKETS: [f64; 3] = [0.8, 0.9, 1.0];

/// Scoring methods the harness can evaluate side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sparp,
    C1,
    C2,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Sparp, Method::C1, Method::C2];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sparp => "sparp",
            Method::C1 => "c1",
            Method::C2 => "c2",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "sparp" => Ok(Method::Sparp),
            "c1" => Ok(Method::C1),
            "c2" => Ok(Method::C2),
            _ => Err(Error::UnknownMethod {
                token: s.to_owned(),
            }),
        }
    }
}

/// Seeded pair-partition recipe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Share of pairs assigned to training, strictly between 0 and 1.
    pub train_ratio: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_ratio: DEFAULT_TRAIN_RATIO,
            seed: DEFAULT_SEED,
        }
    }
}

/// What makes a recommended pair count as relevant in the held-out view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceMode {
    /// Estimated tie from test-view records clears tau.
    TestTie,
    /// Personality similarity clears tau.
    TestPersonality,
    /// Either signal clears tau.
    Either,
}

impl RelevanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RelevanceMode::TestTie => "test_tie",
            RelevanceMode::TestPersonality => "test_personality",
            RelevanceMode::Either => "either",
        }
    }
}

impl fmt::Display for RelevanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelevanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "test_tie" => Ok(RelevanceMode::TestTie),
            "test_personality" => Ok(RelevanceMode::TestPersonality),
            "either" => Ok(RelevanceMode::Either),
            _ => Err(Error::UnknownRelevanceMode {
                token: s.to_owned(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceCriteria {
    pub mode: RelevanceMode,
    /// Threshold applied to the normalized tie and to the similarity.
    pub tau: f64,
}

impl Default for RelevanceCriteria {
    fn default() -> Self {
        Self {
            mode: RelevanceMode::Either,
            tau: DEFAULT_TAU,
        }
    }
}

/// Read view over one side of a pair split. Contact lookups outside the
/// visible pair set come back empty, so hidden pairs carry a tie of 0;
/// profiles are not pair data and stay fully visible.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetView<'a> {
    dataset: &'a Dataset,
    pairs: BTreeSet<Pair>,
    contacts: BTreeMap<(Pair, Epoch), (f64, u32)>,
    beta: f64,
}

impl<'a> DatasetView<'a> {
    /// View over `pairs`, with `beta` fixing how tie lookups blend epochs.
    pub fn new(
        dataset: &'a Dataset,
        pairs: impl IntoIterator<Item = Pair>,
        beta: f64,
    ) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::BetaOutOfRange { value: beta });
        }
        let pairs: BTreeSet<Pair> = pairs.into_iter().collect();
        let mut contacts = BTreeMap::new();
        for c in &dataset.contacts {
            let pair = c.pair()?;
            if pairs.contains(&pair) {
                contacts.insert((pair, c.epoch), (c.duration_minutes, c.frequency));
            }
        }
        Ok(Self {
            dataset,
            pairs,
            contacts,
            beta,
        })
    }

    pub fn pairs(&self) -> &BTreeSet<Pair> {
        &self.pairs
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn contains(&self, pair: &Pair) -> bool {
        self.pairs.contains(pair)
    }

    /// Standalone dataset holding only the contacts this view exposes.
    pub fn restricted_dataset(&self) -> Dataset {
        let mut d = self.dataset.clone();
        d.contacts
            .retain(|c| c.pair().map(|p| self.pairs.contains(&p)).unwrap_or(false));
        d
    }

    /// Estimated tie of a pair from the records this view exposes.
    pub fn estimated_tie(&self, pair: &Pair) -> Result<f64, Error> {
        let total = self.dataset.config.total_time_minutes;
        let epoch_tie = |epoch: Epoch| -> Result<f64, Error> {
            match self.contacts.get(&(pair.clone(), epoch)) {
                Some(&(duration, frequency)) => {
                    Ok(raw_tie(frequency, duration, total, OverflowPolicy::Strict)?.value)
                }
                None => Ok(0.0),
            }
        };
        estimate_tie(
            epoch_tie(Epoch::Past)?,
            epoch_tie(Epoch::Present)?,
            self.beta,
        )
    }

    pub fn personality_similarity(&self, pair: &Pair) -> Result<PersonalitySimilarity, Error> {
        let profile = |id| -> Result<&PersonalityVector, Error> {
            self.dataset
                .profiles
                .get(id)
                .ok_or_else(|| Error::MissingProfile {
                    id: pair.first().clone(),
                })
        };
        pearson_personality(profile(pair.first())?, profile(pair.second())?)
    }
}

/// Seeded uniform pair-level partition of the dataset's pair universe.
/// `round(train_ratio * P)` pairs train; the rest test. Disjoint and
/// exhaustive by construction, deterministic per seed.
pub fn split_pairs<'a>(
    d: &'a Dataset,
    spec: &SplitSpec,
) -> Result<(DatasetView<'a>, DatasetView<'a>), Error> {
    if !(spec.train_ratio.is_finite() && 0.0 < spec.train_ratio && spec.train_ratio < 1.0) {
        return Err(Error::InvalidTrainRatio {
            value: spec.train_ratio,
        });
    }
    let mut pairs = pair_index(d)?;
    if pairs.len() < 2 {
        return Err(Error::InsufficientPairs { count: pairs.len() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    pairs.shuffle(&mut rng);
    let train_len = (spec.train_ratio * pairs.len() as f64).round() as usize;
    let test = pairs.split_off(train_len.min(pairs.len()));

    let beta = d.config.beta;
    Ok((
        DatasetView::new(d, pairs, beta)?,
        DatasetView::new(d, test, beta)?,
    ))
}

/// Whether a pair clears the relevance criteria in the given view.
pub fn is_relevant(
    view: &DatasetView,
    pair: &Pair,
    crit: &RelevanceCriteria,
) -> Result<bool, Error> {
    match crit.mode {
        RelevanceMode::TestTie => Ok(view.estimated_tie(pair)? >= crit.tau),
        RelevanceMode::TestPersonality => Ok(view.personality_similarity(pair)?.value >= crit.tau),
        RelevanceMode::Either => Ok(view.estimated_tie(pair)? >= crit.tau
            || view.personality_similarity(pair)?.value >= crit.tau),
    }
}

fn count_relevant<'r>(
    recs: impl IntoIterator<Item = &'r Recommendation>,
    view: &DatasetView,
    crit: &RelevanceCriteria,
) -> Result<usize, Error> {
    let mut successes = 0;
    for rec in recs {
        let pair = Pair::new(rec.for_participant.clone(), rec.suggested.clone())?;
        if is_relevant(view, &pair, crit)? {
            successes += 1;
        }
    }
    Ok(successes)
}

/// Count of recommendations whose pair is relevant in the view.
pub fn successful_count(
    recs: &[Recommendation],
    view: &DatasetView,
    crit: &RelevanceCriteria,
) -> Result<usize, Error> {
    if !crit.tau.is_finite() {
        return Err(Error::TauNotFinite { value: crit.tau });
    }
    count_relevant(recs, view, crit)
}

/// Successful share of the recommendation list. Undefined (an error) on an
/// empty list.
pub fn accuracy(
    recs: &[Recommendation],
    test: &DatasetView,
    crit: &RelevanceCriteria,
) -> Result<f64, Error> {
    if recs.is_empty() {
        return Err(Error::AccuracyUndefined);
    }
    let successes = successful_count(recs, test, crit)?;
    Ok(successes as f64 / recs.len() as f64)
}

/// Mean absolute error as the complement of accuracy.
pub fn mae(accuracy: f64) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&accuracy) {
        return Err(Error::AccuracyOutOfRange { value: accuracy });
    }
    Ok(1.0 - accuracy)
}

/// MAE spread over the rating scale width `r_max - r_min`.
pub fn nmae(mae: f64, r_min: f64, r_max: f64) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&mae) {
        return Err(Error::MaeOutOfRange { value: mae });
    }
    if !(r_min.is_finite() && r_max.is_finite() && r_max > r_min) {
        return Err(Error::InvalidRatingBounds { r_min, r_max });
    }
    Ok(mae / (r_max - r_min))
}

/// Metrics of one (method, beta, bucket) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: Method,
    pub beta: f64,
    pub bucket: f64,
    pub accuracy: f64,
    pub mae: f64,
    pub nmae: f64,
    pub recommendation_count: usize,
    pub successful_count: usize,
}

/// Sweep output: one row per populated (method, beta, bucket) cell plus a
/// note for every evaluated bucket that stayed empty. Records the judgment
/// criteria and rating bounds it was computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub criteria: RelevanceCriteria,
    pub rating_min: f64,
    pub rating_max: f64,
    pub rows: Vec<MetricsRow>,
    pub notes: Vec<String>,
}

struct CellOutcome {
    rows: Vec<MetricsRow>,
    notes: Vec<String>,
}

fn run_cell(
    full: &Dataset,
    train: &Dataset,
    test_pairs: &BTreeSet<Pair>,
    personalities: Option<&PairScoreMatrix>,
    method: Method,
    beta: f64,
    crit: &RelevanceCriteria,
) -> Result<CellOutcome, Error> {
    let config = &full.config;
    let recs = match method {
        Method::Sparp => {
            let ties = crate::tie::tie_matrix(train, beta)?;
            let personalities = personalities.expect("personality matrix prepared for sparp");
            let merged = merge_scores(&ties, personalities, config.normalization_mode)?;
            recommend_with_components(
                &merged,
                Some((&ties, personalities)),
                config.gamma,
                config.top_n,
            )?
        }
        Method::C1 => recommend(&c1_score(train)?, config.gamma, config.top_n),
        Method::C2 => recommend(&c2_score(train)?, config.gamma, config.top_n),
    };

    let view = DatasetView::new(full, test_pairs.iter().cloned(), beta)?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for tenths in 8..=10i64 {
        let bucket = tenths as f64 / 10.0;
        let in_bucket: Vec<&Recommendation> = recs
            .iter()
            .filter(|r| bucket_tenths(r.merged_score) == tenths)
            .collect();
        if in_bucket.is_empty() {
            notes.push(format!(
                "{method} beta={beta} bucket={bucket:.1}: no recommendations"
            ));
            continue;
        }
        let successes = count_relevant(in_bucket.iter().copied(), &view, crit)?;
        let acc = successes as f64 / in_bucket.len() as f64;
        let row_mae = mae(acc)?;
        let row_nmae = nmae(
            row_mae,
            f64::from(PersonalityVector::RATING_MIN),
            f64::from(PersonalityVector::RATING_MAX),
        )?;
        rows.push(MetricsRow {
            method,
            beta,
            bucket,
            accuracy: acc,
            mae: row_mae,
            nmae: row_nmae,
            recommendation_count: in_bucket.len(),
            successful_count: successes,
        });
    }
    Ok(CellOutcome { rows, notes })
}

fn run(
    d: &Dataset,
    betas: &[f64],
    methods: &[Method],
    crit: &RelevanceCriteria,
    split: &SplitSpec,
    parallel: bool,
) -> Result<MetricsReport, Error> {
    let violations = validate_dataset(d);
    if !violations.is_empty() {
        return Err(Error::InvalidDataset { violations });
    }
    if betas.is_empty() {
        return Err(Error::NoBetas);
    }
    if methods.is_empty() {
        return Err(Error::NoMethods);
    }
    for &beta in betas {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::BetaOutOfRange { value: beta });
        }
    }
    if !crit.tau.is_finite() {
        return Err(Error::TauNotFinite { value: crit.tau });
    }

    let (train_view, test_view) = split_pairs(d, split)?;
    let train = train_view.restricted_dataset();
    let test_pairs = test_view.pairs().clone();
    let personalities = methods
        .contains(&Method::Sparp)
        .then(|| personality_matrix(d))
        .transpose()?;

    let cells: Vec<(Method, f64)> = methods
        .iter()
        .flat_map(|&m| betas.iter().map(move |&b| (m, b)))
        .collect();
    let outcomes: Vec<CellOutcome> = if parallel {
        cells
            .par_iter()
            .map(|&(method, beta)| {
                run_cell(
                    d,
                    &train,
                    &test_pairs,
                    personalities.as_ref(),
                    method,
                    beta,
                    crit,
                )
            })
            .collect::<Result<_, _>>()?
    } else {
        cells
            .iter()
            .map(|&(method, beta)| {
                run_cell(
                    d,
                    &train,
                    &test_pairs,
                    personalities.as_ref(),
                    method,
                    beta,
                    crit,
                )
            })
            .collect::<Result<_, _>>()?
    };

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for outcome in outcomes {
        rows.extend(outcome.rows);
        notes.extend(outcome.notes);
    }
    rows.sort_by(|x, y| {
        x.method
            .as_str()
            .cmp(y.method.as_str())
            .then(
                x.beta
                    .partial_cmp(&y.beta)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then(
                x.bucket
                    .partial_cmp(&y.bucket)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    notes.sort();

    Ok(MetricsReport {
        criteria: *crit,
        rating_min: f64::from(PersonalityVector::RATING_MIN),
        rating_max: f64::from(PersonalityVector::RATING_MAX),
        rows,
        notes,
    })
}

/// Full sweep over `methods x betas`, scoring each cell's recommendations
/// against the held-out pairs and bucketing by merged score. Cells are
/// computed in parallel; the report is identical to the serial variant.
pub fn run_experiment(
    d: &Dataset,
    betas: &[f64],
    methods: &[Method],
    crit: &RelevanceCriteria,
    split: &SplitSpec,
) -> Result<MetricsReport, Error> {
    run(d, betas, methods, crit, split, true)
}

/// Same sweep with every cell computed on the calling thread.
pub fn run_experiment_serial(
    d: &Dataset,
    betas: &[f64],
    methods: &[Method],
    crit: &RelevanceCriteria,
    split: &SplitSpec,
) -> Result<MetricsReport, Error> {
    run(d, betas, methods, crit, split, false)
}
