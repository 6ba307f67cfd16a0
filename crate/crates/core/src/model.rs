//! Core data model: participants, Big Five profiles, contact records, run
//! configuration, and dataset-level validation.
//!
//! Profiles and contact records store values as parsed. Range and
//! cross-field rules are checked by [`validate_dataset`], which reports every
//! violation as data instead of failing on the first one, so a broken input
//! file can be diagnosed in a single pass.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const DEFAULT_TOTAL_TIME_MINUTES: f64 = 720.0;
pub const DEFAULT_BETA: f64 = 0.1;
pub const DEFAULT_GAMMA: f64 = 0.8;

/// Opaque participant identifier. Ordering is lexicographic on the id string
/// and fixes pair orientation everywhere scores are stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParticipantId(String);

impl ParticipantId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ParticipantId {
    fn from(id: &str) -> Self {
        Self(id.to_owned())
    }
}

impl From<String> for ParticipantId {
    fn from(id: String) -> Self {
        Self(id)
    }
}

/// The five rated traits, in profile column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonalityTrait {
    Openness,
    Extroversion,
    Agreeableness,
    Conscientiousness,
    Neuroticism,
}

impl PersonalityTrait {
    pub const ALL: [PersonalityTrait; 5] = [
        PersonalityTrait::Openness,
        PersonalityTrait::Extroversion,
        PersonalityTrait::Agreeableness,
        PersonalityTrait::Conscientiousness,
        PersonalityTrait::Neuroticism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PersonalityTrait::Openness => "openness",
            PersonalityTrait::Extroversion => "extroversion",
            PersonalityTrait::Agreeableness => "agreeableness",
            PersonalityTrait::Conscientiousness => "conscientiousness",
            PersonalityTrait::Neuroticism => "neuroticism",
        }
    }
}

impl fmt::Display for PersonalityTrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Big Five ratings on the 1..=5 survey scale. Values are stored as given;
/// out-of-range ratings surface as violations from [`validate_dataset`]
/// rather than construction panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonalityVector {
    pub openness: u8,
    pub extroversion: u8,
    pub agreeableness: u8,
    pub conscientiousness: u8,
    pub neuroticism: u8,
}

impl PersonalityVector {
    pub const RATING_MIN: u8 = 1;
    pub const RATING_MAX: u8 = 5;

    pub fn new(
        openness: u8,
        extroversion: u8,
        agreeableness: u8,
        conscientiousness: u8,
        neuroticism: u8,
    ) -> Self {
        Self {
            openness,
            extroversion,
            agreeableness,
            conscientiousness,
            neuroticism,
        }
    }

    pub fn rating(&self, t: PersonalityTrait) -> u8 {
        match t {
            PersonalityTrait::Openness => self.openness,
            PersonalityTrait::Extroversion => self.extroversion,
            PersonalityTrait::Agreeableness => self.agreeableness,
            PersonalityTrait::Conscientiousness => self.conscientiousness,
            PersonalityTrait::Neuroticism => self.neuroticism,
        }
    }

    pub fn as_array(&self) -> [u8; 5] {
        [
            self.openness,
            self.extroversion,
            self.agreeableness,
            self.conscientiousness,
            self.neuroticism,
        ]
    }

    /// First out-of-range trait, if any.
    pub fn invalid_trait(&self) -> Option<(PersonalityTrait, u8)> {
        PersonalityTrait::ALL.into_iter().find_map(|t| {
            let v = self.rating(t);
            (!(Self::RATING_MIN..=Self::RATING_MAX).contains(&v)).then_some((t, v))
        })
    }
}

/// Which side of the event a contact aggregate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Epoch {
    Past,
    Present,
}

impl Epoch {
    pub const ALL: [Epoch; 2] = [Epoch::Past, Epoch::Present];

    pub fn as_str(self) -> &'static str {
        match self {
            Epoch::Past => "past",
            Epoch::Present => "present",
        }
    }
}

impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Epoch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "past" => Ok(Epoch::Past),
            "present" => Ok(Epoch::Present),
            _ => Err(Error::UnknownEpoch {
                token: s.to_owned(),
            }),
        }
    }
}

/// Unordered participant pair, stored with the lexicographically smaller id
/// first so it can serve as a canonical map key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    a: ParticipantId,
    b: ParticipantId,
}

impl Pair {
    pub fn new(x: ParticipantId, y: ParticipantId) -> Result<Self, Error> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(Self { a: x, b: y }),
            std::cmp::Ordering::Greater => Ok(Self { a: y, b: x }),
            std::cmp::Ordering::Equal => Err(Error::SelfPair { id: x }),
        }
    }

    pub fn first(&self) -> &ParticipantId {
        &self.a
    }

    pub fn second(&self) -> &ParticipantId {
        &self.b
    }

    pub fn contains(&self, id: &ParticipantId) -> bool {
        &self.a == id || &self.b == id
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// One face-to-face contact aggregate for a pair within an epoch.
/// `duration_minutes` is the summed contact time and `frequency` the number
/// of distinct contacts. At most one record may exist per (pair, epoch);
/// that and the cross-field rules are checked by [`validate_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContactRecord {
    pub participant_a: ParticipantId,
    pub participant_b: ParticipantId,
    pub epoch: Epoch,
    pub duration_minutes: f64,
    pub frequency: u32,
}

impl ContactRecord {
    /// Canonical pair key; errors when both ids are the same participant.
    pub fn pair(&self) -> Result<Pair, Error> {
        Pair::new(self.participant_a.clone(), self.participant_b.clone())
    }
}

/// How merged scores are scaled before thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Keep the plain tie + personality sum.
    RawSum,
    /// Rescale all pair scores linearly onto [0, 1].
    MinMax,
}

impl NormalizationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationMode::RawSum => "raw_sum",
            NormalizationMode::MinMax => "minmax",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "raw_sum" => Ok(NormalizationMode::RawSum),
            "minmax" => Ok(NormalizationMode::MinMax),
            _ => Err(Error::UnknownNormalizationMode {
                token: s.to_owned(),
            }),
        }
    }
}

/// Run parameters shared by the scoring pipeline and the evaluation harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConferenceConfig {
    /// Length of the whole observation window in minutes.
    pub total_time_minutes: f64,
    /// Weight on the past epoch when blending tie strengths.
    pub beta: f64,
    /// Recommendation threshold on the merged score.
    pub gamma: f64,
    pub normalization_mode: NormalizationMode,
    /// Cap on recommendations per participant; `None` keeps all.
    pub top_n: Option<NonZeroUsize>,
}

impl Default for ConferenceConfig {
    fn default() -> Self {
        Self {
            total_time_minutes: DEFAULT_TOTAL_TIME_MINUTES,
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            normalization_mode: NormalizationMode::MinMax,
            top_n: None,
        }
    }
}

/// A full conference snapshot: the roster, one profile per participant, and
/// per-epoch contact aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub participants: Vec<ParticipantId>,
    pub profiles: BTreeMap<ParticipantId, PersonalityVector>,
    pub contacts: Vec<ContactRecord>,
    pub config: ConferenceConfig,
}

impl Dataset {
    /// Linear-scan lookup; engines that touch every pair build their own maps.
    pub fn contact(&self, pair: &Pair, epoch: Epoch) -> Option<&ContactRecord> {
        self.contacts.iter().find(|c| {
            c.epoch == epoch && pair.contains(&c.participant_a) && pair.contains(&c.participant_b)
        })
    }
}

/// One broken structural rule, naming the offending record.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyParticipantId,
    DuplicateParticipant {
        id: ParticipantId,
    },
    MissingProfile {
        id: ParticipantId,
    },
    OrphanProfile {
        id: ParticipantId,
    },
    RatingOutOfRange {
        id: ParticipantId,
        trait_name: PersonalityTrait,
        value: u8,
    },
    UnknownContactParticipant {
        id: ParticipantId,
        a: ParticipantId,
        b: ParticipantId,
        epoch: Epoch,
    },
    SelfContact {
        id: ParticipantId,
        epoch: Epoch,
    },
    InvalidDuration {
        a: ParticipantId,
        b: ParticipantId,
        epoch: Epoch,
        value: f64,
    },
    ZeroFrequencyWithDuration {
        a: ParticipantId,
        b: ParticipantId,
        epoch: Epoch,
        duration: f64,
    },
    DuplicateContact {
        a: ParticipantId,
        b: ParticipantId,
        epoch: Epoch,
    },
    NonPositiveTotalTime {
        value: f64,
    },
    BetaOutOfRange {
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyParticipantId => write!(f, "participant id is empty"),
            Violation::DuplicateParticipant { id } => {
                write!(f, "duplicate participant id {id}")
            }
            Violation::MissingProfile { id } => {
                write!(f, "participant {id} has no personality profile")
            }
            Violation::OrphanProfile { id } => {
                write!(f, "profile references unknown participant {id}")
            }
            Violation::RatingOutOfRange {
                id,
                trait_name,
                value,
            } => write!(
                f,
                "participant {id}: {trait_name} rating {value} outside [1, 5]"
            ),
            Violation::UnknownContactParticipant { id, a, b, epoch } => write!(
                f,
                "contact ({a}, {b}, {epoch}) references unknown participant {id}"
            ),
            Violation::SelfContact { id, epoch } => write!(
                f,
                "contact ({id}, {id}, {epoch}) pairs a participant with themselves"
            ),
            Violation::InvalidDuration { a, b, epoch, value } => write!(
                f,
                "contact ({a}, {b}, {epoch}): duration {value} must be finite and non-negative"
            ),
            Violation::ZeroFrequencyWithDuration {
                a,
                b,
                epoch,
                duration,
            } => write!(
                f,
                "contact ({a}, {b}, {epoch}): frequency 0 with non-zero duration {duration}"
            ),
            Violation::DuplicateContact { a, b, epoch } => write!(
                f,
                "duplicate contact record for ({a}, {b}) in the {epoch} epoch"
            ),
            Violation::NonPositiveTotalTime { value } => {
                write!(
                    f,
                    "config: total time must be finite and positive, got {value}"
                )
            }
            Violation::BetaOutOfRange { value } => {
                write!(f, "config: beta {value} outside [0, 1]")
            }
        }
    }
}

/// Checks every structural rule over the dataset and returns the complete
/// violation list, sorted by message so the result does not depend on record
/// order. An empty result marks the dataset safe for the scoring pipeline.
pub fn validate_dataset(d: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();

    if !(d.config.total_time_minutes.is_finite() && d.config.total_time_minutes > 0.0) {
        out.push(Violation::NonPositiveTotalTime {
            value: d.config.total_time_minutes,
        });
    }
    if !(0.0..=1.0).contains(&d.config.beta) {
        out.push(Violation::BetaOutOfRange {
            value: d.config.beta,
        });
    }

    let mut roster: BTreeSet<&ParticipantId> = BTreeSet::new();
    for id in &d.participants {
        if id.is_empty() {
            out.push(Violation::EmptyParticipantId);
        }
        if !roster.insert(id) {
            out.push(Violation::DuplicateParticipant { id: id.clone() });
        }
    }

    for id in &d.participants {
        if !d.profiles.contains_key(id) {
            out.push(Violation::MissingProfile { id: id.clone() });
        }
    }
    for (id, profile) in &d.profiles {
        if !roster.contains(id) {
            out.push(Violation::OrphanProfile { id: id.clone() });
        }
        for t in PersonalityTrait::ALL {
            let v = profile.rating(t);
            if !(PersonalityVector::RATING_MIN..=PersonalityVector::RATING_MAX).contains(&v) {
                out.push(Violation::RatingOutOfRange {
                    id: id.clone(),
                    trait_name: t,
                    value: v,
                });
            }
        }
    }

    let mut seen: BTreeSet<(Pair, Epoch)> = BTreeSet::new();
    for c in &d.contacts {
        if c.participant_a == c.participant_b {
            out.push(Violation::SelfContact {
                id: c.participant_a.clone(),
                epoch: c.epoch,
            });
        } else {
            for id in [&c.participant_a, &c.participant_b] {
                if !roster.contains(id) {
                    out.push(Violation::UnknownContactParticipant {
                        id: id.clone(),
                        a: c.participant_a.clone(),
                        b: c.participant_b.clone(),
                        epoch: c.epoch,
                    });
                }
            }
            let pair = Pair::new(c.participant_a.clone(), c.participant_b.clone())
                .expect("distinct ids form a pair");
            if !seen.insert((pair.clone(), c.epoch)) {
                out.push(Violation::DuplicateContact {
                    a: pair.first().clone(),
                    b: pair.second().clone(),
                    epoch: c.epoch,
                });
            }
        }
        if !(c.duration_minutes.is_finite() && c.duration_minutes >= 0.0) {
            out.push(Violation::InvalidDuration {
                a: c.participant_a.clone(),
                b: c.participant_b.clone(),
                epoch: c.epoch,
                value: c.duration_minutes,
            });
        } else if c.frequency == 0 && c.duration_minutes != 0.0 {
            out.push(Violation::ZeroFrequencyWithDuration {
                a: c.participant_a.clone(),
                b: c.participant_b.clone(),
                epoch: c.epoch,
                duration: c.duration_minutes,
            });
        }
    }

    out.sort_by_key(|v| v.to_string());
    out
}

/// All unordered pairs over the roster, lexicographically ordered: the k-th
/// entry is the pair with flat index k in a
/// [`PairScoreMatrix`](crate::matrix::PairScoreMatrix) over the same roster.
pub fn pair_index(d: &Dataset) -> Result<Vec<Pair>, Error> {
    sorted_unique_ids(&d.participants).map(|ids| {
        let mut pairs = Vec::with_capacity(ids.len() * (ids.len() - 1) / 2);
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                pairs.push(Pair {
                    a: ids[i].clone(),
                    b: ids[j].clone(),
                });
            }
        }
        pairs
    })
}

/// Sorted roster copy; errors on duplicates or fewer than 2 participants.
pub(crate) fn sorted_unique_ids(ids: &[ParticipantId]) -> Result<Vec<ParticipantId>, Error> {
    if ids.len() < 2 {
        return Err(Error::InsufficientParticipants { count: ids.len() });
    }
    let mut sorted = ids.to_vec();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateParticipant { id: w[0].clone() });
        }
    }
    Ok(sorted)
}
