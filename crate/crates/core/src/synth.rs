//! Seeded synthetic conference data with exact marginals.
//!
//! The generator is constraint-driven rather than distribution-driven: trait
//! rating counts and per-epoch duration histograms are reproduced exactly,
//! and only the assignment of those values to participants and pairs is
//! random. The default parameters describe a 77-person conference whose
//! published marginals include 44 past contacts of 5 minutes and 27 present
//! contacts of 80 minutes; unpublished bins carry the remaining mass evenly
//! across the 5..80 minute grid.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::model::{
    ConferenceConfig, ContactRecord, Dataset, Epoch, Pair, ParticipantId, PersonalityTrait,
    PersonalityVector,
};

/// Value histogram: key (minutes or contact count) to number of pairs.
pub type Histogram = BTreeMap<u32, usize>;

/// Largest contact frequency the generator will emit.
pub const FREQUENCY_CAP: u32 = 7;

pub const DEFAULT_POPULATION: usize = 77;

/// Recipe for one synthetic dataset. Counts are exact targets, not
/// expectations: every row of `trait_counts` must sum to `n_participants`
/// and each duration histogram total becomes that epoch's contact count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisParams {
    pub n_participants: usize,
    /// Rating counts per trait, rows in [`PersonalityTrait::ALL`] order,
    /// columns for ratings 1 through 5.
    pub trait_counts: [[usize; 5]; 5],
    pub past_durations: Histogram,
    pub present_durations: Histogram,
    /// Exact frequency histogram for past contacts; uniform in
    /// `1..=FREQUENCY_CAP` when absent.
    pub past_frequencies: Option<Histogram>,
    pub present_frequencies: Option<Histogram>,
    pub seed: u64,
}

const DEFAULT_TRAIT_COUNTS: [[usize; 5]; 5] = [
    [9, 13, 27, 16, 12],
    [8, 14, 17, 19, 19],
    [12, 18, 14, 18, 15],
    [10, 12, 23, 19, 13],
    [13, 18, 16, 19, 11],
];

const DURATION_GRID_MINUTES: std::ops::RangeInclusive<u32> = 5..=80;

fn duration_grid() -> impl Iterator<Item = u32> {
    DURATION_GRID_MINUTES.step_by(5)
}

fn default_past_durations() -> Histogram {
    let mut h = Histogram::new();
    for minutes in duration_grid() {
        let count = match minutes {
            5 => 44,
            10..=20 => 3,
            _ => 2,
        };
        h.insert(minutes, count);
    }
    h
}

fn default_present_durations() -> Histogram {
    let mut h = Histogram::new();
    for minutes in duration_grid() {
        let count = match minutes {
            80 => 27,
            5..=25 => 4,
            _ => 3,
        };
        h.insert(minutes, count);
    }
    h
}

impl Default for SynthesisParams {
    fn default() -> Self {
        Self {
            n_participants: DEFAULT_POPULATION,
            trait_counts: DEFAULT_TRAIT_COUNTS,
            past_durations: default_past_durations(),
            present_durations: default_present_durations(),
            past_frequencies: None,
            present_frequencies: None,
            seed: 42,
        }
    }
}

/// Splits `total` into `weights.len()` integer shares proportional to the
/// weights, using largest remainders so the shares always sum to `total`.
/// Weights that already sum to `total` come back unchanged.
fn allocate(total: usize, weights: &[usize]) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    if sum == 0 || weights.is_empty() {
        return vec![0; weights.len()];
    }
    let mut shares: Vec<usize> = Vec::with_capacity(weights.len());
    let mut remainders: Vec<(usize, usize)> = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        shares.push(total * w / sum);
        remainders.push((total * w % sum, i));
    }
    let assigned: usize = shares.iter().sum();
    remainders.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    for &(_, i) in remainders.iter().take(total - assigned) {
        shares[i] += 1;
    }
    shares
}

impl SynthesisParams {
    /// Default recipe rescaled to `n` participants. Trait rows and duration
    /// histograms keep their default proportions via largest-remainder
    /// rounding; at the default population this is the default recipe.
    pub fn for_population(n: usize) -> Self {
        let mut params = Self {
            n_participants: n,
            ..Self::default()
        };
        for row in &mut params.trait_counts {
            let scaled = allocate(n, row);
            row.copy_from_slice(&scaled);
        }
        for hist in [&mut params.past_durations, &mut params.present_durations] {
            let keys: Vec<u32> = hist.keys().copied().collect();
            let weights: Vec<usize> = hist.values().copied().collect();
            for (key, share) in keys.into_iter().zip(allocate(n, &weights)) {
                hist.insert(key, share);
            }
        }
        params
    }

    fn pair_count(&self) -> usize {
        self.n_participants * self.n_participants.saturating_sub(1) / 2
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n_participants < 2 {
            return Err(Error::InsufficientParticipants {
                count: self.n_participants,
            });
        }
        for (trait_name, row) in PersonalityTrait::ALL.into_iter().zip(self.trait_counts) {
            let sum: usize = row.iter().sum();
            if sum != self.n_participants {
                return Err(Error::TraitCountMismatch {
                    trait_name,
                    sum,
                    expected: self.n_participants,
                });
            }
        }
        for (epoch, durations, frequencies) in [
            (Epoch::Past, &self.past_durations, &self.past_frequencies),
            (
                Epoch::Present,
                &self.present_durations,
                &self.present_frequencies,
            ),
        ] {
            if let Some(&minutes) = durations.keys().find(|&&m| m == 0) {
                return Err(Error::InvalidHistogram {
                    epoch,
                    message: format!("duration bin of {minutes} minutes; bins must be positive"),
                });
            }
            let total: usize = durations.values().sum();
            let capacity = self.n_participants.min(self.pair_count());
            if total > capacity {
                return Err(Error::HistogramOverCapacity {
                    epoch,
                    total,
                    capacity,
                });
            }
            if let Some(freq) = frequencies {
                if let Some(&bad) = freq.keys().find(|&&f| f == 0 || f > FREQUENCY_CAP) {
                    return Err(Error::InvalidHistogram {
                        epoch,
                        message: format!("frequency bin {bad} outside 1..={FREQUENCY_CAP}"),
                    });
                }
                let freq_total: usize = freq.values().sum();
                if freq_total != total {
                    return Err(Error::InvalidHistogram {
                        epoch,
                        message: format!(
                            "frequency histogram covers {freq_total} contacts, durations cover {total}"
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

fn participant_ids(n: usize) -> Vec<ParticipantId> {
    let width = n.to_string().len().max(2);
    (1..=n)
        .map(|i| ParticipantId::new(format!("P{i:0width$}")))
        .collect()
}

/// Expands a histogram into its value sequence in ascending key order.
fn expand(hist: &Histogram) -> Vec<u32> {
    hist.iter()
        .flat_map(|(&value, &count)| std::iter::repeat_n(value, count))
        .collect()
}

/// Builds a dataset matching the params exactly: per-trait rating counts and
/// per-epoch duration histograms are reproduced, with ratings shuffled over
/// participants and contacts placed on uniformly sampled distinct pairs.
/// Deterministic for a given recipe.
pub fn generate_synthetic(params: &SynthesisParams) -> Result<Dataset, Error> {
    params.validate()?;
    let n = params.n_participants;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let ids = participant_ids(n);

    let mut ratings_by_trait: Vec<Vec<u8>> = Vec::with_capacity(5);
    for row in params.trait_counts {
        let mut ratings: Vec<u8> = row
            .iter()
            .enumerate()
            .flat_map(|(i, &count)| std::iter::repeat_n(i as u8 + 1, count))
            .collect();
        ratings.shuffle(&mut rng);
        ratings_by_trait.push(ratings);
    }
    let profiles: BTreeMap<ParticipantId, PersonalityVector> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let v = PersonalityVector::new(
                ratings_by_trait[0][i],
                ratings_by_trait[1][i],
                ratings_by_trait[2][i],
                ratings_by_trait[3][i],
                ratings_by_trait[4][i],
            );
            (id.clone(), v)
        })
        .collect();

    let mut pairs: Vec<Pair> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(Pair::new(ids[i].clone(), ids[j].clone())?);
        }
    }

    let mut contacts: Vec<ContactRecord> = Vec::new();
    for (epoch, durations, frequencies) in [
        (
            Epoch::Past,
            &params.past_durations,
            &params.past_frequencies,
        ),
        (
            Epoch::Present,
            &params.present_durations,
            &params.present_frequencies,
        ),
    ] {
        let duration_values = expand(durations);
        let chosen = sample(&mut rng, pairs.len(), duration_values.len());
        let freq_values: Option<Vec<u32>> = frequencies.as_ref().map(|hist| {
            let mut values = expand(hist);
            values.shuffle(&mut rng);
            values
        });
        for (slot, (pair_idx, minutes)) in chosen.into_iter().zip(duration_values).enumerate() {
            let frequency = match &freq_values {
                Some(values) => values[slot],
                None => rng.random_range(1..=FREQUENCY_CAP),
            };
            let pair = &pairs[pair_idx];
            contacts.push(ContactRecord {
                participant_a: pair.first().clone(),
                participant_b: pair.second().clone(),
                epoch,
                duration_minutes: f64::from(minutes),
                frequency,
            });
        }
    }
    contacts.sort_by(|x, y| {
        (x.epoch, &x.participant_a, &x.participant_b).cmp(&(
            y.epoch,
            &y.participant_a,
            &y.participant_b,
        ))
    });

    Ok(Dataset {
        participants: ids,
        profiles,
        contacts,
        config: ConferenceConfig::default(),
    })
}
