//! Social-tie estimation from face-to-face contact aggregates.
//!
//! A pair's raw tie within one epoch is `frequency * duration / total_time`,
//! which stays in [0, 1] as long as no pair accumulates more weighted contact
//! than the event window holds. The tie expected for the upcoming epoch
//! blends the two observed epochs: `beta * past + (1 - beta) * present`, so
//! `beta` is the weight on the older signal.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::matrix::PairScoreMatrix;
use crate::model::{pair_index, Dataset, Epoch, Pair};

/// What to do when `frequency * duration` exceeds the event window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverflowPolicy {
    /// Reject the record: an out-of-range tie means the inputs are
    /// inconsistent with the window length.
    #[default]
    Strict,
    /// Clamp to 1 and mark the result.
    Lenient,
}

/// Raw per-epoch tie. `clamped` can only be true under
/// [`OverflowPolicy::Lenient`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawTie {
    pub value: f64,
    pub clamped: bool,
}

/// Weighted contact share of the event window for one pair and epoch.
pub fn raw_tie(
    frequency: u32,
    duration_minutes: f64,
    total_time_minutes: f64,
    policy: OverflowPolicy,
) -> Result<RawTie, Error> {
    if !(total_time_minutes.is_finite() && total_time_minutes > 0.0) {
        return Err(Error::NonPositiveTotalTime {
            value: total_time_minutes,
        });
    }
    if !(duration_minutes.is_finite() && duration_minutes >= 0.0) {
        return Err(Error::InvalidContactDuration {
            value: duration_minutes,
        });
    }
    let value = f64::from(frequency) * duration_minutes / total_time_minutes;
    if value > 1.0 {
        match policy {
            OverflowPolicy::Strict => Err(Error::TieOverflow { value }),
            OverflowPolicy::Lenient => Ok(RawTie {
                value: 1.0,
                clamped: true,
            }),
        }
    } else {
        Ok(RawTie {
            value,
            clamped: false,
        })
    }
}

/// Blend of the past and present ties, with `beta` weighting the past.
/// `beta = 1` returns the past tie exactly and `beta = 0` the present one.
/// The result is clamped into the envelope of its inputs so rounding can
/// never push it outside [min(past, present), max(past, present)].
pub fn estimate_tie(past: f64, present: f64, beta: f64) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::BetaOutOfRange { value: beta });
    }
    for v in [past, present] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidTieValue { value: v });
        }
    }
    let blend = beta * past + (1.0 - beta) * present;
    Ok(blend.clamp(past.min(present), past.max(present)))
}

/// Per-pair tie decomposition, retained for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct TieEstimate {
    pub pair: Pair,
    pub past_tie: f64,
    pub present_tie: f64,
    pub estimated_tie: f64,
    /// True when either epoch hit the lenient cap.
    pub clamped: bool,
}

/// Tie estimates for every pair in the roster. Pairs without a record in an
/// epoch contribute a raw tie of 0 for that epoch. Expects a dataset that
/// passes validation; overflow handling follows `policy`.
pub fn tie_estimates(
    d: &Dataset,
    beta: f64,
    policy: OverflowPolicy,
) -> Result<Vec<TieEstimate>, Error> {
    let pairs = pair_index(d)?;
    let mut by_key: BTreeMap<(Pair, Epoch), (f64, u32)> = BTreeMap::new();
    for c in &d.contacts {
        by_key.insert((c.pair()?, c.epoch), (c.duration_minutes, c.frequency));
    }

    let total = d.config.total_time_minutes;
    let mut out = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let epoch_tie = |epoch: Epoch| -> Result<RawTie, Error> {
            match by_key.get(&(pair.clone(), epoch)) {
                Some(&(duration, frequency)) => raw_tie(frequency, duration, total, policy)
                    .map_err(|e| match e {
                        Error::TieOverflow { value } => Error::PairTieOverflow {
                            a: pair.first().clone(),
                            b: pair.second().clone(),
                            epoch,
                            value,
                        },
                        other => other,
                    }),
                None => Ok(RawTie {
                    value: 0.0,
                    clamped: false,
                }),
            }
        };
        let past = epoch_tie(Epoch::Past)?;
        let present = epoch_tie(Epoch::Present)?;
        out.push(TieEstimate {
            estimated_tie: estimate_tie(past.value, present.value, beta)?,
            pair,
            past_tie: past.value,
            present_tie: present.value,
            clamped: past.clamped || present.clamped,
        });
    }
    Ok(out)
}

/// Estimated-tie matrix under the strict overflow policy.
pub fn tie_matrix(d: &Dataset, beta: f64) -> Result<PairScoreMatrix, Error> {
    tie_matrix_with_policy(d, beta, OverflowPolicy::Strict)
}

pub fn tie_matrix_with_policy(
    d: &Dataset,
    beta: f64,
    policy: OverflowPolicy,
) -> Result<PairScoreMatrix, Error> {
    let estimates = tie_estimates(d, beta, policy)?;
    let mut m = PairScoreMatrix::for_dataset(d)?;
    debug_assert_eq!(estimates.len(), m.pair_count());
    for (slot, estimate) in m.values_mut().iter_mut().zip(&estimates) {
        *slot = estimate.estimated_tie;
    }
    Ok(m)
}
