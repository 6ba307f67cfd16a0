//! Contact-only baseline scorers.
//!
//! Both baselines look at the present epoch alone and ignore personality.
//! C1 rewards direct contact weight plus triadic closure through shared
//! strong neighbors; C2 is the plain duration ratio. They exist to give the
//! merged scorer something to beat under one shared evaluation harness.

use crate::error::Error;
use crate::matrix::PairScoreMatrix;
use crate::model::{Dataset, Epoch};

/// Weight of the closure bonus in C1.
pub const C1_LAMBDA: f64 = 0.5;
/// Normalized contact weight at or above which a neighbor counts as strong.
pub const STRONG_NEIGHBOR_THRESHOLD: f64 = 0.5;

/// Present-epoch contact weights `duration * frequency`, scaled by the
/// dataset maximum so the strongest pair sits at 1. All zeros when the
/// present epoch has no contacts.
fn present_weights(d: &Dataset) -> Result<PairScoreMatrix, Error> {
    let mut w = PairScoreMatrix::for_dataset(d)?;
    for c in &d.contacts {
        if c.epoch != Epoch::Present {
            continue;
        }
        w.set(
            &c.participant_a,
            &c.participant_b,
            c.duration_minutes * f64::from(c.frequency),
        )?;
    }
    let (_, max) = w.min_max();
    if max > 0.0 {
        for slot in w.values_mut() {
            *slot /= max;
        }
    }
    Ok(w)
}

/// Contact weight plus common-strong-neighbor closure, clamped to [0, 1]:
/// `w(a, b) + lambda * |strong(a) ∩ strong(b)| / (n - 2)` with
/// [`C1_LAMBDA`] as the default weight. Rosters of two have no third
/// parties, so their closure term is 0.
pub fn c1_score(d: &Dataset) -> Result<PairScoreMatrix, Error> {
    c1_score_with_lambda(d, C1_LAMBDA)
}

pub fn c1_score_with_lambda(d: &Dataset, lambda: f64) -> Result<PairScoreMatrix, Error> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidLambda { value: lambda });
    }
    let w = present_weights(d)?;
    let n = w.len();

    let mut strong = vec![vec![false; n]; n];
    for (i, j, value) in w.cells() {
        if value >= STRONG_NEIGHBOR_THRESHOLD {
            strong[i][j] = true;
            strong[j][i] = true;
        }
    }

    let mut scores = w.clone();
    if n > 2 {
        let third_parties = (n - 2) as f64;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let common = (0..n)
                    .filter(|&c| c != i && c != j && strong[i][c] && strong[j][c])
                    .count();
                scores.values_mut()[k] += lambda * common as f64 / third_parties;
                k += 1;
            }
        }
    }
    for slot in scores.values_mut() {
        *slot = slot.clamp(0.0, 1.0);
    }
    Ok(scores)
}

/// Present-epoch duration share: pair duration over the maximum pair
/// duration, frequency ignored. All zeros when the present epoch has no
/// contacts.
pub fn c2_score(d: &Dataset) -> Result<PairScoreMatrix, Error> {
    let mut m = PairScoreMatrix::for_dataset(d)?;
    for c in &d.contacts {
        if c.epoch != Epoch::Present {
            continue;
        }
        m.set(&c.participant_a, &c.participant_b, c.duration_minutes)?;
    }
    let (_, max) = m.min_max();
    if max > 0.0 {
        for slot in m.values_mut() {
            *slot /= max;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConferenceConfig, ContactRecord, ParticipantId, PersonalityVector};

    fn dataset(names: &[&str], contacts: Vec<(&str, &str, Epoch, f64, u32)>) -> Dataset {
        Dataset {
            participants: names.iter().map(|s| ParticipantId::new(*s)).collect(),
            profiles: names
                .iter()
                .map(|s| {
                    (
                        ParticipantId::new(*s),
                        PersonalityVector::new(3, 3, 3, 3, 3),
                    )
                })
                .collect(),
            contacts: contacts
                .into_iter()
                .map(|(a, b, epoch, dur, freq)| ContactRecord {
                    participant_a: ParticipantId::new(a),
                    participant_b: ParticipantId::new(b),
                    epoch,
                    duration_minutes: dur,
                    frequency: freq,
                })
                .collect(),
            config: ConferenceConfig::default(),
        }
    }

    fn get(m: &PairScoreMatrix, a: &str, b: &str) -> f64 {
        m.get(&ParticipantId::new(a), &ParticipantId::new(b))
            .unwrap()
    }

    #[test]
    fn c2_is_duration_share() {
        let d = dataset(
            &["A", "B", "C"],
            vec![
                ("A", "B", Epoch::Present, 80.0, 1),
                ("B", "C", Epoch::Present, 40.0, 5),
            ],
        );
        let m = c2_score(&d).unwrap();
        assert_eq!(get(&m, "A", "B"), 1.0);
        assert_eq!(get(&m, "B", "C"), 0.5);
        assert_eq!(get(&m, "A", "C"), 0.0);
    }

    #[test]
    fn c2_without_contacts_is_all_zero() {
        let d = dataset(&["A", "B", "C"], vec![("A", "B", Epoch::Past, 80.0, 7)]);
        assert!(c2_score(&d).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn c1_single_pair_maxes_out() {
        let d = dataset(&["A", "B"], vec![("A", "B", Epoch::Present, 80.0, 7)]);
        let m = c1_score(&d).unwrap();
        assert_eq!(get(&m, "A", "B"), 1.0);
    }

    #[test]
    fn c1_closure_scores_strangers_with_a_shared_strong_friend() {
        let d = dataset(
            &["A", "B", "C"],
            vec![
                ("A", "C", Epoch::Present, 80.0, 7),
                ("B", "C", Epoch::Present, 80.0, 7),
            ],
        );
        let m = c1_score(&d).unwrap();
        // Both links carry the maximum weight, so C is a strong neighbor of
        // both ends: 0 + 0.5 * 1 / (3 - 2).
        assert_eq!(get(&m, "A", "B"), 0.5);
        assert_eq!(get(&m, "A", "C"), 1.0);
    }

    #[test]
    fn c1_weak_links_earn_no_closure() {
        let d = dataset(
            &["A", "B", "C"],
            vec![
                ("A", "C", Epoch::Present, 80.0, 7),
                ("B", "C", Epoch::Present, 10.0, 1),
            ],
        );
        let m = c1_score(&d).unwrap();
        assert_eq!(get(&m, "A", "B"), 0.0);
    }

    #[test]
    fn c1_clamps_at_one() {
        // Max-weight direct link plus closure bonus through two strong
        // common neighbors would exceed 1 without the clamp.
        let d = dataset(
            &["A", "B", "C", "D"],
            vec![
                ("A", "B", Epoch::Present, 80.0, 7),
                ("A", "C", Epoch::Present, 80.0, 7),
                ("B", "C", Epoch::Present, 80.0, 7),
                ("A", "D", Epoch::Present, 80.0, 7),
                ("B", "D", Epoch::Present, 80.0, 7),
            ],
        );
        let m = c1_score(&d).unwrap();
        assert_eq!(get(&m, "A", "B"), 1.0);
    }

    #[test]
    fn c1_rejects_bad_lambda() {
        let d = dataset(&["A", "B"], vec![]);
        assert!(matches!(
            c1_score_with_lambda(&d, -0.5),
            Err(Error::InvalidLambda { .. })
        ));
        assert!(matches!(
            c1_score_with_lambda(&d, f64::NAN),
            Err(Error::InvalidLambda { .. })
        ));
    }

    #[test]
    fn baselines_ignore_the_past_epoch() {
        let d = dataset(
            &["A", "B", "C"],
            vec![
                ("A", "B", Epoch::Past, 80.0, 7),
                ("B", "C", Epoch::Present, 20.0, 2),
            ],
        );
        assert_eq!(get(&c1_score(&d).unwrap(), "A", "B"), 0.0);
        assert_eq!(get(&c2_score(&d).unwrap(), "A", "B"), 0.0);
        assert_eq!(get(&c2_score(&d).unwrap(), "B", "C"), 1.0);
    }
}
