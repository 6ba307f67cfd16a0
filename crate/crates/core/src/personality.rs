//! Personality similarity between rated Big Five profiles.
//!
//! Similarity is the Pearson correlation across the five trait ratings.
//! A flat profile (all five ratings equal) has no defined correlation with
//! anything; such pairs score a neutral 0.0 and are flagged degenerate so
//! callers can tell "no signal" apart from "uncorrelated".

use crate::error::Error;
use crate::matrix::PairScoreMatrix;
use crate::model::{Dataset, PersonalityVector};

/// Pearson similarity of two profiles; `value` lies in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersonalitySimilarity {
    pub value: f64,
    /// True when either profile had zero variance and `value` was pinned to 0.
    pub degenerate: bool,
}

/// Pearson correlation of two equal-length real series, or `None` when
/// either series has zero variance. Centering works on `n*x - sum(x)` and a
/// single square root of the variance product; with small integer inputs
/// every intermediate is exact, so exactly affinely related series come out
/// as exactly ±1.
///
/// Panics when the series lengths differ.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "series must have equal length");
    let n = xs.len() as f64;
    let sum_x: f64 = xs.iter().sum();
    let sum_y: f64 = ys.iter().sum();
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let ux = n * x - sum_x;
        let uy = n * y - sum_y;
        cov += ux * uy;
        var_x += ux * ux;
        var_y += uy * uy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return None;
    }
    Some((cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}

/// Trait-rating similarity of two profiles. Ratings are validated against
/// the 1..=5 scale before any arithmetic.
pub fn pearson_personality(
    a: &PersonalityVector,
    b: &PersonalityVector,
) -> Result<PersonalitySimilarity, Error> {
    for profile in [a, b] {
        if let Some((trait_name, value)) = profile.invalid_trait() {
            return Err(Error::RatingOutOfRange { trait_name, value });
        }
    }
    let xs = a.as_array().map(f64::from);
    let ys = b.as_array().map(f64::from);
    Ok(match pearson(&xs, &ys) {
        Some(value) => PersonalitySimilarity {
            value,
            degenerate: false,
        },
        None => PersonalitySimilarity {
            value: 0.0,
            degenerate: true,
        },
    })
}

/// Similarity matrix over every pair in the roster. Requires a profile for
/// each participant.
pub fn personality_matrix(d: &Dataset) -> Result<PairScoreMatrix, Error> {
    let mut m = PairScoreMatrix::for_dataset(d)?;
    let profiles: Vec<&PersonalityVector> = m
        .ids()
        .iter()
        .map(|id| {
            d.profiles
                .get(id)
                .ok_or_else(|| Error::MissingProfile { id: id.clone() })
        })
        .collect::<Result<_, _>>()?;
    let n = m.len();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            m.values_mut()[k] = pearson_personality(profiles[i], profiles[j])?.value;
            k += 1;
        }
    }
    Ok(m)
}
