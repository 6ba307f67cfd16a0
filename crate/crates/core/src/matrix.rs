//! Symmetric pair-score storage shared by every scoring stage.

use crate::error::Error;
use crate::model::{sorted_unique_ids, Dataset, ParticipantId};

/// Pair-indexed score matrix over a fixed roster. Rows and columns are
/// addressed by the lexicographic rank of the participant id; only the upper
/// triangle is stored, so symmetry is structural and the diagonal does not
/// exist. Flat cell order matches [`pair_index`](crate::model::pair_index)
/// over the same roster.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScoreMatrix {
    ids: Vec<ParticipantId>,
    values: Vec<f64>,
}

impl PairScoreMatrix {
    /// Zero-filled matrix over the given roster. The roster is sorted here;
    /// duplicates or fewer than 2 ids are errors.
    pub fn zeros(ids: &[ParticipantId]) -> Result<Self, Error> {
        let ids = sorted_unique_ids(ids)?;
        let n = ids.len();
        Ok(Self {
            values: vec![0.0; n * (n - 1) / 2],
            ids,
        })
    }

    pub fn for_dataset(d: &Dataset) -> Result<Self, Error> {
        Self::zeros(&d.participants)
    }

    /// Number of participants (matrix dimension).
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn pair_count(&self) -> usize {
        self.values.len()
    }

    /// Roster in rank order.
    pub fn ids(&self) -> &[ParticipantId] {
        &self.ids
    }

    pub fn index_of(&self, id: &ParticipantId) -> Result<usize, Error> {
        self.ids
            .binary_search(id)
            .map_err(|_| Error::UnknownParticipant { id: id.clone() })
    }

    fn flat(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.ids.len());
        i * (2 * self.ids.len() - i - 1) / 2 + (j - i - 1)
    }

    /// Score by rank. Panics when `i == j` or out of range; id-based `get`
    /// is the checked entry point.
    pub fn at_rank(&self, i: usize, j: usize) -> f64 {
        assert_ne!(i, j, "diagonal is not defined");
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.values[self.flat(lo, hi)]
    }

    pub fn set_rank(&mut self, i: usize, j: usize, value: f64) {
        assert_ne!(i, j, "diagonal is not defined");
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let k = self.flat(lo, hi);
        self.values[k] = value;
    }

    pub fn get(&self, a: &ParticipantId, b: &ParticipantId) -> Result<f64, Error> {
        if a == b {
            return Err(Error::SelfPair { id: a.clone() });
        }
        Ok(self.at_rank(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn set(&mut self, a: &ParticipantId, b: &ParticipantId, value: f64) -> Result<(), Error> {
        if a == b {
            return Err(Error::SelfPair { id: a.clone() });
        }
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.set_rank(i, j, value);
        Ok(())
    }

    /// All cells as `(rank_a, rank_b, value)` with `rank_a < rank_b`, in flat
    /// (pair-lexicographic) order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.ids.len();
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.values.iter())
            .map(|((i, j), &v)| (i, j, v))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn same_roster(&self, other: &Self) -> bool {
        self.ids == other.ids
    }

    /// Smallest and largest stored score.
    pub fn min_max(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.values {
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    }
}
