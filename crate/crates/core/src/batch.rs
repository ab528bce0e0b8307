//! Batches of message updates `(i, m_i, m_i')`.

use std::ops::Range;

use crate::error::{Result, VcError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Update<M> {
    pub index: usize,
    pub old: M,
    pub new: M,
}

impl<M> Update<M> {
    pub fn new(index: usize, old: M, new: M) -> Self {
        Self { index, old, new }
    }
}

/// Updates sorted by index, each index at most once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateBatch<M> {
    updates: Vec<Update<M>>,
}

impl<M> Default for UpdateBatch<M> {
    fn default() -> Self {
        Self { updates: Vec::new() }
    }
}

impl<M> UpdateBatch<M> {
    pub fn new(mut updates: Vec<Update<M>>) -> Result<Self> {
        updates.sort_by_key(|u| u.index);
        if let Some(w) = updates.windows(2).find(|w| w[0].index == w[1].index) {
            return Err(VcError::DuplicateIndex(w[0].index));
        }
        Ok(Self { updates })
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Update<M>> {
        self.updates.iter()
    }

    pub fn as_slice(&self) -> &[Update<M>] {
        &self.updates
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.updates.iter().map(|u| u.index)
    }

    /// Updates with index inside `range`.
    pub fn within(&self, range: Range<u64>) -> &[Update<M>] {
        let lo = self.updates.partition_point(|u| (u.index as u64) < range.start);
        let hi = self.updates.partition_point(|u| (u.index as u64) < range.end);
        &self.updates[lo..hi]
    }

    pub fn count_within(&self, range: Range<u64>) -> usize {
        self.within(range).len()
    }

    pub fn get(&self, index: usize) -> Option<&Update<M>> {
        self.updates.binary_search_by_key(&index, |u| u.index).ok().map(|i| &self.updates[i])
    }

    pub fn check_bounds(&self, len: usize) -> Result<()> {
        match self.updates.last() {
            Some(u) if u.index >= len => Err(VcError::IndexOutOfRange { index: u.index, len }),
            _ => Ok(()),
        }
    }
}

impl<M: PartialEq> UpdateBatch<M> {
    /// Errors unless every `old` equals the stored message.
    pub fn check_against(&self, messages: &[M]) -> Result<()> {
        self.check_bounds(messages.len())?;
        match self.updates.iter().find(|u| messages[u.index] != u.old) {
            Some(u) => Err(VcError::StaleMessage(u.index)),
            None => Ok(()),
        }
    }
}

impl<'a, M> IntoIterator for &'a UpdateBatch<M> {
    type Item = &'a Update<M>;
    type IntoIter = std::slice::Iter<'a, Update<M>>;
    fn into_iter(self) -> Self::IntoIter {
        self.updates.iter()
    }
}
