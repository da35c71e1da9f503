use crate::error::{Error, Result};
use crate::sectors::Sector;
use std::collections::HashMap;

/// Default limit on the number of enumerated states.
pub const DEFAULT_BASIS_LIMIT: usize = 1_000_000;

/// Lexicographically ordered configurations `k` with `Sort(k)` equal to the
/// sector's reference word.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    sector: Sector,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl SectorBasis {
    pub fn new(sector: &Sector) -> Result<Self> {
        Self::with_limit(sector, DEFAULT_BASIS_LIMIT)
    }

    pub fn with_limit(sector: &Sector, limit: usize) -> Result<Self> {
        let dim = sector.dimension();
        match sector.dimension_usize() {
            Some(d) if d <= limit => {}
            _ => return Err(Error::Capacity { dim: dim.to_string(), limit }),
        }
        let mut word = sector.reference_word();
        let mut states = Vec::new();
        loop {
            states.push(word.clone());
            if !next_permutation(&mut word) {
                break;
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { sector: sector.clone(), states, index })
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn index_of(&self, k: &[u8]) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// States rendered as digit strings, e.g. `2143`.
    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| state_label(s)).collect()
    }
}

pub(crate) fn state_label(k: &[u8]) -> String {
    if k.iter().all(|&x| x < 10) {
        k.iter().map(|x| char::from(b'0' + x)).collect()
    } else {
        k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
    }
}

fn next_permutation(w: &mut [u8]) -> bool {
    if w.len() < 2 {
        return false;
    }
    let mut i = w.len() - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = w.len() - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}
