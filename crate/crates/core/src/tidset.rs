//! Vertical (tid-list) representation of item and itemset occurrences.
//!
//! Positions are 0-based transaction indices; the public 1-based [`Tid`]
//! is `position + 1`. Sets switch between a sorted position list and a
//! bitmap depending on density, so dense data (mushroom-like) and sparse
//! data (retail-like) both intersect cheaply.
//!
//! [`Tid`]: crate::Tid

/// A set is stored as a bitmap once it covers at least 1/32 of the
/// positions, the point where a bitmap is no larger than a `u32` list.
const DENSE_RATIO: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TidSet {
    Sparse(Vec<u32>),
    Dense { words: Vec<u64>, len: usize },
}

impl TidSet {
    /// Builds a set over `universe` positions from ascending positions.
    pub fn from_sorted(positions: Vec<u32>, universe: usize) -> Self {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        if positions.len() * DENSE_RATIO >= universe && universe > 0 {
            let mut words = vec![0u64; universe.div_ceil(64)];
            for &p in &positions {
                words[p as usize / 64] |= 1 << (p % 64);
            }
            TidSet::Dense {
                words,
                len: positions.len(),
            }
        } else {
            TidSet::Sparse(positions)
        }
    }

    pub fn empty() -> Self {
        TidSet::Sparse(Vec::new())
    }

    pub fn len(&self) -> usize {
        match self {
            TidSet::Sparse(v) => v.len(),
            TidSet::Dense { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, pos: u32) -> bool {
        match self {
            TidSet::Sparse(v) => v.binary_search(&pos).is_ok(),
            TidSet::Dense { words, .. } => words
                .get(pos as usize / 64)
                .is_some_and(|w| w & (1 << (pos % 64)) != 0),
        }
    }

    pub fn iter(&self) -> TidIter<'_> {
        match self {
            TidSet::Sparse(v) => TidIter::Sparse(v.iter()),
            TidSet::Dense { words, .. } => TidIter::Dense {
                words,
                index: 0,
                current: words.first().copied().unwrap_or(0),
            },
        }
    }

    pub fn to_vec(&self) -> Vec<u32> {
        match self {
            TidSet::Sparse(v) => v.clone(),
            TidSet::Dense { .. } => self.iter().collect(),
        }
    }

    /// Intersection, re-choosing the representation for the result.
    pub fn intersect(&self, other: &TidSet, universe: usize) -> TidSet {
        match (self, other) {
            (TidSet::Dense { words: a, .. }, TidSet::Dense { words: b, .. }) => {
                let words: Vec<u64> = a.iter().zip(b).map(|(x, y)| x & y).collect();
                let len = words.iter().map(|w| w.count_ones() as usize).sum();
                if len * DENSE_RATIO >= universe {
                    TidSet::Dense { words, len }
                } else {
                    let set = TidSet::Dense { words, len };
                    TidSet::Sparse(set.iter().collect())
                }
            }
            (TidSet::Sparse(s), d @ TidSet::Dense { .. })
            | (d @ TidSet::Dense { .. }, TidSet::Sparse(s)) => {
                TidSet::Sparse(s.iter().copied().filter(|&p| d.contains(p)).collect())
            }
            (TidSet::Sparse(a), TidSet::Sparse(b)) => TidSet::Sparse(intersect_sorted(a, b)),
        }
    }

    /// Size of the intersection without materializing it.
    pub fn intersection_len(&self, other: &TidSet) -> usize {
        match (self, other) {
            (TidSet::Dense { words: a, .. }, TidSet::Dense { words: b, .. }) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x & y).count_ones() as usize)
                .sum(),
            (TidSet::Sparse(s), d @ TidSet::Dense { .. })
            | (d @ TidSet::Dense { .. }, TidSet::Sparse(s)) => {
                s.iter().filter(|&&p| d.contains(p)).count()
            }
            (TidSet::Sparse(a), TidSet::Sparse(b)) => {
                let (mut i, mut j, mut n) = (0, 0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            n += 1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
                n
            }
        }
    }
}

/// Intersection of several sets, smallest first. An empty input yields the
/// empty set.
pub fn intersect_all(sets: &mut [&TidSet], universe: usize) -> TidSet {
    sets.sort_by_key(|s| s.len());
    let Some((first, rest)) = sets.split_first() else {
        return TidSet::empty();
    };
    match first {
        TidSet::Sparse(v) => TidSet::Sparse(
            v.iter()
                .copied()
                .filter(|&p| rest.iter().all(|s| s.contains(p)))
                .collect(),
        ),
        TidSet::Dense { .. } => {
            let mut acc = (*first).clone();
            for s in rest {
                acc = acc.intersect(s, universe);
            }
            acc
        }
    }
}

/// Count of positions common to all sets.
pub fn intersection_count(sets: &mut [&TidSet], universe: usize) -> usize {
    match sets.len() {
        0 => 0,
        1 => sets[0].len(),
        2 => sets[0].intersection_len(sets[1]),
        _ => {
            sets.sort_by_key(|s| s.len());
            if let TidSet::Sparse(v) = sets[0] {
                v.iter()
                    .filter(|&&p| sets[1..].iter().all(|s| s.contains(p)))
                    .count()
            } else {
                let (head, tail) = sets.split_at_mut(sets.len() - 1);
                intersect_all(head, universe).intersection_len(tail[0])
            }
        }
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = Vec::with_capacity(small.len());
    // Gallop when the lists are badly skewed.
    if small.len() * 16 < large.len() {
        let mut lo = 0;
        for &x in small {
            match large[lo..].binary_search(&x) {
                Ok(k) => {
                    out.push(x);
                    lo += k + 1;
                }
                Err(k) => lo += k,
            }
            if lo >= large.len() {
                break;
            }
        }
        return out;
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(small[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub enum TidIter<'a> {
    Sparse(std::slice::Iter<'a, u32>),
    Dense {
        words: &'a [u64],
        index: usize,
        current: u64,
    },
}

impl Iterator for TidIter<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        match self {
            TidIter::Sparse(it) => it.next().copied(),
            TidIter::Dense {
                words,
                index,
                current,
            } => loop {
                if *current != 0 {
                    let bit = current.trailing_zeros();
                    *current &= *current - 1;
                    return Some((*index as u32) * 64 + bit);
                }
                *index += 1;
                if *index >= words.len() {
                    return None;
                }
                *current = words[*index];
            },
        }
    }
}
