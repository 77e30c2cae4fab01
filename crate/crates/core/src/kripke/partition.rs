use std::collections::HashMap;

/// An equivalence relation on states `0..n`, stored as block labels.
///
/// Labels are canonical: block numbers are assigned in order of the first
/// state that falls in each block, so equal relations have equal labels.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Partition {
    labels: Vec<u32>,
    blocks: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("state {0} is out of range")]
    OutOfRange(usize),
    #[error("state {0} occurs in more than one block")]
    Overlap(usize),
    #[error("states {0:?} are not covered")]
    Uncovered(Vec<usize>),
    #[error("empty block")]
    EmptyBlock,
}

impl Partition {
    /// Every state in its own block (the identity relation).
    pub fn discrete(n: usize) -> Self {
        Partition {
            labels: (0..n as u32).collect(),
            blocks: n as u32,
        }
    }

    /// A single block holding every state.
    pub fn total(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            blocks: (n > 0) as u32,
        }
    }

    /// Builds from arbitrary labels, renumbering them canonically.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut seen: HashMap<T, u32> = HashMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = seen.len() as u32;
            out.push(*seen.entry(l).or_insert(next));
        }
        Partition {
            labels: out,
            blocks: seen.len() as u32,
        }
    }

    /// Strict construction from explicit blocks: they must be non-empty,
    /// pairwise disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut labels = vec![u32::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &s in block {
                let slot = labels.get_mut(s).ok_or(PartitionError::OutOfRange(s))?;
                if *slot != u32::MAX {
                    return Err(PartitionError::Overlap(s));
                }
                *slot = b as u32;
            }
        }
        let missing: Vec<usize> = (0..n).filter(|&s| labels[s] == u32::MAX).collect();
        if !missing.is_empty() {
            return Err(PartitionError::Uncovered(missing));
        }
        Ok(Partition::from_labels(&labels))
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.blocks as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, s: usize) -> u32 {
        self.labels[s]
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// Blocks in canonical order, each listing its states ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks as usize];
        for (s, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(s);
        }
        out
    }

    /// States sharing a block with `s`, including `s`.
    pub fn block_of(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        let l = self.labels[s];
        self.labels
            .iter()
            .enumerate()
            .filter(move |&(_, &m)| m == l)
            .map(|(t, _)| t)
    }

    /// Common refinement: the intersection of the two relations.
    pub fn meet(&self, other: &Partition) -> Partition {
        debug_assert_eq!(self.len(), other.len());
        let width = other.blocks as usize;
        let cells = self.blocks as usize * width;
        if cells <= 1 << 12 {
            let mut table = vec![u32::MAX; cells];
            let mut labels = Vec::with_capacity(self.len());
            let mut next = 0;
            for (&a, &b) in self.labels.iter().zip(&other.labels) {
                let slot = &mut table[a as usize * width + b as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                labels.push(*slot);
            }
            Partition { labels, blocks: next }
        } else {
            let pairs: Vec<(u32, u32)> = self
                .labels
                .iter()
                .copied()
                .zip(other.labels.iter().copied())
                .collect();
            Partition::from_labels(&pairs)
        }
    }

    /// Transitive closure of the union of the two relations.
    pub fn join(&self, other: &Partition) -> Partition {
        Partition::join_all(self.len(), [self, other])
    }

    /// Transitive closure of the union of several relations over `n`
    /// states; the discrete partition when there are none.
    pub fn join_all<'a>(n: usize, parts: impl IntoIterator<Item = &'a Partition>) -> Partition {
        let mut sets = DisjointSets::new(n);
        for p in parts {
            debug_assert_eq!(p.len(), n);
            let mut first = vec![usize::MAX; p.block_count()];
            for (s, &l) in p.labels.iter().enumerate() {
                let f = &mut first[l as usize];
                if *f == usize::MAX {
                    *f = s;
                } else {
                    sets.union(*f, s);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|s| sets.find(s)).collect();
        Partition::from_labels(&roots)
    }

    /// Whether every block of `self` lies inside a block of `other`, i.e.
    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Partition) -> bool {
        debug_assert_eq!(self.len(), other.len());
        let mut image = vec![u32::MAX; self.blocks as usize];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            let slot = &mut image[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            } else if *slot != b {
                return false;
            }
        }
        true
    }

    /// The relation restricted to `keep` (ascending state indices), with
    /// states renumbered `0..keep.len()`.
    pub fn restrict(&self, keep: &[usize]) -> Partition {
        let labels: Vec<u32> = keep.iter().map(|&s| self.labels[s]).collect();
        Partition::from_labels(&labels)
    }

    /// Appends a new state placed in the same block as `original`.
    pub fn with_copy_of(&self, original: usize) -> Partition {
        let mut labels = self.labels.clone();
        labels.push(self.labels[original]);
        Partition {
            labels,
            blocks: self.blocks,
        }
    }

    /// The box modality: states whose whole block lies inside `set`.
    pub fn necessity(&self, set: &[bool]) -> Vec<bool> {
        let mut ok = vec![true; self.blocks as usize];
        for (s, &l) in self.labels.iter().enumerate() {
            if !set[s] {
                ok[l as usize] = false;
            }
        }
        self.labels.iter().map(|&l| ok[l as usize]).collect()
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if the two were already in the same set.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
