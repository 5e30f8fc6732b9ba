//! Set partitions of `{1, ..., n}`.
//!
//! Partitions are generated as restricted growth strings (`a[0] = 0`,
//! `a[i] <= 1 + max(a[..i])`) in lexicographic order, which yields each
//! partition once, already in canonical form.

use std::fmt;

use crate::error::{Error, Result};
use crate::report::{IdentityReport, Term};
use crate::scalar::Scalar;

/// Largest `n` accepted by [`enumerate_partitions`].
pub const MAX_ENUMERATION: usize = 12;
/// Largest `n` accepted by [`partition_count`].
pub const MAX_COUNT: usize = 20;
/// Largest `n` accepted by [`check_partition_recursion`].
pub const MAX_RECURSION: usize = 8;

/// A partition of `{1, ..., n}` into nonempty blocks.
///
/// Canonical form: blocks sorted ascending and ordered by smallest element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    // block index of element i + 1
    block_of: Vec<usize>,
}

impl Partition {
    /// Builds a partition from 1-based blocks in any order, canonicalizing it.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &e in block {
                if e == 0 || e > n {
                    return Err(Error::InvalidPartition(format!("element {e} not in 1..={n}")));
                }
                if std::mem::replace(&mut seen[e - 1], true) {
                    return Err(Error::InvalidPartition(format!("element {e} repeated")));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("element {} missing", missing + 1)));
        }
        Ok(Self::canonical(n, blocks))
    }

    fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut block_of = vec![0; n];
        for (l, b) in blocks.iter().enumerate() {
            for &e in b {
                block_of[e - 1] = l;
            }
        }
        Self { n, blocks, block_of }
    }

    /// Decodes a restricted growth string (0-based block labels).
    fn from_rgs(rgs: &[usize]) -> Self {
        let k = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        Self {
            n: rgs.len(),
            blocks,
            block_of: rgs.to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }

    /// Index of the block containing the 1-based element `e`.
    pub fn block_of(&self, e: usize) -> usize {
        self.block_of[e - 1]
    }

    /// The restricted growth string encoding (0-based block labels).
    pub fn rgs(&self) -> &[usize] {
        &self.block_of
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (l, b) in self.blocks.iter().enumerate() {
            if l > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (i, e) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Lexicographic stream of restricted growth strings of length `n`.
pub struct RestrictedGrowthStrings {
    current: Vec<usize>,
    // prefix_max[i] = max(current[..=i])
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl RestrictedGrowthStrings {
    pub fn new(n: usize) -> Self {
        Self {
            current: vec![0; n],
            prefix_max: vec![0; n],
            started: false,
            done: n == 0,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        for i in (1..n).rev() {
            if self.current[i] <= self.prefix_max[i - 1] {
                self.current[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.current[i]);
                for j in i + 1..n {
                    self.current[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for RestrictedGrowthStrings {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(Partition::from_rgs(&self.current))
    }
}

/// All partitions of `{1..n}` (into exactly `k` blocks when given), in
/// lexicographic restricted-growth-string order.
pub fn enumerate_partitions(n: usize, k: Option<usize>) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_ENUMERATION {
        return Err(Error::PartitionBound {
            n,
            max: MAX_ENUMERATION,
        });
    }
    match k {
        None => Ok(RestrictedGrowthStrings::new(n).collect()),
        Some(k) if k == 0 || k > n => Err(Error::BlockCountBound { k, n }),
        Some(k) => Ok(RestrictedGrowthStrings::new(n)
            .filter(|p| p.block_count() == k)
            .collect()),
    }
}

/// Bell number `B_n`, or Stirling number of the second kind `S(n, k)`,
/// from the recurrence `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
pub fn partition_count(n: usize, k: Option<usize>) -> Result<u64> {
    if n == 0 || n > MAX_COUNT {
        return Err(Error::PartitionBound { n, max: MAX_COUNT });
    }
    if let Some(k) = k {
        if k == 0 || k > n {
            return Err(Error::BlockCountBound { k, n });
        }
    }
    let overflow = || Error::CountOverflow { n };
    // row[j] = S(i, j)
    let mut row = vec![0u64; n + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=i).rev() {
            let carried = (j as u64).checked_mul(row[j]).ok_or_else(overflow)?;
            row[j] = carried.checked_add(row[j - 1]).ok_or_else(overflow)?;
        }
        row[0] = 0;
    }
    match k {
        Some(k) => Ok(row[k]),
        None => row[1..]
            .iter()
            .try_fold(0u64, |acc, &s| acc.checked_add(s))
            .ok_or_else(overflow),
    }
}

/// Removes the element `n` from a partition of `{1..n}`, dropping its block
/// if it becomes empty.
pub fn project_partition(p: &Partition) -> Result<Partition> {
    let n = p.n();
    if n < 2 {
        return Err(Error::InvalidPartition(
            "projection needs a partition of at least two elements".into(),
        ));
    }
    let blocks = p
        .blocks()
        .iter()
        .filter_map(|b| {
            let reduced: Vec<usize> = b.iter().copied().filter(|&e| e != n).collect();
            (!reduced.is_empty()).then_some(reduced)
        })
        .collect();
    Ok(Partition::canonical(n - 1, blocks))
}

/// Preimage of `p` under [`project_partition`]: `p` with the singleton
/// `{n+1}` appended, then `p` with `n+1` merged into each block in turn.
pub fn partition_fibers(p: &Partition) -> Vec<Partition> {
    let next = p.n() + 1;
    let mut out = Vec::with_capacity(p.block_count() + 1);
    let mut with_singleton = p.blocks().to_vec();
    with_singleton.push(vec![next]);
    out.push(Partition::canonical(next, with_singleton));
    for l in 0..p.block_count() {
        let mut merged = p.blocks().to_vec();
        merged[l].push(next);
        out.push(Partition::canonical(next, merged));
    }
    out
}

/// Compares `sum_{P in T_{n+1}} f(P)` with the fiber decomposition
/// `sum_{P in T_n} [ f(P + {n+1}) + sum_l f(P with n+1 in block l) ]`.
pub fn check_partition_recursion<S: Scalar>(n: usize, f: impl Fn(&Partition) -> S) -> Result<IdentityReport<S>> {
    if n == 0 || n > MAX_RECURSION {
        return Err(Error::PartitionBound { n, max: MAX_RECURSION });
    }
    let lhs = RestrictedGrowthStrings::new(n + 1).fold(S::zero(), |acc, p| acc + f(&p));
    let mut singleton_terms = S::zero();
    let mut merge_terms = S::zero();
    for p in RestrictedGrowthStrings::new(n) {
        let fibers = partition_fibers(&p);
        singleton_terms += f(&fibers[0]);
        for q in &fibers[1..] {
            merge_terms += f(q);
        }
    }
    let rhs = singleton_terms + merge_terms;
    Ok(
        IdentityReport::exact(format!("partition-recursion(n={n})"), lhs, rhs, S::lit(1e-12)).with_terms(vec![
            Term::new("append-singleton", crate::report::Estimate::exact(singleton_terms)),
            Term::new("merge-into-block", crate::report::Estimate::exact(merge_terms)),
        ]),
    )
}
