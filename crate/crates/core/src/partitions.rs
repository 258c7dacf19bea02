//! k-partite splits of the sites {1..n}, the family of block unions, the
//! reduction to the necessary subsets, and the index set tau of g-images.

use crate::error::{Error, Result};
use crate::ghz::{g_of, SiteSubset};
use std::collections::BTreeSet;

/// Largest site count accepted by the partition enumerator.
pub const MAX_PARTITION_SITES: usize = 12;

/// A split of {1..n} into k disjoint nonempty blocks, kept in canonical
/// order (blocks sorted by their minimum element).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        let mut seen = vec![false; n + 1];
        let mut covered = 0usize;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &s in b {
                if s == 0 || s > n {
                    return Err(Error::InvalidPartition(format!(
                        "site {} out of range 1..{}",
                        s, n
                    )));
                }
                if seen[s] {
                    return Err(Error::InvalidPartition(format!("site {} appears twice", s)));
                }
                seen[s] = true;
                covered += 1;
            }
        }
        if covered != n {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {} of {} sites",
                covered, n
            )));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Parse "1|2,3": blocks separated by '|', sites by ','. The blocks must
    /// cover {1..n} exactly.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let mut block = Vec::new();
            for tok in part.split(',') {
                let site: usize = tok.trim().parse().map_err(|_| {
                    Error::InvalidPartition(format!("bad site '{}' in '{}'", tok.trim(), s))
                })?;
                block.push(site);
            }
            blocks.push(block);
        }
        Self::new(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks, the k of the k-partite split.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_subset(&self, i: usize) -> SiteSubset {
        SiteSubset::new(self.blocks[i].clone(), self.n).expect("blocks are valid subsets")
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// The g-images of a split's block unions, excluding 0; always of size
/// 2^(k-1) - 1 because g identifies complementary unions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauSet {
    members: BTreeSet<usize>,
    k: usize,
}

impl TauSet {
    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All set partitions of {1..n} into exactly k blocks, in canonical order;
/// the count is the Stirling number of the second kind S(n, k).
pub fn enumerate_partitions(n: usize, k: usize) -> Result<Vec<Partition>> {
    if !(2..=MAX_PARTITION_SITES).contains(&n) || k < 2 || k > n {
        return Err(Error::InvalidPartition(format!(
            "need 2 <= k <= n <= {}, got n = {}, k = {}",
            MAX_PARTITION_SITES, n, k
        )));
    }
    // Restricted-growth assignment: site 1 goes to block 0; each later site
    // joins an existing block or opens the next one. This yields each
    // partition exactly once, already in canonical order.
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];
    fn rec(site: usize, used: usize, n: usize, k: usize, assign: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if site == n {
            if used == k {
                let mut blocks = vec![Vec::new(); k];
                for (i, &b) in assign.iter().enumerate() {
                    blocks[b].push(i + 1);
                }
                out.push(Partition { n, blocks });
            }
            return;
        }
        // Prune: the remaining sites must be able to open enough blocks.
        if used + (n - site) < k {
            return;
        }
        let max_block = if used < k { used } else { used - 1 };
        for b in 0..=max_block {
            assign[site] = b;
            rec(site + 1, used.max(b + 1), n, k, assign, out);
        }
    }
    assign[0] = 0;
    rec(1, 1, n, k, &mut assign, &mut out);
    Ok(out)
}

/// All 2^k unions of the partition's blocks, including the empty set and
/// the full set, ordered by block mask.
pub fn union_family(p: &Partition) -> Vec<SiteSubset> {
    let k = p.k();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0..(1usize << k) {
        let mut union = SiteSubset::new(vec![], p.n()).expect("empty subset is valid");
        for (i, _) in p.blocks().iter().enumerate() {
            if mask & (1 << i) != 0 {
                union = union.union(&p.block_subset(i)).expect("same n");
            }
        }
        out.push(union);
    }
    out
}

/// One representative per complement-pair of the union family, excluding
/// the empty/full pair: the member of each pair that does not contain site
/// n. Exactly 2^(k-1) - 1 subsets.
pub fn necessary_subsets(p: &Partition) -> Vec<SiteSubset> {
    union_family(p)
        .into_iter()
        .filter(|u| !u.is_empty() && !u.contains(p.n()))
        .collect()
}

/// tau = { g(alpha) : alpha in the union family } minus {0}. Fails if the
/// size is not 2^(k-1) - 1, which would indicate an internal inconsistency.
pub fn tau_of(p: &Partition) -> Result<TauSet> {
    let members: BTreeSet<usize> = union_family(p)
        .iter()
        .map(g_of)
        .filter(|&g| g != 0)
        .collect();
    let expected = (1usize << (p.k() - 1)) - 1;
    if members.len() != expected {
        return Err(Error::InvalidPartition(format!(
            "tau has {} members, expected {}",
            members.len(),
            expected
        )));
    }
    Ok(TauSet { members, k: p.k() })
}
