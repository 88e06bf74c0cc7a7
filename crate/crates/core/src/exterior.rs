//! Index bookkeeping for exterior algebra in dimension at most 8.
//!
//! Sorted index sets are stored as bitmasks; the k-subsets of `0..n` are
//! enumerated in lexicographic order, which is the coefficient layout of
//! every form type in this crate.

use std::sync::OnceLock;

/// Binomial coefficient for small arguments.
pub const fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1;
    let mut i = 0;
    while i < k {
        r = r * (n - i) / (i + 1);
        i += 1;
    }
    r
}

/// Lexicographic table of the k-subsets of `0..n`, with reverse lookup.
#[derive(Debug)]
pub struct SubsetTable {
    pub n: usize,
    pub k: usize,
    sets: Vec<Vec<usize>>,
    masks: Vec<u32>,
    rank_of_mask: Vec<usize>,
}

impl SubsetTable {
    fn build(n: usize, k: usize) -> Self {
        let mut sets = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut sets);
        let masks: Vec<u32> = sets.iter().map(|s| mask_of(s)).collect();
        let mut rank_of_mask = vec![usize::MAX; 1 << n];
        for (r, m) in masks.iter().enumerate() {
            rank_of_mask[*m as usize] = r;
        }
        Self { n, k, sets, masks, rank_of_mask }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, rank: usize) -> &[usize] {
        &self.sets[rank]
    }

    pub fn mask(&self, rank: usize) -> u32 {
        self.masks[rank]
    }

    /// Rank of a sorted subset given as a bitmask.
    pub fn rank_of(&self, mask: u32) -> usize {
        let r = self.rank_of_mask[mask as usize];
        debug_assert!(r != usize::MAX, "mask has wrong weight");
        r
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }
}

/// Cached subset table for `(n, k)`, `n <= 8`.
pub fn table(n: usize, k: usize) -> &'static SubsetTable {
    static TABLES: OnceLock<Vec<Vec<SubsetTable>>> = OnceLock::new();
    assert!(n <= 8 && k <= n, "subset table out of range");
    let all = TABLES.get_or_init(|| {
        (0..=8)
            .map(|n| (0..=n).map(|k| SubsetTable::build(n, k)).collect())
            .collect()
    });
    &all[n][k]
}

pub fn mask_of(indices: &[usize]) -> u32 {
    indices.iter().fold(0u32, |m, &i| m | (1 << i))
}

/// Sign of the permutation sorting `indices`; `None` when an index repeats.
pub fn sort_sign(indices: &[usize]) -> Option<i32> {
    let mut sign = 1;
    for a in 0..indices.len() {
        for b in (a + 1)..indices.len() {
            if indices[a] == indices[b] {
                return None;
            }
            if indices[a] > indices[b] {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

/// Sign of concatenating sorted disjoint sets `a` then `b` into sorted order.
pub fn merge_sign(a: u32, b: u32) -> i32 {
    debug_assert_eq!(a & b, 0);
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All permutations of `0..n` with their signs (Heap's algorithm order).
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, i32)>) {
        if k <= 1 {
            let s = sort_sign(p).unwrap_or(0);
            out.push((p.clone(), s));
            return;
        }
        for i in 0..k {
            rec(k - 1, p, out);
            if k % 2 == 0 {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    rec(n, &mut p, &mut out);
    out
}
