//! Non-crossing partitions of `{1, ..., n}`: enumeration, the refinement
//! order, the coarse order `≪`, Möbius functions and nesting structure.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{argument, bounds, domain, Error, Result};

/// Default ceiling for exhaustive enumeration.
pub const N_ENUM_MAX: usize = 10;

/// Partition of `{1..n}` into non-crossing blocks. Blocks are sorted
/// ascending and listed by minimum element, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// All non-crossing partitions.
    NC,
    /// Interval partitions.
    INT,
    /// Non-crossing pair partitions.
    NC2,
    /// Partitions with a single outer block, i.e. `π ≪ 1_n`.
    LL_TOP,
}

impl NCPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return argument("partition of an empty set");
        }
        let mut blocks = blocks;
        let mut seen = vec![false; n + 1];
        for b in blocks.iter_mut() {
            if b.is_empty() {
                return argument("empty block");
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x == 0 || x > n {
                    return argument(format!("element {x} outside 1..{n}"));
                }
                if seen[x] {
                    return argument(format!("element {x} appears twice"));
                }
                seen[x] = true;
            }
        }
        if let Some(x) = (1..=n).find(|&x| !seen[x]) {
            return argument(format!("element {x} not covered"));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if blocks_cross(&blocks[i], &blocks[j]) {
                    return argument(format!("blocks {:?} and {:?} cross", blocks[i], blocks[j]));
                }
            }
        }
        Ok(NCPartition { n, blocks })
    }

    fn from_canonical(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        NCPartition { n, blocks }
    }

    /// `0_n`, all singletons.
    pub fn zero(n: usize) -> Self {
        Self::from_canonical(n, (1..=n).map(|i| vec![i]).collect())
    }

    /// `1_n`, one block.
    pub fn one(n: usize) -> Self {
        Self::from_canonical(n, vec![(1..=n).collect()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `labels()[x]` is the index of the block holding `x` (index 0 unused).
    pub fn labels(&self) -> Vec<usize> {
        let mut lab = vec![usize::MAX; self.n + 1];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                lab[x] = i;
            }
        }
        lab
    }

    pub fn is_interval(&self) -> bool {
        self.blocks.iter().all(|b| b[b.len() - 1] - b[0] + 1 == b.len())
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }
}

fn blocks_cross(a: &[usize], b: &[usize]) -> bool {
    // a and b cross iff some gap (a[i], a[i+1]) holds part of b but not all of it
    for w in a.windows(2) {
        let inside = b.iter().filter(|&&x| w[0] < x && x < w[1]).count();
        if inside > 0 && inside < b.len() {
            return true;
        }
    }
    false
}

impl fmt::Display for NCPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", text.join("/"))
    }
}

impl FromStr for NCPartition {
    type Err = Error;

    /// Parses `"1,4,5/2,3"`. The ground set is `1..=max`.
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in s.trim().split('/') {
            let mut block = Vec::new();
            for tok in part.split(',') {
                let x: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad element {tok:?} in {s:?}")))?;
                block.push(x);
            }
            blocks.push(block);
        }
        let n = blocks.iter().flatten().copied().max().unwrap_or(0);
        NCPartition::new(n, blocks).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Enumerate a family of partitions of `{1..n}` in lexicographic order of the
/// canonical block encoding.
pub fn enumerate(n: usize, family: Family) -> Result<Vec<NCPartition>> {
    enumerate_bounded(n, family, N_ENUM_MAX)
}

pub fn enumerate_bounded(n: usize, family: Family, max_n: usize) -> Result<Vec<NCPartition>> {
    if n == 0 || n > max_n {
        return bounds(format!("enumeration size {n} outside 1..={max_n}"));
    }
    let mut out: Vec<NCPartition> = match family {
        Family::INT => compositions(n)
            .into_iter()
            .map(|parts| {
                let mut blocks = Vec::with_capacity(parts.len());
                let mut start = 1;
                for p in parts {
                    blocks.push((start..start + p).collect());
                    start += p;
                }
                NCPartition::from_canonical(n, blocks)
            })
            .collect(),
        _ => {
            let mut memo: Vec<Option<Vec<Vec<Vec<usize>>>>> = vec![None; n + 1];
            let all = nc_blocks(n, &mut memo);
            all.into_iter()
                .map(|mut blocks| {
                    blocks.sort_unstable_by_key(|b| b[0]);
                    NCPartition::from_canonical(n, blocks)
                })
                .filter(|p| match family {
                    Family::NC2 => p.is_pairing(),
                    Family::LL_TOP => p.blocks[0][p.blocks[0].len() - 1] == n,
                    _ => true,
                })
                .collect()
        }
    };
    out.sort_unstable();
    Ok(out)
}

/// Compositions of `n` as ordered part lists.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << (n - 1));
    for mask in 0u32..(1u32 << (n - 1)) {
        let mut parts = Vec::new();
        let mut len = 1;
        for i in 0..n - 1 {
            if mask & (1 << i) != 0 {
                parts.push(len);
                len = 1;
            } else {
                len += 1;
            }
        }
        parts.push(len);
        out.push(parts);
    }
    out
}

/// Block lists of all NC partitions of `{1..m}` (unsorted block order).
/// The block through 1 is chosen first; each gap it leaves is filled
/// independently, which is the Catalan recurrence.
fn nc_blocks(m: usize, memo: &mut Vec<Option<Vec<Vec<Vec<usize>>>>>) -> Vec<Vec<Vec<usize>>> {
    if m == 0 {
        return vec![vec![]];
    }
    if let Some(v) = &memo[m] {
        return v.clone();
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << (m - 1)) {
        let mut first = vec![1usize];
        first.extend((0..m - 1).filter(|i| mask & (1 << i) != 0).map(|i| i + 2));
        // gaps between consecutive members of the first block, then the tail
        let mut gaps: Vec<(usize, usize)> = first.windows(2).map(|w| (w[0] + 1, w[1] - w[0] - 1)).collect();
        let last = first[first.len() - 1];
        gaps.push((last + 1, m - last));
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![first.clone()]];
        for &(start, len) in &gaps {
            if len == 0 {
                continue;
            }
            let fills = nc_blocks(len, memo);
            let mut next = Vec::with_capacity(partial.len() * fills.len());
            for p in &partial {
                for fill in &fills {
                    let mut q = p.clone();
                    q.extend(fill.iter().map(|b| b.iter().map(|x| x + start - 1).collect::<Vec<_>>()));
                    next.push(q);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    memo[m] = Some(out.clone());
    out
}

fn same_n(pi: &NCPartition, rho: &NCPartition) -> Result<()> {
    if pi.n != rho.n {
        argument(format!("partitions of different sizes {} and {}", pi.n, rho.n))
    } else {
        Ok(())
    }
}

fn leq_labels(pi: &NCPartition, rho_labels: &[usize]) -> bool {
    pi.blocks.iter().all(|b| b.iter().all(|&x| rho_labels[x] == rho_labels[b[0]]))
}

/// Reverse refinement: every block of `rho` is a union of blocks of `pi`.
pub fn leq(pi: &NCPartition, rho: &NCPartition) -> Result<bool> {
    same_n(pi, rho)?;
    Ok(leq_labels(pi, &rho.labels()))
}

/// `pi ≪ rho`: `pi ≤ rho` and each block of `rho` has its min and max in a
/// common block of `pi`.
pub fn ll(pi: &NCPartition, rho: &NCPartition) -> Result<bool> {
    if !leq(pi, rho)? {
        return Ok(false);
    }
    let lab = pi.labels();
    Ok(rho.blocks.iter().all(|w| lab[w[0]] == lab[w[w.len() - 1]]))
}

/// The interval partition whose blocks are the hulls of the outer blocks.
pub fn interval_hull(pi: &NCPartition) -> NCPartition {
    let lab = pi.labels();
    let mut blocks = Vec::new();
    let mut start = 1;
    while start <= pi.n {
        let b = &pi.blocks[lab[start]];
        let end = b[b.len() - 1];
        blocks.push((start..=end).collect());
        start = end + 1;
    }
    NCPartition::from_canonical(pi.n, blocks)
}

/// Index of the block holding both 1 and n.
pub fn outer_block_index(pi: &NCPartition) -> Result<usize> {
    let first = &pi.blocks[0];
    if first[first.len() - 1] == pi.n {
        Ok(0)
    } else {
        domain("no unique outer block")
    }
}

/// The block holding both 1 and n.
pub fn outer_block(pi: &NCPartition) -> Result<Vec<usize>> {
    outer_block_index(pi).map(|i| pi.blocks[i].clone())
}

/// Möbius function of the lattice `(NC(n), ≤)` on the interval `[pi, rho]`.
pub fn mobius_nc(pi: &NCPartition, rho: &NCPartition) -> Result<i64> {
    if !leq(pi, rho)? {
        return domain(format!("{pi} is not below {rho}"));
    }
    if pi == rho {
        return Ok(1);
    }
    let pi_labels = pi.labels();
    let rho_labels = rho.labels();
    // the interval [pi, rho], finest first so every strict predecessor is
    // handled before its successors
    let mut interval: Vec<(NCPartition, Vec<usize>)> = enumerate(pi.n, Family::NC)?
        .into_iter()
        .filter(|s| leq_labels(pi, &s.labels()) && leq_labels(s, &rho_labels))
        .map(|s| {
            let l = s.labels();
            (s, l)
        })
        .collect();
    interval.sort_by(|a, b| b.0.num_blocks().cmp(&a.0.num_blocks()).then_with(|| a.0.cmp(&b.0)));
    debug_assert!(leq_labels(pi, &pi_labels));
    let mut moeb: Vec<i64> = Vec::with_capacity(interval.len());
    for (k, (sigma, _)) in interval.iter().enumerate() {
        if sigma == pi {
            moeb.push(1);
            continue;
        }
        let mut acc = 0i64;
        for j in 0..k {
            let tau = &interval[j].0;
            if tau.num_blocks() > sigma.num_blocks() && leq_labels(tau, &interval[k].1) {
                acc += moeb[j];
            }
        }
        moeb.push(-acc);
    }
    let pos = interval.iter().position(|(s, _)| s == rho).expect("rho in its own interval");
    Ok(moeb[pos])
}

/// Blocks `V` of `pi` sharing both endpoints with some block of `rho`.
pub fn special_blocks(pi: &NCPartition, rho: &NCPartition) -> Result<BTreeSet<usize>> {
    if !ll(pi, rho)? {
        return domain(format!("{pi} is not ≪ {rho}"));
    }
    let ends: BTreeSet<(usize, usize)> = rho.blocks.iter().map(|w| (w[0], w[w.len() - 1])).collect();
    Ok(pi
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, v)| ends.contains(&(v[0], v[v.len() - 1])))
        .map(|(i, _)| i)
        .collect())
}

/// The map `rho ↦ special_blocks(pi, rho)` on `{rho : pi ≪ rho ≪ 1_n}`.
pub fn ll_interval_bijection(pi: &NCPartition) -> Result<Vec<(NCPartition, BTreeSet<usize>)>> {
    outer_block_index(pi)?;
    let mut out = Vec::new();
    for rho in enumerate(pi.n, Family::LL_TOP)? {
        if ll(pi, &rho)? {
            let s = special_blocks(pi, &rho)?;
            out.push((rho, s));
        }
    }
    Ok(out)
}

/// Direct nesting structure of a partition. `children[w]` lists `(gap, v)`
/// where block `v` sits between elements `gap` and `gap + 1` (0-based
/// positions) of block `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingForest {
    pub roots: Vec<usize>,
    pub children: Vec<Vec<(usize, usize)>>,
}

pub fn nesting_forest(pi: &NCPartition) -> NestingForest {
    let k = pi.blocks.len();
    let mut roots = Vec::new();
    let mut children = vec![Vec::new(); k];
    for v in 0..k {
        let (lo, hi) = (pi.blocks[v][0], pi.blocks[v][pi.blocks[v].len() - 1]);
        // innermost enclosing block has the largest minimum
        let parent = (0..k)
            .filter(|&w| {
                let b = &pi.blocks[w];
                b[0] < lo && hi < b[b.len() - 1]
            })
            .max_by_key(|&w| pi.blocks[w][0]);
        match parent {
            None => roots.push(v),
            Some(w) => {
                let gap = pi.blocks[w].iter().rposition(|&x| x < lo).expect("parent starts before child");
                children[w].push((gap, v));
            }
        }
    }
    // blocks are sorted by minimum, so roots and children already come in order
    NestingForest { roots, children }
}

impl NestingForest {
    /// Elements in left-to-right order of a depth-first walk.
    pub fn flatten(&self, pi: &NCPartition) -> Vec<usize> {
        fn walk(f: &NestingForest, pi: &NCPartition, w: usize, out: &mut Vec<usize>) {
            let block = &pi.blocks[w];
            for (pos, &x) in block.iter().enumerate() {
                out.push(x);
                for &(gap, c) in &f.children[w] {
                    if gap == pos {
                        walk(f, pi, c, out);
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(pi.n);
        for &r in &self.roots {
            walk(self, pi, r, &mut out);
        }
        out
    }
}

/// Block colouring with colours `1..=palette`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<u8>,
    palette: u8,
}

impl Coloring {
    pub fn new(pi: &NCPartition, colors: Vec<u8>, palette: u8) -> Result<Self> {
        if colors.len() != pi.num_blocks() {
            return argument(format!("{} colours for {} blocks", colors.len(), pi.num_blocks()));
        }
        if !(1..=3).contains(&palette) {
            return argument(format!("palette size {palette} not in 1..=3"));
        }
        if let Some(c) = colors.iter().find(|&&c| c == 0 || c > palette) {
            return argument(format!("colour {c} outside 1..={palette}"));
        }
        Ok(Coloring { colors, palette })
    }

    pub fn trivial(pi: &NCPartition) -> Self {
        Coloring { colors: vec![1; pi.num_blocks()], palette: 1 }
    }

    /// Outer block coloured 1, every other block 2.
    pub fn outer(pi: &NCPartition) -> Result<Self> {
        let o = outer_block_index(pi)?;
        let colors = (0..pi.num_blocks()).map(|i| if i == o { 1 } else { 2 }).collect();
        Ok(Coloring { colors, palette: 2 })
    }

    pub fn color(&self, block: usize) -> u8 {
        self.colors[block]
    }

    pub fn palette(&self) -> u8 {
        self.palette
    }
}

/// The n-th Catalan number.
pub fn catalan(n: usize) -> u64 {
    let mut c = 1u64;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> NCPartition {
        s.parse().unwrap()
    }

    #[test]
    fn counts() {
        for n in 1..=8 {
            assert_eq!(enumerate(n, Family::NC).unwrap().len() as u64, catalan(n));
            assert_eq!(enumerate(n, Family::INT).unwrap().len(), 1 << (n - 1));
            assert_eq!(enumerate(n, Family::LL_TOP).unwrap().len() as u64, catalan(n - 1));
        }
        assert_eq!(enumerate(4, Family::NC).unwrap().len(), 14);
        assert_eq!(enumerate(4, Family::INT).unwrap().len(), 8);
        assert_eq!(enumerate(4, Family::LL_TOP).unwrap().len(), 5);
        let pairs = enumerate(4, Family::NC2).unwrap();
        assert_eq!(pairs, vec![p("1,2/3,4"), p("1,4/2,3")]);
        assert!(enumerate(5, Family::NC2).unwrap().is_empty());
    }

    #[test]
    fn enumeration_is_sorted_unique_and_bounded() {
        let all = enumerate(6, Family::NC).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(enumerate(0, Family::NC), Err(Error::Bounds(_))));
        assert!(matches!(enumerate(11, Family::NC), Err(Error::Bounds(_))));
        assert_eq!(enumerate_bounded(11, Family::INT, 12).unwrap().len(), 1024);
    }

    #[test]
    fn ll_top_matches_brute_force_filter() {
        for n in 1..=7 {
            let one = NCPartition::one(n);
            let filtered: Vec<_> =
                enumerate(n, Family::NC).unwrap().into_iter().filter(|q| ll(q, &one).unwrap()).collect();
            assert_eq!(filtered, enumerate(n, Family::LL_TOP).unwrap());
        }
    }

    #[test]
    fn parse_and_display() {
        let q = p("2,3/1,4,5");
        assert_eq!(q.to_string(), "1,4,5/2,3");
        assert_eq!(q.blocks(), &[vec![1, 4, 5], vec![2, 3]]);
        assert!("1,3/2,4".parse::<NCPartition>().is_err());
        assert!("1,3".parse::<NCPartition>().is_err());
        assert!("1,2/2".parse::<NCPartition>().is_err());
        assert!("1,x".parse::<NCPartition>().is_err());
    }

    #[test]
    fn order_examples() {
        assert!(leq(&NCPartition::zero(3), &NCPartition::one(3)).unwrap());
        assert!(!leq(&p("1,2/3"), &p("1/2,3")).unwrap());
        let q = p("1,4,5/2,3");
        assert!(leq(&q, &q).unwrap());
        assert!(ll(&p("1,3/2"), &NCPartition::one(3)).unwrap());
        assert!(!ll(&p("1,2/3"), &NCPartition::one(3)).unwrap());
        assert!(ll(&q, &q).unwrap());
        assert!(leq(&q, &NCPartition::one(4)).is_err());
    }

    #[test]
    fn hull_and_outer_block() {
        assert_eq!(interval_hull(&p("1,4,5/2,3")), NCPartition::one(5));
        assert_eq!(interval_hull(&p("1,2/3,5/4")), p("1,2/3,4,5"));
        for r in enumerate(5, Family::INT).unwrap() {
            assert_eq!(interval_hull(&r), r);
        }
        assert_eq!(outer_block(&p("1,4,5/2,3")).unwrap(), vec![1, 4, 5]);
        assert_eq!(outer_block(&NCPartition::one(4)).unwrap(), vec![1, 2, 3, 4]);
        assert!(matches!(outer_block(&p("1,2/3,4")), Err(Error::Domain(_))));
    }

    #[test]
    fn unique_interval_above_in_ll() {
        for n in 1..=7 {
            let ints = enumerate(n, Family::INT).unwrap();
            for q in enumerate(n, Family::NC).unwrap() {
                let above: Vec<_> = ints.iter().filter(|r| ll(&q, r).unwrap()).collect();
                assert_eq!(above, vec![&interval_hull(&q)]);
            }
        }
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius_nc(&NCPartition::zero(2), &NCPartition::one(2)).unwrap(), -1);
        assert_eq!(mobius_nc(&NCPartition::zero(3), &NCPartition::one(3)).unwrap(), 2);
        assert_eq!(mobius_nc(&NCPartition::zero(4), &NCPartition::one(4)).unwrap(), -5);
        for n in 1..=7 {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(
                mobius_nc(&NCPartition::zero(n), &NCPartition::one(n)).unwrap(),
                sign * catalan(n - 1) as i64
            );
        }
        assert!(matches!(mobius_nc(&p("1,2/3"), &p("1/2,3")), Err(Error::Domain(_))));
    }

    #[test]
    fn mobius_defining_sum_vanishes() {
        let all = enumerate(5, Family::NC).unwrap();
        for (k, q) in all.iter().enumerate().step_by(5) {
            for r in all.iter().skip(k % 3).step_by(7) {
                if q == r || !leq(q, r).unwrap() {
                    continue;
                }
                let total: i64 = all
                    .iter()
                    .filter(|s| leq(q, s).unwrap() && leq(s, r).unwrap())
                    .map(|s| mobius_nc(q, s).unwrap())
                    .sum();
                assert_eq!(total, 0, "{q} .. {r}");
            }
        }
    }

    #[test]
    fn special_block_examples() {
        let q = p("1,4,5/2,3");
        assert_eq!(special_blocks(&q, &NCPartition::one(5)).unwrap(), BTreeSet::from([0]));
        assert_eq!(special_blocks(&q, &q).unwrap(), BTreeSet::from([0, 1]));
        assert_eq!(special_blocks(&p("1,3/2"), &NCPartition::one(3)).unwrap(), BTreeSet::from([0]));
        assert!(special_blocks(&p("1,2/3"), &NCPartition::one(3)).is_err());
    }

    #[test]
    fn bijection_examples() {
        let one = NCPartition::one(4);
        let b = ll_interval_bijection(&one).unwrap();
        assert_eq!(b, vec![(one.clone(), BTreeSet::from([0]))]);
        assert_eq!(ll_interval_bijection(&p("1,4,5/2,3")).unwrap().len(), 2);
        assert_eq!(ll_interval_bijection(&p("1,6/2,3/4,5")).unwrap().len(), 4);
        assert!(ll_interval_bijection(&p("1,2/3,4")).is_err());
    }

    #[test]
    fn bijection_onto_subsets_containing_outer_block() {
        for n in 1..=8 {
            for q in enumerate(n, Family::LL_TOP).unwrap() {
                let map = ll_interval_bijection(&q).unwrap();
                let images: BTreeSet<BTreeSet<usize>> = map.iter().map(|(_, s)| s.clone()).collect();
                let k = q.num_blocks();
                assert_eq!(map.len(), images.len(), "not injective at {q}");
                assert_eq!(images.len(), 1 << (k - 1), "{q}");
                assert!(images.iter().all(|s| s.contains(&0)));
            }
        }
    }

    #[test]
    fn forest_examples() {
        let q = p("1,4,5/2,3");
        let f = nesting_forest(&q);
        assert_eq!(f.roots, vec![0]);
        assert_eq!(f.children[0], vec![(0, 1)]);
        let f0 = nesting_forest(&NCPartition::zero(4));
        assert_eq!(f0.roots, vec![0, 1, 2, 3]);
        assert!(f0.children.iter().all(|c| c.is_empty()));
        let r = p("1,3,4/2/5,6");
        let fr = nesting_forest(&r);
        assert_eq!(fr.roots, vec![0, 2]);
        assert_eq!(fr.children[0], vec![(0, 1)]);
        for n in 1..=7 {
            for q in enumerate(n, Family::NC).unwrap() {
                assert_eq!(nesting_forest(&q).flatten(&q), (1..=n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn colorings() {
        let q = p("1,4,5/2,3");
        assert_eq!(Coloring::outer(&q).unwrap().color(1), 2);
        assert!(Coloring::new(&q, vec![1, 3], 2).is_err());
        assert!(Coloring::new(&q, vec![1], 2).is_err());
        assert!(Coloring::outer(&p("1,2/3")).is_err());
    }

    fn arb_nc(max_n: usize) -> impl Strategy<Value = NCPartition> {
        (1..=max_n).prop_flat_map(|n| {
            let all = enumerate(n, Family::NC).unwrap();
            let len = all.len();
            (0..len).prop_map(move |i| all[i].clone())
        })
    }

    proptest! {
        #[test]
        fn ll_is_a_partial_order(a in arb_nc(6), seed in 0usize..10_000) {
            let all = enumerate(a.n(), Family::NC).unwrap();
            let b = &all[seed % all.len()];
            let c = &all[(seed / 7) % all.len()];
            prop_assert!(ll(&a, &a).unwrap());
            if ll(&a, b).unwrap() && ll(b, &a).unwrap() {
                prop_assert_eq!(&a, b);
            }
            if ll(&a, b).unwrap() && ll(b, c).unwrap() {
                prop_assert!(ll(&a, c).unwrap());
            }
        }

        #[test]
        fn display_parse_round_trip(a in arb_nc(8)) {
            let back: NCPartition = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
