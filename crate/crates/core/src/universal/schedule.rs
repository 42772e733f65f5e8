//! Counting, ranking and unranking of the scheduled items of one stage.
//!
//! Items are identified by vertex ranks in the previous stage. Subsets are
//! ordered by size, then lexicographically. In fresh mode only subsets whose
//! largest rank is at least `fresh_from` (i.e. that meet the previous stage's
//! new vertices) are scheduled.

use crate::error::{ForgeError, Result};
use crate::finite_graph::Part;

/// Largest previous-stage size for which items can be ranked.
pub const MAX_RANKED: usize = 1 << 24;

pub fn binom(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn overflow() -> ForgeError {
    ForgeError::CapExceeded { what: "stage item count".into(), size: u128::MAX, cap: u128::MAX }
}

/// Subsets of `0..m` of size at most `cap`, optionally required to reach `fresh_from`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetFamily {
    pub m: usize,
    pub cap: usize,
    pub fresh_from: Option<usize>,
}

impl SubsetFamily {
    pub fn count_of_size(&self, t: usize) -> Option<u128> {
        if t > self.cap {
            return Some(0);
        }
        let all = binom(self.m, t)?;
        match self.fresh_from {
            Some(old) => Some(all - binom(old, t)?),
            None => Some(all),
        }
    }

    pub fn total(&self) -> Option<u128> {
        (0..=self.cap.min(self.m)).try_fold(0u128, |acc, t| acc.checked_add(self.count_of_size(t)?))
    }

    /// Index of the first item of size `t`.
    pub fn size_offset(&self, t: usize) -> Option<u128> {
        (0..t.min(self.cap.min(self.m) + 1)).try_fold(0u128, |acc, u| acc.checked_add(self.count_of_size(u)?))
    }

    pub fn unrank(&self, mut idx: u128) -> Result<Vec<usize>> {
        for t in 0..=self.cap.min(self.m) {
            let c = self.count_of_size(t).ok_or_else(overflow)?;
            if idx < c {
                return unrank_combination(self.m, t, idx, self.fresh_from);
            }
            idx -= c;
        }
        Err(ForgeError::Invalid("item index beyond the stage".into()))
    }

    /// Inverse of [`unrank`](Self::unrank); `None` if the set is not scheduled.
    pub fn rank(&self, items: &[usize]) -> Result<Option<u128>> {
        let t = items.len();
        if t > self.cap || items.iter().any(|&x| x >= self.m) || !items.windows(2).all(|w| w[0] < w[1]) {
            return Ok(None);
        }
        if let Some(old) = self.fresh_from {
            if items.last().is_none_or(|&x| x < old) {
                return Ok(None);
            }
        }
        let off = self.size_offset(t).ok_or_else(overflow)?;
        let r = rank_combination(self.m, items, self.fresh_from)?;
        Ok(Some(off + r))
    }
}

/// Number of completions when `c` is placed with `rem` elements still to place
/// (including `c`), subject to the largest element reaching `req`.
fn completions(m: usize, c: usize, rem: usize, req: Option<usize>) -> Result<u128> {
    let k = rem - 1;
    let total = binom(m - c - 1, k).ok_or_else(overflow)?;
    let Some(req) = req else { return Ok(total) };
    if k == 0 {
        return Ok(u128::from(c >= req));
    }
    let bad = if req > c + 1 { binom(req - c - 1, k).ok_or_else(overflow)? } else { 0 };
    Ok(total - bad)
}

pub fn unrank_combination(m: usize, t: usize, mut r: u128, req: Option<usize>) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(t);
    let mut start = 0;
    for pos in 0..t {
        let rem = t - pos;
        let mut placed = false;
        for c in start..m {
            if m - c < rem {
                break;
            }
            let n = completions(m, c, rem, req)?;
            if r < n {
                out.push(c);
                start = c + 1;
                placed = true;
                break;
            }
            r -= n;
        }
        if !placed {
            return Err(ForgeError::Invalid("combination rank out of range".into()));
        }
    }
    Ok(out)
}

pub fn rank_combination(m: usize, items: &[usize], req: Option<usize>) -> Result<u128> {
    let t = items.len();
    let mut r = 0u128;
    let mut start = 0;
    for (pos, &x) in items.iter().enumerate() {
        for c in start..x {
            r += completions(m, c, t - pos, req)?;
        }
        start = x + 1;
    }
    Ok(r)
}

/// A scheduled item, as ranks into the previous stage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    /// Graph witness: joined to exactly these vertices.
    Subset(Vec<usize>),
    /// Digraph witness `w`: arcs `w -> a`, `b -> w`, and both ways to `c`.
    Triple { a: Vec<usize>, b: Vec<usize>, c: Vec<usize> },
    /// Bipartite witness joined to a subset of part `part`; it lies in the other part.
    PartSubset { part: Part, members: Vec<usize> },
}

impl Item {
    /// All ranks mentioned, sorted.
    pub fn support(&self) -> Vec<usize> {
        match self {
            Item::Subset(s) | Item::PartSubset { members: s, .. } => s.clone(),
            Item::Triple { a, b, c } => {
                let mut u: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
                u.sort_unstable();
                u
            }
        }
    }
}

fn pow3(t: usize) -> Option<u128> {
    3u128.checked_pow(t as u32)
}

/// Triples of pairwise disjoint subsets, ordered by union size, then union,
/// then the labelling read as a base-3 numeral (A = 0, B = 1, C = 2, first
/// union element most significant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripleFamily(pub SubsetFamily);

impl TripleFamily {
    pub fn count_of_size(&self, t: usize) -> Option<u128> {
        self.0.count_of_size(t)?.checked_mul(pow3(t)?)
    }

    pub fn total(&self) -> Option<u128> {
        (0..=self.0.cap.min(self.0.m)).try_fold(0u128, |acc, t| acc.checked_add(self.count_of_size(t)?))
    }

    pub fn size_offset(&self, t: usize) -> Option<u128> {
        (0..t.min(self.0.cap.min(self.0.m) + 1)).try_fold(0u128, |acc, u| acc.checked_add(self.count_of_size(u)?))
    }

    pub fn unrank(&self, mut idx: u128) -> Result<Item> {
        for t in 0..=self.0.cap.min(self.0.m) {
            let c = self.count_of_size(t).ok_or_else(overflow)?;
            if idx < c {
                let p = pow3(t).ok_or_else(overflow)?;
                let union = unrank_combination(self.0.m, t, idx / p, self.0.fresh_from)?;
                let mut label = idx % p;
                let mut digits = vec![0u8; t];
                for d in digits.iter_mut().rev() {
                    *d = (label % 3) as u8;
                    label /= 3;
                }
                let (mut a, mut b, mut cc) = (Vec::new(), Vec::new(), Vec::new());
                for (x, d) in union.into_iter().zip(digits) {
                    match d {
                        0 => a.push(x),
                        1 => b.push(x),
                        _ => cc.push(x),
                    }
                }
                return Ok(Item::Triple { a, b, c: cc });
            }
            idx -= c;
        }
        Err(ForgeError::Invalid("item index beyond the stage".into()))
    }

    pub fn rank(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<Option<u128>> {
        let mut labelled: Vec<(usize, u8)> = a
            .iter()
            .map(|&x| (x, 0))
            .chain(b.iter().map(|&x| (x, 1)))
            .chain(c.iter().map(|&x| (x, 2)))
            .collect();
        labelled.sort_unstable();
        if labelled.windows(2).any(|w| w[0].0 == w[1].0) {
            return Ok(None);
        }
        let union: Vec<usize> = labelled.iter().map(|p| p.0).collect();
        let Some(urank) = self.0.rank(&union)? else { return Ok(None) };
        let t = union.len();
        let sub_off = self.0.size_offset(t).ok_or_else(overflow)?;
        let within = urank - sub_off;
        let label = labelled.iter().fold(0u128, |acc, p| acc * 3 + p.1 as u128);
        let off = self.size_offset(t).ok_or_else(overflow)?;
        Ok(Some(off + within * pow3(t).ok_or_else(overflow)? + label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_subsets(m: usize, cap: usize, fresh: Option<usize>) -> Vec<Vec<usize>> {
        let mut all: Vec<Vec<usize>> = (0u32..1 << m)
            .map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| s.len() <= cap && fresh.map_or(true, |f| s.last().is_some_and(|&x| x >= f)))
            .collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        all
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(6, 3), Some(20));
        assert_eq!(binom(3, 5), Some(0));
        assert_eq!(binom(0, 0), Some(1));
    }

    #[test]
    fn subset_order_matches_brute_force() {
        for m in 0..7 {
            for cap in 0..=m {
                for fresh in [None, Some(0), Some(m / 2), Some(m)] {
                    let fam = SubsetFamily { m, cap, fresh_from: fresh };
                    let want = brute_subsets(m, cap, fresh);
                    assert_eq!(fam.total().unwrap(), want.len() as u128);
                    for (i, s) in want.iter().enumerate() {
                        assert_eq!(&fam.unrank(i as u128).unwrap(), s);
                        assert_eq!(fam.rank(s).unwrap(), Some(i as u128));
                    }
                }
            }
        }
    }

    #[test]
    fn single_vertex_triples() {
        let fam = TripleFamily(SubsetFamily { m: 1, cap: 1, fresh_from: None });
        assert_eq!(fam.total(), Some(4));
        let items: Vec<Item> = (0..4).map(|i| fam.unrank(i).unwrap()).collect();
        assert_eq!(
            items,
            vec![
                Item::Triple { a: vec![], b: vec![], c: vec![] },
                Item::Triple { a: vec![0], b: vec![], c: vec![] },
                Item::Triple { a: vec![], b: vec![0], c: vec![] },
                Item::Triple { a: vec![], b: vec![], c: vec![0] },
            ]
        );
    }

    proptest! {
        #[test]
        fn triple_rank_round_trip(m in 1usize..6, cap in 0usize..6, fresh in prop::option::of(0usize..6), i in 0u128..5000) {
            let fam = TripleFamily(SubsetFamily { m, cap: cap.min(m), fresh_from: fresh.map(|f| f.min(m)) });
            let total = fam.total().unwrap();
            prop_assume!(total > 0);
            let i = i % total;
            let Item::Triple { a, b, c } = fam.unrank(i).unwrap() else { unreachable!() };
            prop_assert_eq!(fam.rank(&a, &b, &c).unwrap(), Some(i));
        }

        #[test]
        fn large_family_round_trip(m in 20usize..400, cap in 1usize..5, i in 0u128..1_000_000) {
            let fam = SubsetFamily { m, cap, fresh_from: Some(m / 2) };
            let i = i % fam.total().unwrap();
            let s = fam.unrank(i).unwrap();
            prop_assert_eq!(fam.rank(&s).unwrap(), Some(i));
        }
    }
}
