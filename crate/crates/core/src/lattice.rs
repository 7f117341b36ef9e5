//! Antichains of source subsets and the redundancy lattice over them.
//!
//! A source subset is a bitmask ([`SourceSet`]) with bit `i` standing for the
//! 0-based source `i`; it is printed 1-based, so `{1,3}` is mask `0b101`.
//! With at most five sources every subset fits in a `u32` index below 32, and
//! a family of subsets fits in a `u32` bitset over those indices. The order
//! test `beta <= alpha` then reduces to one mask inclusion: every set of
//! `alpha` must lie in the up-closure of `beta`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use crate::{Error, Result};

pub const MAX_LATTICE_SOURCES: usize = 5;

/// Nonempty subset of sources as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSet(u32);

impl SourceSet {
    pub fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    /// From 1-based source labels.
    pub fn from_members(members: &[usize]) -> Self {
        Self(members.iter().fold(0, |m, &i| m | 1 << (i - 1)))
    }

    /// Every source of `0..n`.
    pub fn full(n: usize) -> Self {
        Self((1u32 << n) - 1)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: SourceSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based source indices, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.0 >> i & 1 == 1)
    }

    /// 1-based labels, ascending.
    pub fn members(self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    fn canonical_cmp(self, other: SourceSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.members().cmp(&other.members()))
    }
}

impl fmt::Display for SourceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, m) in self.members().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// Nonempty family of pairwise incomparable nonempty source subsets, kept in
/// canonical order (by size, then lexicographic members).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Antichain {
    n: usize,
    sets: Vec<SourceSet>,
}

impl Antichain {
    pub fn new(n: usize, mut sets: Vec<SourceSet>) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::InvalidAntichain(format!("source count {n}")));
        }
        if sets.is_empty() {
            return Err(Error::InvalidAntichain("no sets".into()));
        }
        let full = SourceSet::full(n);
        for s in &sets {
            if s.is_empty() {
                return Err(Error::InvalidAntichain("empty set".into()));
            }
            if !s.is_subset(full) {
                return Err(Error::InvalidAntichain(format!("{s} exceeds {n} sources")));
            }
        }
        sets.sort_by(|a, b| a.canonical_cmp(*b));
        sets.dedup();
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                if a.is_subset(*b) || b.is_subset(*a) {
                    return Err(Error::InvalidAntichain(format!("{a} and {b} are nested")));
                }
            }
        }
        Ok(Self { n, sets })
    }

    /// Parses the `{1}{2,3}` rendering.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let bad = || Error::InvalidAntichain(format!("cannot parse `{text}`"));
        let mut sets = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(bad)?;
            let end = body.find('}').ok_or_else(bad)?;
            let mut members = Vec::new();
            for tok in body[..end].split(',') {
                let m: usize = tok.trim().parse().map_err(|_| bad())?;
                if m == 0 || m > n {
                    return Err(bad());
                }
                members.push(m);
            }
            sets.push(SourceSet::from_members(&members));
            rest = body[end + 1..].trim_start();
        }
        Self::new(n, sets)
    }

    /// `{1}{2}..{n}`: reachable from every single source.
    pub fn bottom(n: usize) -> Self {
        Self {
            n,
            sets: (1..=n).map(|i| SourceSet::from_members(&[i])).collect(),
        }
    }

    /// `{1,..,n}`: reachable only from all sources together.
    pub fn top(n: usize) -> Self {
        Self {
            n,
            sets: vec![SourceSet::full(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[SourceSet] {
        &self.sets
    }

    /// Number of singleton sets.
    pub fn degree_redundancy(&self) -> usize {
        self.sets.iter().filter(|s| s.len() == 1).count()
    }

    /// Number of sources present in every set.
    pub fn degree_vulnerability(&self) -> usize {
        self.sets
            .iter()
            .fold(SourceSet::full(self.n).0, |acc, s| acc & s.0)
            .count_ones() as usize
    }

    /// Whether the atom is reachable from `a`: some set of the antichain is
    /// contained in `a`.
    pub fn accessible_from(&self, a: SourceSet) -> bool {
        self.sets.iter().any(|b| b.is_subset(a))
    }

    /// `self <= other`: every set of `other` contains some set of `self`.
    pub fn leq(&self, other: &Antichain) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::MismatchedSourceCount(self.n, other.n));
        }
        Ok(other
            .sets
            .iter()
            .all(|b| self.sets.iter().any(|a| a.is_subset(*b))))
    }

    fn family_mask(&self) -> u32 {
        self.sets.iter().fold(0, |m, s| m | 1 << s.0)
    }

    /// Bitset over subset masks: bit `s` set when `s` contains a member set.
    fn up_closure_mask(&self) -> u32 {
        let subsets = 1u32 << self.n;
        (1..subsets)
            .filter(|&s| self.accessible_from(SourceSet(s)))
            .fold(0, |m, s| m | 1 << s)
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sets {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Ord for Antichain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.sets.iter().zip(&other.sets) {
                match a.canonical_cmp(*b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            self.sets.len().cmp(&other.sets.len())
        })
    }
}

impl PartialOrd for Antichain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All antichains for `n` sources in a fixed linear extension of the order,
/// with the order relation precomputed as masks.
#[derive(Debug)]
pub struct Lattice {
    n: usize,
    elements: Vec<Antichain>,
    family: Vec<u32>,
    up: Vec<u32>,
    down_sizes: Vec<usize>,
}

impl Lattice {
    /// Shared lattice for `n` sources, built on first use.
    pub fn get(n: usize) -> Result<&'static Lattice> {
        static CACHE: [OnceLock<Lattice>; MAX_LATTICE_SOURCES + 1] =
            [const { OnceLock::new() }; MAX_LATTICE_SOURCES + 1];
        check_size(n)?;
        Ok(CACHE[n].get_or_init(|| Lattice::build(n)))
    }

    fn build(n: usize) -> Lattice {
        let raw = enumerate_raw(n);
        let family: Vec<u32> = raw.iter().map(Antichain::family_mask).collect();
        let up: Vec<u32> = raw.iter().map(Antichain::up_closure_mask).collect();
        let down_sizes: Vec<usize> = family
            .iter()
            .map(|&f| up.iter().filter(|&&u| f & !u == 0).count())
            .collect();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| {
            down_sizes[a]
                .cmp(&down_sizes[b])
                .then_with(|| raw[a].cmp(&raw[b]))
        });
        Lattice {
            n,
            elements: order.iter().map(|&i| raw[i].clone()).collect(),
            family: order.iter().map(|&i| family[i]).collect(),
            up: order.iter().map(|&i| up[i]).collect(),
            down_sizes: order.iter().map(|&i| down_sizes[i]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Antichain] {
        &self.elements
    }

    pub fn index_of(&self, alpha: &Antichain) -> Option<usize> {
        if alpha.n != self.n || self.n > MAX_LATTICE_SOURCES {
            return None;
        }
        let f = alpha.family_mask();
        self.family.iter().position(|&g| g == f)
    }

    /// `elements[i] <= elements[j]`.
    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.family[j] & !self.up[i] == 0
    }

    /// Size of the down-set of element `i`, itself included.
    pub fn down_set_size(&self, i: usize) -> usize {
        self.down_sizes[i]
    }

    /// Indices strictly below `i`. All of them precede `i` in the ordering.
    pub fn strictly_below(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..i).filter(move |&j| self.leq_idx(j, i))
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LATTICE_SOURCES {
        return Err(Error::UnsupportedSize {
            n,
            max: MAX_LATTICE_SOURCES,
        });
    }
    Ok(())
}

/// Grows antichains one subset at a time in canonical subset order, only
/// ever adding subsets incomparable with everything chosen so far.
fn enumerate_raw(n: usize) -> Vec<Antichain> {
    let mut subsets: Vec<SourceSet> = (1..1u32 << n).map(SourceSet).collect();
    subsets.sort_by(|a, b| a.canonical_cmp(*b));
    // comparable[i]: bitset over subset positions comparable with subset i
    let comparable: Vec<u64> = subsets
        .iter()
        .map(|a| {
            subsets
                .iter()
                .enumerate()
                .filter(|(_, b)| a.is_subset(**b) || b.is_subset(*a))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();

    fn grow(
        start: usize,
        blocked: u64,
        chosen: &mut Vec<SourceSet>,
        subsets: &[SourceSet],
        comparable: &[u64],
        n: usize,
        out: &mut Vec<Antichain>,
    ) {
        for i in start..subsets.len() {
            if blocked >> i & 1 == 1 {
                continue;
            }
            chosen.push(subsets[i]);
            out.push(Antichain {
                n,
                sets: chosen.clone(),
            });
            grow(i + 1, blocked | comparable[i], chosen, subsets, comparable, n, out);
            chosen.pop();
        }
    }

    let mut out = Vec::new();
    grow(0, 0, &mut Vec::new(), &subsets, &comparable, n, &mut out);
    out
}

/// Every antichain for `n` sources (`1 <= n <= 5`), ordered by down-set size
/// and then canonical form.
pub fn enumerate_antichains(n: usize) -> Result<Vec<Antichain>> {
    Ok(Lattice::get(n)?.elements.clone())
}

pub fn degree_redundancy(alpha: &Antichain) -> usize {
    alpha.degree_redundancy()
}

pub fn degree_vulnerability(alpha: &Antichain) -> usize {
    alpha.degree_vulnerability()
}

pub fn lattice_leq(alpha: &Antichain, beta: &Antichain) -> Result<bool> {
    alpha.leq(beta)
}

/// All `beta <= alpha`, `alpha` included, in lattice order.
pub fn down_set(alpha: &Antichain) -> Result<Vec<Antichain>> {
    let lattice = Lattice::get(alpha.n)?;
    let i = lattice
        .index_of(alpha)
        .ok_or_else(|| Error::InvalidAntichain(alpha.to_string()))?;
    Ok((0..=i)
        .filter(|&j| lattice.leq_idx(j, i))
        .map(|j| lattice.elements[j].clone())
        .collect())
}

/// Counts of antichains per degree value, indexed `0..=n`.
pub fn degree_histograms(n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let lattice = Lattice::get(n)?;
    let mut r = vec![0; n + 1];
    let mut v = vec![0; n + 1];
    for a in &lattice.elements {
        r[a.degree_redundancy()] += 1;
        v[a.degree_vulnerability()] += 1;
    }
    Ok((r, v))
}
