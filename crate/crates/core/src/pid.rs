//! Brute-force reference decomposition for small `n`.
//!
//! Redundancy is the minimum specific information: for each target value
//! `y`, take the least informative collection in the antichain, then average
//! over `p(y)`. Atoms follow by inverting `I_cap(alpha) = sum_{beta <= alpha}
//! Pi(beta)` down the lattice. Atoms produced this way are non-negative and
//! satisfy the consistency equations, which makes them a usable certificate
//! for the Shannon-invariant identities and the atom-mass bounds.
//!
//! This is a verification tool. Its cost grows with the lattice size, so it
//! stops at four sources.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::dist::JointDistribution;
use crate::format::sig12;
use crate::lattice::{Antichain, Lattice, SourceSet};
use crate::{Error, Result};

pub const MAX_ORACLE_SOURCES: usize = 4;

/// Atom values `Pi(alpha)` for every antichain, in lattice order.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomTable {
    n: usize,
    entries: Vec<(Antichain, f64)>,
}

impl AtomTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Antichain, f64)> {
        self.entries.iter().map(|(a, v)| (a, *v))
    }

    pub fn get(&self, alpha: &Antichain) -> Option<f64> {
        self.entries.iter().find(|(a, _)| a == alpha).map(|e| e.1)
    }

    /// Looks an atom up by its `{1}{2,3}` key.
    pub fn get_key(&self, key: &str) -> Option<f64> {
        let alpha = Antichain::parse(self.n, key).ok()?;
        self.get(&alpha)
    }

    /// Sum of all atoms; equals `I(X;Y)` for a consistent table.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn min_atom(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Sum of atoms reachable from source subset `a`: the right-hand side of
    /// the consistency equation for `I(a;Y)`.
    pub fn accessible_mass(&self, a: SourceSet) -> f64 {
        self.entries
            .iter()
            .filter(|(alpha, _)| alpha.accessible_from(a))
            .map(|e| e.1)
            .sum()
    }

    /// Sum of atoms not reachable from `a`, matching `I(a^C;Y|a)`.
    pub fn inaccessible_mass(&self, a: SourceSet) -> f64 {
        self.entries
            .iter()
            .filter(|(alpha, _)| !alpha.accessible_from(a))
            .map(|e| e.1)
            .sum()
    }

    /// `I_r^(k)`: total mass of atoms with degree of redundancy `k`.
    pub fn k_redundant(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        Ok(self.mass_where(|a| a.degree_redundancy() == k))
    }

    /// `I_v^(k)`: total mass of atoms with degree of vulnerability `k`.
    pub fn k_vulnerable(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        Ok(self.mass_where(|a| a.degree_vulnerability() == k))
    }

    /// `[I_r^(0), .., I_r^(n)]`.
    pub fn redundancy_profile(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|k| self.mass_where(|a| a.degree_redundancy() == k))
            .collect()
    }

    /// `[I_v^(0), .., I_v^(n)]`.
    pub fn vulnerability_profile(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|k| self.mass_where(|a| a.degree_vulnerability() == k))
            .collect()
    }

    fn mass_where(&self, pred: impl Fn(&Antichain) -> bool) -> f64 {
        self.entries
            .iter()
            .filter(|(a, _)| pred(a))
            .map(|e| e.1)
            .sum()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.n {
            return Err(Error::OutOfRangeK { k, n: self.n });
        }
        Ok(())
    }

    /// One `key<TAB>value` line per atom, values to 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (a, v) in &self.entries {
            let _ = writeln!(s, "{a}\t{}", sig12(*v));
        }
        s
    }

    /// Reads the [`Self::to_text`] format back. Every antichain for `n` must
    /// appear exactly once.
    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let lattice = Lattice::get(n)?;
        let mut values = vec![None; lattice.len()];
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: lineno as u64 + 1,
                message,
            };
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected `antichain<TAB>value`".into()))?;
            let alpha = Antichain::parse(n, key)?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad value `{value}`: {e}")))?;
            let i = lattice
                .index_of(&alpha)
                .ok_or_else(|| parse_err(format!("unknown antichain {alpha}")))?;
            if values[i].replace(value).is_some() {
                return Err(parse_err(format!("duplicate antichain {alpha}")));
            }
        }
        let entries = lattice
            .elements()
            .iter()
            .zip(values)
            .map(|(a, v)| {
                v.map(|v| (a.clone(), v))
                    .ok_or_else(|| Error::InvalidAntichain(format!("missing atom {a}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { n, entries })
    }
}

/// Specific information of every nonempty source subset about every target
/// symbol, plus the target marginal.
struct SpecificInfo {
    /// `values[mask][y]`; row 0 unused.
    values: Vec<Vec<f64>>,
    p_target: Vec<f64>,
}

impl SpecificInfo {
    fn build(d: &JointDistribution) -> Self {
        let n = d.n_sources();
        let p_target = target_marginal(d);
        let values = (0..1u32 << n)
            .map(|mask| {
                if mask == 0 {
                    Vec::new()
                } else {
                    specific_for_all_targets(d, SourceSet::from_mask(mask), &p_target)
                }
            })
            .collect();
        Self { values, p_target }
    }

    fn imin(&self, alpha: &Antichain) -> f64 {
        self.p_target
            .iter()
            .enumerate()
            .filter(|(_, &py)| py > 0.0)
            .map(|(y, &py)| {
                let least = alpha
                    .sets()
                    .iter()
                    .map(|a| self.values[a.mask() as usize][y])
                    .fold(f64::INFINITY, f64::min);
                py * least
            })
            .sum()
    }
}

fn target_marginal(d: &JointDistribution) -> Vec<f64> {
    let t = d.target_index();
    let mut p = vec![0.0; d.alphabets()[t].len()];
    for (row, q) in d.iter() {
        p[row[t] as usize] += q;
    }
    p
}

/// `I(Y=y; A) = sum_{x_a} p(x_a|y) log2(p(y|x_a) / p(y))` for every `y`.
fn specific_for_all_targets(d: &JointDistribution, a: SourceSet, p_target: &[f64]) -> Vec<f64> {
    let t = d.target_index();
    let idx: Vec<usize> = a.indices().collect();
    let mut p_a: HashMap<Vec<u32>, f64> = HashMap::new();
    let mut p_ay: HashMap<(Vec<u32>, u32), f64> = HashMap::new();
    for (row, q) in d.iter() {
        let key: Vec<u32> = idx.iter().map(|&i| row[i]).collect();
        *p_ay.entry((key.clone(), row[t])).or_insert(0.0) += q;
        *p_a.entry(key).or_insert(0.0) += q;
    }
    let mut terms: Vec<(u32, Vec<u32>, f64)> = p_ay
        .into_iter()
        .map(|((x, y), q)| {
            let py = p_target[y as usize];
            let term = q / py * (q / (p_a[&x] * py)).log2();
            (y, x, term)
        })
        .collect();
    // fixed summation order
    terms.sort_unstable_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let mut out = vec![0.0; p_target.len()];
    for (y, _, term) in terms {
        out[y as usize] += term;
    }
    out
}

fn check_oracle_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORACLE_SOURCES {
        return Err(Error::UnsupportedSize {
            n,
            max: MAX_ORACLE_SOURCES,
        });
    }
    Ok(())
}

/// Specific information that the sources in `a` (0-based) carry about target
/// symbol `y`.
pub fn specific_information(d: &JointDistribution, a: &[usize], y: u32) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyVariableSet);
    }
    let n = d.n_sources();
    if let Some(&index) = a.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, n_vars: n });
    }
    let p_target = target_marginal(d);
    match p_target.get(y as usize) {
        Some(&py) if py > 0.0 => {}
        _ => return Err(Error::ZeroProbabilityTarget(y)),
    }
    let set = SourceSet::from_mask(a.iter().fold(0, |m, &i| m | 1 << i));
    Ok(specific_for_all_targets(d, set, &p_target)[y as usize])
}

/// Minimum-specific-information redundancy of the collections in `alpha`.
pub fn imin(d: &JointDistribution, alpha: &Antichain) -> Result<f64> {
    check_oracle_size(alpha.n())?;
    if alpha.n() != d.n_sources() {
        return Err(Error::MismatchedSourceCount(alpha.n(), d.n_sources()));
    }
    Ok(SpecificInfo::build(d).imin(alpha))
}

/// Full decomposition of `I(X;Y)` for up to four sources.
pub fn atoms_moebius(d: &JointDistribution) -> Result<AtomTable> {
    let n = d.n_sources();
    check_oracle_size(n)?;
    let lattice = Lattice::get(n)?;
    let info = SpecificInfo::build(d);
    let redundancies: Vec<f64> = lattice.elements().iter().map(|a| info.imin(a)).collect();
    moebius_invert(n, &redundancies)
}

/// Atoms from cumulative redundancies given in lattice order:
/// `Pi(alpha) = I_cap(alpha) - sum_{beta < alpha} Pi(beta)`.
pub fn moebius_invert(n: usize, redundancies: &[f64]) -> Result<AtomTable> {
    let lattice = Lattice::get(n)?;
    if redundancies.len() != lattice.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} redundancy values for {} antichains",
            redundancies.len(),
            lattice.len()
        )));
    }
    let mut atoms: Vec<f64> = Vec::with_capacity(lattice.len());
    for (i, &red) in redundancies.iter().enumerate() {
        let below: f64 = lattice.strictly_below(i).map(|j| atoms[j]).sum();
        atoms.push(red - below);
    }
    Ok(AtomTable {
        n,
        entries: lattice.elements().iter().cloned().zip(atoms).collect(),
    })
}

pub fn k_redundant_information(t: &AtomTable, k: usize) -> Result<f64> {
    t.k_redundant(k)
}

pub fn k_vulnerable_information(t: &AtomTable, k: usize) -> Result<f64> {
    t.k_vulnerable(k)
}
