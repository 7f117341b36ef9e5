//! Exact entropies and (conditional) mutual information, in bits.
//!
//! Every mutual-information quantity goes through the same entropy routine:
//! `I(A;Y) = H(A) + H(Y) - H(A,Y)` and
//! `I(A;Y|C) = H(A,C) + H(Y,C) - H(A,Y,C) - H(C)`.
//! Source subsets are 0-based source indices; the target is implicit.

use crate::dist::{neumaier_sum, JointDistribution};
use crate::{Error, Result};

/// Values in `[-tol, 0)` are rounding noise and snap to zero.
pub const DEFAULT_CLAMP_TOLERANCE: f64 = 1e-12;

/// Shannon entropy of the marginal over `vars`, with `0 log 0 = 0`.
pub fn entropy(d: &JointDistribution, vars: &[usize]) -> Result<f64> {
    let vars = d.normalize_vars(vars)?;
    Ok(entropy_of(d, &vars))
}

pub(crate) fn entropy_of(d: &JointDistribution, vars: &[usize]) -> f64 {
    let probs = d.marginal_probs(vars);
    entropy_from_probs(&probs)
}

/// `-sum p log2 p` over a probability vector.
pub fn entropy_from_probs(probs: &[f64]) -> f64 {
    let h = -neumaier_sum(
        probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2()),
    );
    h.max(0.0)
}

/// `I(A;Y)` for a nonempty source subset `a`.
pub fn mutual_information(d: &JointDistribution, a: &[usize]) -> Result<f64> {
    clamp_info(mutual_information_raw(d, a)?, DEFAULT_CLAMP_TOLERANCE)
}

/// `I(A;Y)` before clamping.
pub fn mutual_information_raw(d: &JointDistribution, a: &[usize]) -> Result<f64> {
    let a = source_set(d, a)?;
    let y = d.target_index();
    let with_y = with(&a, y);
    Ok(entropy_of(d, &a) + entropy_of(d, &[y]) - entropy_of(d, &with_y))
}

/// `I(A;Y|C)`; `c` may be empty, which reduces to `I(A;Y)`.
pub fn conditional_mi(d: &JointDistribution, a: &[usize], c: &[usize]) -> Result<f64> {
    clamp_info(conditional_mi_raw(d, a, c)?, DEFAULT_CLAMP_TOLERANCE)
}

/// `I(A;Y|C)` before clamping.
pub fn conditional_mi_raw(d: &JointDistribution, a: &[usize], c: &[usize]) -> Result<f64> {
    let a = source_set(d, a)?;
    if c.is_empty() {
        return mutual_information_raw(d, &a);
    }
    let c = source_set(d, c)?;
    if let Some(&i) = a.iter().find(|i| c.binary_search(i).is_ok()) {
        return Err(Error::OverlappingSubsets(i));
    }
    let y = d.target_index();
    let ac = union(&a, &c);
    let yc = with(&c, y);
    let ayc = with(&ac, y);
    Ok(entropy_of(d, &ac) + entropy_of(d, &yc) - entropy_of(d, &ayc) - entropy_of(d, &c))
}

/// Snaps `[-tol, 0)` to zero; anything more negative is an error.
pub fn clamp_info(value: f64, tol: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -tol {
        Ok(0.0)
    } else {
        Err(Error::NegativeInformation(value))
    }
}

/// Sorted, deduplicated source indices (never the target).
fn source_set(d: &JointDistribution, a: &[usize]) -> Result<Vec<usize>> {
    if a.is_empty() {
        return Err(Error::EmptyVariableSet);
    }
    let n = d.n_sources();
    if let Some(&index) = a.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, n_vars: n });
    }
    let mut v = a.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn with(sorted: &[usize], extra: usize) -> Vec<usize> {
    let mut v = sorted.to_vec();
    if let Err(pos) = v.binary_search(&extra) {
        v.insert(pos, extra);
    }
    v
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}
