//! The four Shannon invariants and what they imply about atom mass.
//!
//! Only `2n + 1` mutual-information terms are needed: `I(X;Y)`, the `n`
//! single-source terms `I(Xi;Y)` and the `n` leave-one-out terms
//! `I(Xj;Y|X-j)`. The lattice is never touched here.
//!
//! The bound interpretation in [`BoundsReport`] holds for decompositions
//! whose atoms are non-negative. For signed decompositions the invariants
//! themselves remain exact but the bounds say nothing.

use rayon::prelude::*;

use crate::dist::JointDistribution;
use crate::infomeasures::{clamp_info, conditional_mi_raw, mutual_information_raw};
use crate::{Error, Result};

pub const DEFAULT_ILL_DEFINED_THRESHOLD: f64 = 1e-12;

/// Slack allowed when checking `r_bar`, `v_bar` against `[0, n]`.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantConfig {
    /// `r_bar` and `v_bar` are reported only when `I(X;Y)` exceeds this (bits).
    pub ill_defined_threshold: f64,
    /// Negative MI values down to `-clamp_tolerance` snap to zero.
    pub clamp_tolerance: f64,
}

impl Default for InvariantConfig {
    fn default() -> Self {
        Self {
            ill_defined_threshold: DEFAULT_ILL_DEFINED_THRESHOLD,
            clamp_tolerance: crate::DEFAULT_CLAMP_TOLERANCE,
        }
    }
}

/// Everything computed for one analysis. Values are in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub n_sources: usize,
    pub total_mi: f64,
    /// `I(Xi;Y)` per source.
    pub marginal_mi: Vec<f64>,
    /// `I(Xj;Y|X-j)` per source.
    pub conditional_mi: Vec<f64>,
    /// `None` when `I(X;Y)` is at or below the ill-defined threshold.
    pub r_bar: Option<f64>,
    pub v_bar: Option<f64>,
    pub rsi: f64,
    pub drsi: f64,
    pub bounds: Option<BoundsReport>,
}

impl InvariantReport {
    pub fn is_well_defined(&self) -> bool {
        self.r_bar.is_some()
    }

    pub fn redundancy_sum(&self) -> f64 {
        self.marginal_mi.iter().sum()
    }

    pub fn vulnerability_sum(&self) -> f64 {
        self.conditional_mi.iter().sum()
    }
}

/// Minimal atom-mass fractions implied by `r_bar` and `v_bar`, assuming
/// non-negative atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    /// Lower bound on `I_r^(0) / I`.
    pub min_source_synergy_fraction: f64,
    /// Lower bound on `sum_{k>=2} I_r^(k) / I`.
    pub min_proper_redundancy_fraction: f64,
    /// Lower bound on `I_v^(0) / I`.
    pub min_robustness_fraction: f64,
    /// Lower bound on `sum_{k>=2} I_v^(k) / I`.
    pub min_vulnerability_fraction: f64,
    pub redundancy_predominant: bool,
    pub synergy_predominant: bool,
    pub robustness_predominant: bool,
    pub vulnerability_predominant: bool,
}

/// Computes the full report. Never fails on zero information: the ratios are
/// left as `None` and RSI/DRSI are still filled in.
pub fn analyze(d: &JointDistribution, cfg: &InvariantConfig) -> Result<InvariantReport> {
    let n = d.n_sources();
    let all: Vec<usize> = (0..n).collect();
    let tol = cfg.clamp_tolerance;
    let total_mi = clamp_info(mutual_information_raw(d, &all)?, tol)?;

    let terms: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| -> Result<(f64, f64)> {
            let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            let marginal = clamp_info(mutual_information_raw(d, &[j])?, tol)?;
            let conditional = clamp_info(conditional_mi_raw(d, &[j], &others)?, tol)?;
            Ok((marginal, conditional))
        })
        .collect::<Result<_>>()?;
    let (marginal_mi, conditional_mi): (Vec<f64>, Vec<f64>) = terms.into_iter().unzip();

    let redundancy: f64 = marginal_mi.iter().sum();
    let vulnerability: f64 = conditional_mi.iter().sum();
    let rsi = redundancy - total_mi;
    let drsi = total_mi - vulnerability;

    let (r_bar, v_bar, bounds) = if total_mi > cfg.ill_defined_threshold {
        let r = redundancy / total_mi;
        let v = vulnerability / total_mi;
        (Some(r), Some(v), Some(interpret_bounds(r, v, n)?))
    } else {
        (None, None, None)
    };

    Ok(InvariantReport {
        n_sources: n,
        total_mi,
        marginal_mi,
        conditional_mi,
        r_bar,
        v_bar,
        rsi,
        drsi,
        bounds,
    })
}

/// `R(X;Y) = sum_i I(Xi;Y)`.
pub fn redundancy_sum(d: &JointDistribution) -> Result<f64> {
    (0..d.n_sources())
        .map(|i| crate::mutual_information(d, &[i]))
        .sum()
}

/// `V(X;Y) = sum_j I(Xj;Y|X-j)`; equals `I(X1;Y)` for one source.
pub fn vulnerability_sum(d: &JointDistribution) -> Result<f64> {
    let n = d.n_sources();
    (0..n)
        .map(|j| {
            let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            crate::conditional_mi(d, &[j], &others)
        })
        .sum()
}

fn total_mi(d: &JointDistribution) -> Result<f64> {
    let all: Vec<usize> = (0..d.n_sources()).collect();
    crate::mutual_information(d, &all)
}

fn ratio(numerator: f64, mi: f64, threshold: f64) -> Result<f64> {
    if mi > threshold {
        Ok(numerator / mi)
    } else {
        Err(Error::IllDefinedInvariant { mi, threshold })
    }
}

/// `r_bar = R(X;Y) / I(X;Y)`, in `[0, n]`.
pub fn avg_degree_redundancy(d: &JointDistribution, threshold: f64) -> Result<f64> {
    ratio(redundancy_sum(d)?, total_mi(d)?, threshold)
}

/// `v_bar = V(X;Y) / I(X;Y)`, in `[0, n]`.
pub fn avg_degree_vulnerability(d: &JointDistribution, threshold: f64) -> Result<f64> {
    ratio(vulnerability_sum(d)?, total_mi(d)?, threshold)
}

/// Redundancy-synergy index `sum_i I(Xi;Y) - I(X;Y)`.
pub fn rsi(d: &JointDistribution) -> Result<f64> {
    Ok(redundancy_sum(d)? - total_mi(d)?)
}

/// Dual redundancy-synergy index `I(X;Y) - sum_j I(Xj;Y|X-j)`.
pub fn drsi(d: &JointDistribution) -> Result<f64> {
    Ok(total_mi(d)? - vulnerability_sum(d)?)
}

/// Translates `r_bar`, `v_bar` into minimal atom fractions and predominance
/// flags. Inputs must lie in `[0, n]`.
pub fn interpret_bounds(r_bar: f64, v_bar: f64, n: usize) -> Result<BoundsReport> {
    if n == 0 {
        return Err(Error::OutOfRangeInput("n must be at least 1".into()));
    }
    let nf = n as f64;
    for (name, x) in [("r_bar", r_bar), ("v_bar", v_bar)] {
        if !x.is_finite() || x < -RANGE_SLACK || x > nf + RANGE_SLACK {
            return Err(Error::OutOfRangeInput(format!("{name} = {x} not in [0, {n}]")));
        }
    }
    Ok(BoundsReport {
        min_source_synergy_fraction: weak_fraction(r_bar),
        min_proper_redundancy_fraction: strong_fraction(r_bar, n),
        min_robustness_fraction: weak_fraction(v_bar),
        min_vulnerability_fraction: strong_fraction(v_bar, n),
        redundancy_predominant: r_bar > lambda_threshold(0.5, n),
        synergy_predominant: r_bar < 0.5,
        robustness_predominant: v_bar < 0.5,
        vulnerability_predominant: v_bar > lambda_threshold(0.5, n),
    })
}

/// Lower bound on the degree-0 fraction: `max(0, 1 - m)`, at most 1.
pub fn weak_fraction(measure: f64) -> f64 {
    (1.0 - measure).clamp(0.0, 1.0)
}

/// Lower bound on the degree->=2 fraction: `max(0, (m - 1) / (n - 1))`,
/// zero for a single source.
pub fn strong_fraction(measure: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    ((measure - 1.0) / (n as f64 - 1.0)).clamp(0.0, 1.0)
}

/// Value `m` must exceed so that the degree->=2 fraction exceeds `lambda`:
/// `lambda * n + 1 - lambda`. At `lambda = 0.5` this is `(n + 1) / 2`.
pub fn lambda_threshold(lambda: f64, n: usize) -> f64 {
    lambda * n as f64 + 1.0 - lambda
}

/// Whether the strong-fraction bound for `measure` certifies more than
/// `lambda` of the information; equivalent to `measure > lambda_threshold`.
pub fn certifies_fraction(measure: f64, n: usize, lambda: f64) -> bool {
    measure > lambda_threshold(lambda, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(f: impl Fn(u32, u32) -> u32) -> JointDistribution {
        JointDistribution::from_weights(
            &[2, 2, 2],
            (0..4u32).map(|i| {
                let (a, b) = (i >> 1, i & 1);
                (vec![a, b, f(a, b)], 1.0)
            }),
        )
        .unwrap()
    }

    fn copy() -> JointDistribution {
        JointDistribution::from_weights(&[2, 2, 2], [(vec![0, 0, 0], 1.0), (vec![1, 1, 1], 1.0)])
            .unwrap()
    }

    #[test]
    fn sums_on_gates() {
        let xor = gate(|a, b| a ^ b);
        let and = gate(|a, b| a & b);
        assert_eq!(redundancy_sum(&xor).unwrap(), 0.0);
        assert_eq!(redundancy_sum(&copy()).unwrap(), 2.0);
        // 2 (h(1/4) - 1/2)
        assert!((redundancy_sum(&and).unwrap() - 0.622_556_248_918_265_7).abs() < 1e-12);
        assert!((vulnerability_sum(&xor).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(vulnerability_sum(&copy()).unwrap(), 0.0);
    }

    #[test]
    fn single_source_vulnerability_is_mi() {
        let d = JointDistribution::from_weights(&[2, 2], [(vec![0, 0], 1.0), (vec![1, 1], 1.0)])
            .unwrap();
        assert_eq!(vulnerability_sum(&d).unwrap(), 1.0);
        let r = analyze(&d, &InvariantConfig::default()).unwrap();
        assert_eq!(r.r_bar, Some(1.0));
        assert_eq!(r.v_bar, Some(1.0));
    }

    #[test]
    fn ratios_on_gates() {
        let xor = gate(|a, b| a ^ b);
        assert_eq!(avg_degree_redundancy(&xor, 1e-12).unwrap(), 0.0);
        assert!((avg_degree_vulnerability(&xor, 1e-12).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(avg_degree_redundancy(&copy(), 1e-12).unwrap(), 2.0);
        assert_eq!(avg_degree_vulnerability(&copy(), 1e-12).unwrap(), 0.0);
        assert!((rsi(&xor).unwrap() + 1.0).abs() < 1e-14);
        assert!((drsi(&xor).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(rsi(&copy()).unwrap(), 1.0);
        assert_eq!(drsi(&copy()).unwrap(), 1.0);
    }

    #[test]
    fn independent_target_is_ill_defined() {
        let d = gate(|_, _| 0);
        assert!(matches!(
            avg_degree_redundancy(&d, 1e-12),
            Err(Error::IllDefinedInvariant { .. })
        ));
        assert!(matches!(
            avg_degree_vulnerability(&d, 1e-12),
            Err(Error::IllDefinedInvariant { .. })
        ));
        let r = analyze(&d, &InvariantConfig::default()).unwrap();
        assert!(!r.is_well_defined());
        assert_eq!(r.rsi, 0.0);
        assert_eq!(r.drsi, 0.0);
        assert!(r.bounds.is_none());
    }

    #[test]
    fn bounds_examples() {
        let b = interpret_bounds(0.5, 0.5, 3).unwrap();
        assert_eq!(b.min_source_synergy_fraction, 0.5);
        let b = interpret_bounds(1.0, 1.0, 3).unwrap();
        assert_eq!(b.min_source_synergy_fraction, 0.0);
        assert_eq!(b.min_proper_redundancy_fraction, 0.0);
        let b = interpret_bounds(2.0, 0.0, 3).unwrap();
        assert_eq!(b.min_proper_redundancy_fraction, 0.5);
        assert_eq!(b.min_robustness_fraction, 1.0);
        assert!(b.robustness_predominant);
        assert!(!b.redundancy_predominant);
        let b = interpret_bounds(2.5, 0.0, 3).unwrap();
        assert!(b.redundancy_predominant);
    }

    #[test]
    fn bounds_reject_out_of_range() {
        assert!(matches!(
            interpret_bounds(3.5, 0.0, 3),
            Err(Error::OutOfRangeInput(_))
        ));
        assert!(matches!(
            interpret_bounds(-0.1, 0.0, 3),
            Err(Error::OutOfRangeInput(_))
        ));
        assert!(interpret_bounds(0.0, 0.0, 0).is_err());
    }

    #[test]
    fn half_threshold_is_midpoint() {
        for n in 1..=12 {
            assert_eq!(lambda_threshold(0.5, n), (n as f64 + 1.0) / 2.0);
        }
    }
}
