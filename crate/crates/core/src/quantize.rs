//! Stochastic quantization of bounded activations onto a uniform grid.
//!
//! Levels sit at `sigma_min + eps * lambda` for `lambda in 0..n_levels`, with
//! `eps = (sigma_max - sigma_min) / (n_levels - 1)`. A value at fractional
//! grid position `t` is rounded to one of its two neighbouring levels using a
//! uniform draw `u`.
//!
//! [`Rounding::Unbiased`] goes up when `u < frac(t)`, so the expected level
//! value equals the input. [`Rounding::AsPrinted`] keeps the opposite
//! orientation (`u > frac(t)` goes up), which rounds toward the farther level
//! on average; it is kept for reproducing runs that used it. In both modes a
//! draw equal to the fractional part takes the lower level.
//!
//! Draws come from a counter-based stream: cell `(row, col)` reads ChaCha8
//! stream `row` at word offset `2 * col` under the configured seed, so each
//! cell's draw is independent of evaluation order.

use std::io::{BufRead, BufReader, Read};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::SampleTable;
use crate::format::sig12;
use crate::{Error, Result};

/// Grid positions this close to an integer count as exactly on a level.
const ON_LEVEL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    Unbiased,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerConfig {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub n_levels: usize,
    pub seed: u64,
    pub rounding: Rounding,
}

impl QuantizerConfig {
    pub fn new(sigma_min: f64, sigma_max: f64, n_levels: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            sigma_min,
            sigma_max,
            n_levels,
            seed,
            rounding: Rounding::Unbiased,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rounding(mut self, rounding: Rounding) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma_min.is_finite() || !self.sigma_max.is_finite() {
            return Err(Error::InvalidConfig("bounds must be finite".into()));
        }
        if self.sigma_max <= self.sigma_min {
            return Err(Error::InvalidConfig(format!(
                "sigma_max {} must exceed sigma_min {}",
                self.sigma_max, self.sigma_min
            )));
        }
        if self.n_levels < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_levels {} < 2",
                self.n_levels
            )));
        }
        if self.step() <= 0.0 {
            return Err(Error::InvalidConfig("level spacing underflows".into()));
        }
        Ok(())
    }

    /// Level spacing `eps`.
    pub fn step(&self) -> f64 {
        (self.sigma_max - self.sigma_min) / (self.n_levels as f64 - 1.0)
    }

    /// Value of level `lambda`; the top level is exactly `sigma_max`.
    pub fn level_value(&self, lambda: usize) -> f64 {
        if lambda + 1 >= self.n_levels {
            self.sigma_max
        } else {
            self.step() * lambda as f64 + self.sigma_min
        }
    }

    pub fn levels(&self) -> Vec<f64> {
        (0..self.n_levels).map(|l| self.level_value(l)).collect()
    }
}

/// Level index for `value` given the draw `u in [0, 1]`. Out-of-range values
/// are clamped to the bounds first.
pub fn stochastic_quantize(value: f64, cfg: &QuantizerConfig, u: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidDraw(u));
    }
    if value.is_nan() {
        return Err(Error::OutOfRangeInput("NaN activation".into()));
    }
    let top = cfg.n_levels - 1;
    let clamped = value.clamp(cfg.sigma_min, cfg.sigma_max);
    let t = ((clamped - cfg.sigma_min) / cfg.step()).clamp(0.0, top as f64);
    let nearest = t.round();
    if (t - nearest).abs() < ON_LEVEL_EPS {
        return Ok(nearest as usize);
    }
    let floor = t.floor();
    let frac = t - floor;
    let up = match cfg.rounding {
        Rounding::Unbiased => u < frac,
        Rounding::AsPrinted => u > frac,
    };
    let lambda = if up { floor as usize + 1 } else { floor as usize };
    Ok(lambda.min(top))
}

/// Uniform draw in `[0, 1)` for one matrix cell.
pub fn cell_draw(seed: u64, row: usize, col: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng.set_word_pos(2 * col as u128);
    // 53 random mantissa bits
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Dense row-major matrix of activations.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Reads the `rows cols` header followed by whitespace-separated
    /// row-major values.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let reader = BufReader::new(reader);
        let mut shape: Option<(usize, usize)> = None;
        let mut data = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i as u64 + 1;
            let err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            if shape.is_none() {
                if line.trim().is_empty() {
                    continue;
                }
                let dims: Vec<&str> = line.split_whitespace().collect();
                let [r, c] = dims.as_slice() else {
                    return Err(err("header must be `rows cols`".into()));
                };
                let r = r.parse().map_err(|_| err(format!("bad row count `{r}`")))?;
                let c = c.parse().map_err(|_| err(format!("bad column count `{c}`")))?;
                shape = Some((r, c));
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| err(format!("bad number `{tok}`")))?;
                if !v.is_finite() {
                    return Err(err(format!("non-finite value `{tok}`")));
                }
                data.push(v);
            }
        }
        let (rows, cols) = shape.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing `rows cols` header".into(),
        })?;
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }
}

/// Level indices for every cell, row-major.
pub fn quantize_levels(matrix: &Matrix, cfg: &QuantizerConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    (0..matrix.rows * matrix.cols)
        .into_par_iter()
        .map(|k| {
            let (row, col) = (k / matrix.cols, k % matrix.cols);
            stochastic_quantize(matrix.data[k], cfg, cell_draw(cfg.seed, row, col))
        })
        .collect()
}

/// Quantizes every cell and attaches the target labels. Columns are named
/// `x1..xm` plus `y`; cells hold level values to 12 significant digits.
pub fn quantize_table(
    matrix: &Matrix,
    cfg: &QuantizerConfig,
    targets: &[String],
) -> Result<SampleTable> {
    if targets.len() != matrix.rows {
        return Err(Error::ShapeMismatch(format!(
            "{} target labels for {} rows",
            targets.len(),
            matrix.rows
        )));
    }
    let levels = quantize_levels(matrix, cfg)?;
    let labels: Vec<String> = cfg.levels().into_iter().map(sig12).collect();
    let mut names: Vec<String> = (1..=matrix.cols).map(|c| format!("x{c}")).collect();
    names.push("y".to_string());
    let rows = levels
        .chunks_exact(matrix.cols)
        .zip(targets)
        .map(|(row, y)| {
            row.iter()
                .map(|&l| labels[l].clone())
                .chain(std::iter::once(y.clone()))
                .collect()
        })
        .collect();
    SampleTable::with_target_index(names, rows, matrix.cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tanh8() -> QuantizerConfig {
        QuantizerConfig::new(-1.0, 1.0, 8, 42).unwrap()
    }

    #[test]
    fn step_for_eight_levels() {
        assert!((tanh8().step() - 2.0 / 7.0).abs() < 1e-15);
        let levels = tanh8().levels();
        assert_eq!(levels.first(), Some(&-1.0));
        assert_eq!(levels.last(), Some(&1.0));
    }

    #[test]
    fn config_validation() {
        assert!(QuantizerConfig::new(1.0, 1.0, 8, 0).is_err());
        assert!(QuantizerConfig::new(-1.0, 1.0, 1, 0).is_err());
        assert!(QuantizerConfig::new(f64::NAN, 1.0, 4, 0).is_err());
    }

    #[test]
    fn on_level_values_ignore_the_draw() {
        let cfg = tanh8();
        for lambda in 0..8 {
            let v = cfg.level_value(lambda);
            for u in [0.0, 0.3, 0.999, 1.0] {
                assert_eq!(stochastic_quantize(v, &cfg, u).unwrap(), lambda);
                let printed = cfg.with_rounding(Rounding::AsPrinted);
                assert_eq!(stochastic_quantize(v, &printed, u).unwrap(), lambda);
            }
        }
    }

    #[test]
    fn orientation_and_tie() {
        let cfg = QuantizerConfig::new(0.0, 4.0, 5, 0).unwrap();
        // t = 1.25, frac = 0.25
        assert_eq!(stochastic_quantize(1.25, &cfg, 0.1).unwrap(), 2);
        assert_eq!(stochastic_quantize(1.25, &cfg, 0.9).unwrap(), 1);
        assert_eq!(stochastic_quantize(1.25, &cfg, 0.25).unwrap(), 1);
        let printed = cfg.with_rounding(Rounding::AsPrinted);
        assert_eq!(stochastic_quantize(1.25, &printed, 0.1).unwrap(), 1);
        assert_eq!(stochastic_quantize(1.25, &printed, 0.9).unwrap(), 2);
        assert_eq!(stochastic_quantize(1.25, &printed, 0.25).unwrap(), 1);
    }

    #[test]
    fn clamps_and_rejects_bad_draws() {
        let cfg = tanh8();
        assert_eq!(stochastic_quantize(5.0, &cfg, 0.5).unwrap(), 7);
        assert_eq!(stochastic_quantize(-5.0, &cfg, 0.5).unwrap(), 0);
        assert!(matches!(
            stochastic_quantize(0.0, &cfg, 1.5),
            Err(Error::InvalidDraw(_))
        ));
        assert!(stochastic_quantize(f64::NAN, &cfg, 0.5).is_err());
    }

    #[test]
    fn two_level_passthrough() {
        let cfg = QuantizerConfig::new(-1.0, 1.0, 2, 9).unwrap();
        let m = Matrix::new(2, 2, vec![-1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(quantize_levels(&m, &cfg).unwrap(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn constant_matrix_single_symbol() {
        let cfg = QuantizerConfig::new(0.0, 1.0, 2, 1).unwrap();
        let m = Matrix::new(3, 2, vec![1.0; 6]).unwrap();
        let t = quantize_table(&m, &cfg, &["a".into(), "b".into(), "a".into()]).unwrap();
        assert_eq!(t.column_names(), &["x1", "x2", "y"]);
        assert!(t.rows().iter().all(|r| r[0] == "1" && r[1] == "1"));
    }

    #[test]
    fn label_count_mismatch() {
        let m = Matrix::new(2, 1, vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            quantize_table(&m, &tanh8(), &["a".into()]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn matrix_parsing() {
        let m = Matrix::from_reader("2 3\n0.1 0.2 0.3\n-0.5 0 1\n".as_bytes()).unwrap();
        assert_eq!(m.get(1, 0), -0.5);
        assert!(matches!(
            Matrix::from_reader("2 2\n0.1 x\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Matrix::from_reader("2 2\n0.1 0.2 0.3\n".as_bytes()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn draws_are_cell_local() {
        let a = cell_draw(7, 3, 4);
        assert_eq!(a, cell_draw(7, 3, 4));
        assert_ne!(a, cell_draw(7, 4, 3));
        assert_ne!(a, cell_draw(8, 3, 4));
        assert!((0.0..1.0).contains(&a));
    }
}
