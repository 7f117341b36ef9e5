//! Discrete joint distributions and the sample tables they are built from.
//!
//! A [`SampleTable`] is treated as a complete population: every row carries
//! equal weight and [`JointDistribution::from_samples`] turns row counts into
//! an exact empirical pmf. Symbols are interned to dense `u32` ids once at
//! ingestion; the original labels stay on the distribution for reporting.
//!
//! Variables are indexed `0..n_sources` for the sources and `n_sources` for
//! the target, which is always the last variable regardless of where the
//! target column sat in the input.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::{Error, Result};

/// Rows of string symbols with one designated target column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleTable {
    column_names: Vec<String>,
    rows: Vec<Vec<String>>,
    target: usize,
}

impl SampleTable {
    /// Builds a table, checking shape and locating `target` by name.
    pub fn new(column_names: Vec<String>, rows: Vec<Vec<String>>, target: &str) -> Result<Self> {
        let target = column_names
            .iter()
            .position(|c| c == target)
            .ok_or_else(|| Error::MissingTargetColumn(target.to_string()))?;
        Self::with_target_index(column_names, rows, target)
    }

    pub fn with_target_index(
        column_names: Vec<String>,
        rows: Vec<Vec<String>>,
        target: usize,
    ) -> Result<Self> {
        if column_names.len() < 2 {
            return Err(Error::TooFewColumns(column_names.len()));
        }
        if target >= column_names.len() {
            return Err(Error::MissingTargetColumn(format!("#{target}")));
        }
        if rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != column_names.len() {
                return Err(Error::RaggedRow {
                    // header is line 1
                    line: i as u64 + 2,
                    expected: column_names.len(),
                    found: row.len(),
                });
            }
        }
        Ok(Self {
            column_names,
            rows,
            target,
        })
    }

    /// Reads a header-first, comma-delimited table. Quoting is not
    /// interpreted; fields are compared as exact strings. `target` defaults to
    /// the last column.
    pub fn from_csv_reader<R: Read>(reader: R, target: Option<&str>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(b',')
            .quoting(false)
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_error(e, 1))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| csv_error(e, rows.len() as u64 + 2))?;
            let line = record
                .position()
                .map(|p| p.line())
                .unwrap_or(rows.len() as u64 + 2);
            // a trailing blank line shows up as a single empty field
            if record.len() == 1 && record.get(0) == Some("") {
                continue;
            }
            if record.len() != header.len() {
                return Err(Error::RaggedRow {
                    line,
                    expected: header.len(),
                    found: record.len(),
                });
            }
            rows.push(record.iter().map(str::to_string).collect());
        }
        match target {
            Some(name) => Self::new(header, rows, name),
            None => {
                let last = header.len().saturating_sub(1);
                Self::with_target_index(header, rows, last)
            }
        }
    }

    pub fn from_csv_path(path: impl AsRef<Path>, target: Option<&str>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file), target)
    }

    /// Writes the table in the same format [`Self::from_csv_reader`] accepts.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::Never)
            .from_writer(writer);
        let io_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.column_names).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(io_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Sparse exact pmf over `(X1, .., Xn, Y)`.
///
/// Outcomes are stored flat, sorted lexicographically by symbol id, with only
/// strictly positive probabilities kept.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n_sources: usize,
    names: Vec<String>,
    alphabets: Vec<Vec<String>>,
    outcomes: Vec<u32>,
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Empirical pmf of a sample table: `p(outcome) = count / rows`.
    ///
    /// Alphabets list each column's distinct symbols in first-appearance
    /// order, and the target column is moved to the last position.
    pub fn from_samples(table: &SampleTable) -> Result<Self> {
        if table.rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        let width = table.column_names.len();
        // source columns in input order, then the target
        let order: Vec<usize> = (0..width)
            .filter(|&c| c != table.target)
            .chain(std::iter::once(table.target))
            .collect();

        let mut interners: Vec<HashMap<&str, u32>> = vec![HashMap::new(); width];
        let mut alphabets: Vec<Vec<String>> = vec![Vec::new(); width];
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut key = Vec::with_capacity(width);
        for row in &table.rows {
            key.clear();
            for (slot, &col) in order.iter().enumerate() {
                let sym = row[col].as_str();
                let next = alphabets[slot].len() as u32;
                let id = *interners[slot].entry(sym).or_insert_with(|| {
                    alphabets[slot].push(sym.to_string());
                    next
                });
                key.push(id);
            }
            *counts.entry(key.clone()).or_insert(0) += 1;
        }

        let total = table.rows.len() as f64;
        let mut entries: Vec<(Vec<u32>, u64)> = counts.into_iter().collect();
        entries.sort_unstable();
        let mut outcomes = Vec::with_capacity(entries.len() * width);
        let mut probs = Vec::with_capacity(entries.len());
        for (k, c) in entries {
            outcomes.extend_from_slice(&k);
            probs.push(c as f64 / total);
        }
        let names = order
            .iter()
            .map(|&c| table.column_names[c].clone())
            .collect();
        Ok(Self {
            n_sources: width - 1,
            names,
            alphabets,
            outcomes,
            probs,
        })
    }

    /// Builds a distribution from non-negative weights over integer outcomes.
    ///
    /// `alphabet_sizes` has one entry per variable, target last. Repeated
    /// outcomes are merged, zero weights dropped and the rest normalized.
    /// Symbol labels are the decimal ids.
    pub fn from_weights<I>(alphabet_sizes: &[usize], entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        if alphabet_sizes.len() < 2 {
            return Err(Error::TooFewColumns(alphabet_sizes.len()));
        }
        let width = alphabet_sizes.len();
        let mut merged: HashMap<Vec<u32>, f64> = HashMap::new();
        for (outcome, w) in entries {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight(w));
            }
            if outcome.len() != width {
                return Err(Error::ShapeMismatch(format!(
                    "outcome has {} symbols, expected {width}",
                    outcome.len()
                )));
            }
            for (var, (&s, &size)) in outcome.iter().zip(alphabet_sizes).enumerate() {
                if s as usize >= size {
                    return Err(Error::SymbolOutOfRange {
                        var,
                        symbol: s,
                        size,
                    });
                }
            }
            if w > 0.0 {
                *merged.entry(outcome).or_insert(0.0) += w;
            }
        }
        let mut entries: Vec<(Vec<u32>, f64)> = merged.into_iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let total = neumaier_sum(entries.iter().map(|e| e.1));
        if entries.is_empty() || total <= 0.0 {
            return Err(Error::EmptyDistribution);
        }
        let mut outcomes = Vec::with_capacity(entries.len() * width);
        let mut probs = Vec::with_capacity(entries.len());
        for (k, w) in entries {
            outcomes.extend_from_slice(&k);
            probs.push(w / total);
        }
        let names = (0..width)
            .map(|v| {
                if v + 1 == width {
                    "y".to_string()
                } else {
                    format!("x{}", v + 1)
                }
            })
            .collect();
        let alphabets = alphabet_sizes
            .iter()
            .map(|&k| (0..k).map(|s| s.to_string()).collect())
            .collect();
        Ok(Self {
            n_sources: width - 1,
            names,
            alphabets,
            outcomes,
            probs,
        })
    }

    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    /// Total variable count, sources plus target.
    pub fn n_vars(&self) -> usize {
        self.n_sources + 1
    }

    pub fn target_index(&self) -> usize {
        self.n_sources
    }

    /// Variable names, target last.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn alphabet_sizes(&self) -> Vec<usize> {
        self.alphabets.iter().map(Vec::len).collect()
    }

    /// Number of outcomes with nonzero mass.
    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// Outcomes in lexicographic order with their probabilities.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.outcomes
            .chunks_exact(self.n_vars())
            .zip(self.probs.iter().copied())
    }

    /// Probability of a full outcome tuple, zero if absent.
    pub fn prob(&self, outcome: &[u32]) -> f64 {
        if outcome.len() != self.n_vars() {
            return 0.0;
        }
        let width = self.n_vars();
        let n = self.probs.len();
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let row = &self.outcomes[mid * width..(mid + 1) * width];
            match row.cmp(outcome) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return self.probs[mid],
            }
        }
        0.0
    }

    /// Sum of stored probabilities (compensated).
    pub fn total_mass(&self) -> f64 {
        neumaier_sum(self.probs.iter().copied())
    }

    /// Marginal over `vars`, keeping them in ascending index order.
    ///
    /// The last kept variable occupies the target slot of the result, so a
    /// marginal that keeps the target keeps its role.
    pub fn marginal(&self, vars: &[usize]) -> Result<Self> {
        let vars = self.normalize_vars(vars)?;
        let projected = self.project(&vars);
        let width = vars.len();
        let mut outcomes = Vec::with_capacity(projected.len() * width);
        let mut probs = Vec::with_capacity(projected.len());
        for (k, p) in projected {
            outcomes.extend_from_slice(&k);
            probs.push(p);
        }
        Ok(Self {
            n_sources: width - 1,
            names: vars.iter().map(|&v| self.names[v].clone()).collect(),
            alphabets: vars.iter().map(|&v| self.alphabets[v].clone()).collect(),
            outcomes,
            probs,
        })
    }

    /// Probabilities of the marginal over `vars` in lexicographic outcome
    /// order. `vars` must already be validated, sorted and deduplicated.
    pub(crate) fn marginal_probs(&self, vars: &[usize]) -> Vec<f64> {
        if vars.len() == self.n_vars() {
            return self.probs.clone();
        }
        let sizes: Vec<u128> = vars
            .iter()
            .map(|&v| self.alphabets[v].len().max(1) as u128)
            .collect();
        let fits = sizes
            .iter()
            .try_fold(1u128, |acc, &s| acc.checked_mul(s))
            .is_some();
        if fits {
            let mut acc: HashMap<u128, f64> = HashMap::with_capacity(self.probs.len());
            for (row, p) in self.iter() {
                let mut key = 0u128;
                for (&v, &s) in vars.iter().zip(&sizes) {
                    key = key * s + row[v] as u128;
                }
                *acc.entry(key).or_insert(0.0) += p;
            }
            let mut entries: Vec<(u128, f64)> = acc.into_iter().collect();
            entries.sort_unstable_by_key(|e| e.0);
            entries.into_iter().map(|e| e.1).collect()
        } else {
            self.project(vars).into_iter().map(|e| e.1).collect()
        }
    }

    fn project(&self, vars: &[usize]) -> Vec<(Vec<u32>, f64)> {
        let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
        let mut key = Vec::with_capacity(vars.len());
        for (row, p) in self.iter() {
            key.clear();
            key.extend(vars.iter().map(|&v| row[v]));
            match acc.get_mut(key.as_slice()) {
                Some(slot) => *slot += p,
                None => {
                    acc.insert(key.clone(), p);
                }
            }
        }
        let mut entries: Vec<(Vec<u32>, f64)> = acc.into_iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        entries
    }

    /// Validates variable indices and returns them sorted and deduplicated.
    pub(crate) fn normalize_vars(&self, vars: &[usize]) -> Result<Vec<usize>> {
        if vars.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        let n_vars = self.n_vars();
        if let Some(&index) = vars.iter().find(|&&v| v >= n_vars) {
            return Err(Error::IndexOutOfRange { index, n_vars });
        }
        let mut v = vars.to_vec();
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }
}

/// Compensated summation; keeps entropy sums stable over large supports.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(header: &[&str], rows: &[&[&str]]) -> SampleTable {
        SampleTable::with_target_index(
            header.iter().map(|s| s.to_string()).collect(),
            rows.iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect(),
            header.len() - 1,
        )
        .unwrap()
    }

    #[test]
    fn xor_rows_give_uniform_pmf() {
        let t = table(
            &["a", "b", "y"],
            &[&["0", "0", "0"], &["0", "1", "1"], &["1", "0", "1"], &["1", "1", "0"]],
        );
        let d = JointDistribution::from_samples(&t).unwrap();
        assert_eq!(d.support_size(), 4);
        for (_, p) in d.iter() {
            assert_eq!(p, 0.25);
        }
    }

    #[test]
    fn identical_rows_collapse() {
        let t = table(&["a", "b", "c"], &[&["a", "b", "c"], &["a", "b", "c"]]);
        let d = JointDistribution::from_samples(&t).unwrap();
        assert_eq!(d.support_size(), 1);
        assert_eq!(d.prob(&[0, 0, 0]), 1.0);
    }

    #[test]
    fn counting() {
        let t = table(&["x", "y"], &[&["0", "0"], &["0", "0"], &["0", "1"]]);
        let d = JointDistribution::from_samples(&t).unwrap();
        assert_eq!(d.prob(&[0, 0]), 2.0 / 3.0);
        assert_eq!(d.prob(&[0, 1]), 1.0 / 3.0);
    }

    #[test]
    fn target_moves_last() {
        let t = SampleTable::new(
            vec!["y".into(), "x1".into(), "x2".into()],
            vec![vec!["t".into(), "a".into(), "b".into()]],
            "y",
        )
        .unwrap();
        let d = JointDistribution::from_samples(&t).unwrap();
        assert_eq!(d.names(), &["x1", "x2", "y"]);
        assert_eq!(d.alphabets()[2], vec!["t".to_string()]);
    }

    #[test]
    fn alphabets_in_first_appearance_order() {
        let t = table(&["x", "y"], &[&["b", "0"], &["a", "0"], &["b", "1"]]);
        let d = JointDistribution::from_samples(&t).unwrap();
        assert_eq!(d.alphabets()[0], vec!["b".to_string(), "a".to_string()]);
    }

    #[test]
    fn table_errors() {
        assert!(matches!(
            SampleTable::with_target_index(vec!["x".into(), "y".into()], vec![], 1),
            Err(Error::EmptyTable)
        ));
        assert!(matches!(
            SampleTable::new(vec!["x".into(), "y".into()], vec![vec!["0".into(), "1".into()]], "z"),
            Err(Error::MissingTargetColumn(_))
        ));
        assert!(matches!(
            SampleTable::with_target_index(vec!["y".into()], vec![vec!["0".into()]], 0),
            Err(Error::TooFewColumns(1))
        ));
    }

    #[test]
    fn csv_ragged_row_reports_line() {
        let data = "a,b,y\n0,0,0\n0,1\n";
        match SampleTable::from_csv_reader(data.as_bytes(), None) {
            Err(Error::RaggedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let data = "a,b,label\n0,x,1\n1,y,0\n";
        let t = SampleTable::from_csv_reader(data.as_bytes(), Some("label")).unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), data);
    }

    #[test]
    fn marginal_errors() {
        let d = JointDistribution::from_weights(&[2, 2], [(vec![0, 0], 1.0)]).unwrap();
        assert!(matches!(d.marginal(&[]), Err(Error::EmptyVariableSet)));
        assert!(matches!(
            d.marginal(&[2]),
            Err(Error::IndexOutOfRange { index: 2, n_vars: 2 })
        ));
    }

    #[test]
    fn and_gate_target_marginal() {
        let d = JointDistribution::from_weights(
            &[2, 2, 2],
            (0..4u32).map(|i| (vec![i >> 1, i & 1, (i >> 1) & i & 1], 1.0)),
        )
        .unwrap();
        let m = d.marginal(&[2]).unwrap();
        assert_eq!(m.prob(&[0]), 0.75);
        assert_eq!(m.prob(&[1]), 0.25);
        assert_eq!(d.marginal(&[0, 1, 2]).unwrap(), d);
    }

    #[test]
    fn weights_validation() {
        assert!(matches!(
            JointDistribution::from_weights(&[2, 2], [(vec![0, 0], -1.0)]),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            JointDistribution::from_weights(&[2, 2], [(vec![0, 2], 1.0)]),
            Err(Error::SymbolOutOfRange { var: 1, .. })
        ));
        assert!(matches!(
            JointDistribution::from_weights(&[2, 2], [(vec![0, 0], 0.0)]),
            Err(Error::EmptyDistribution)
        ));
    }
}
