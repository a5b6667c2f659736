//! Descriptive statistics and Spearman rank correlation with two-tailed
//! significance flags.

use std::fmt::Write as _;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::layering::LayerAssignment;
use crate::model::{Metric, MetricsTable};

/// Label of the D-layer row/column in every stats table.
pub const DLAYER: &str = "D-layer";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptiveStats {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std_dev: f64,
}

pub fn describe(values: &[f64]) -> Result<DescriptiveStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (values.iter().sum::<f64>() / n as f64).clamp(min, max);
    let std_dev = if n > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(DescriptiveStats { n, min, max, mean, std_dev })
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: x.len() });
    }
    if is_constant(x) || is_constant(y) {
        return Err(Error::ConstantVector);
    }
    Ok(pearson(&average_ranks(x), &average_ranks(y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SignificanceFlag {
    None,
    /// p < 0.05
    Five,
    /// p < 0.01
    One,
}

impl SignificanceFlag {
    pub fn from_p(p: f64) -> Self {
        if p < 0.01 {
            SignificanceFlag::One
        } else if p < 0.05 {
            SignificanceFlag::Five
        } else {
            SignificanceFlag::None
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            SignificanceFlag::None => "",
            SignificanceFlag::Five => "*",
            SignificanceFlag::One => "**",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEntry {
    pub rho: f64,
    pub n: usize,
    pub p_value: f64,
    pub flag: SignificanceFlag,
}

/// Two-tailed p-value of `rho` from Student's t with `n - 2` degrees of freedom.
pub fn significance(rho: f64, n: usize) -> Result<CorrelationEntry> {
    if n < 4 {
        return Err(Error::TooFewSamples { needed: 4, got: n });
    }
    if !(-1.0..=1.0).contains(&rho) || rho.is_nan() {
        return Err(Error::InvalidParams(format!("correlation {rho} outside [-1, 1]")));
    }
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 2 is a valid t distribution");
        (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
    };
    Ok(CorrelationEntry {
        rho,
        n,
        p_value,
        flag: SignificanceFlag::from_p(p_value),
    })
}

/// Upper-triangular Spearman matrix over D-layer and the eight metrics.
/// `None` cells are undefined because a column is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub n: usize,
    cells: Vec<Option<CorrelationEntry>>,
}

impl CorrelationMatrix {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    /// Symmetric lookup.
    pub fn get(&self, i: usize, j: usize) -> Option<&CorrelationEntry> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.cells[a * self.size() + b].as_ref()
    }

    pub fn dlayer_entry(&self, metric: Metric) -> Option<&CorrelationEntry> {
        let j = self.labels.iter().position(|l| l == metric.name())?;
        self.get(0, j)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,column,rho,n,p_value,flag\n");
        for i in 0..self.size() {
            for j in i + 1..self.size() {
                match self.get(i, j) {
                    Some(e) => {
                        let _ = writeln!(
                            out,
                            "{},{},{:.6},{},{:.6e},{}",
                            self.labels[i],
                            self.labels[j],
                            e.rho,
                            e.n,
                            e.p_value,
                            e.flag.stars()
                        );
                    }
                    None => {
                        let _ = writeln!(out, "{},{},,{},,undefined", self.labels[i], self.labels[j], self.n);
                    }
                }
            }
        }
        out
    }

    /// Lower triangle blank, diagonal `1.000`, stars appended to rho.
    pub fn to_markdown(&self, style: DecimalStyle) -> String {
        let mut out = String::from("| |");
        for label in &self.labels {
            let _ = write!(out, " {label} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.size()));
        out.push('\n');
        for i in 0..self.size() {
            let _ = write!(out, "| {} |", self.labels[i]);
            for j in 0..self.size() {
                let cell = if j < i {
                    String::new()
                } else if j == i {
                    style.format(1.0)
                } else {
                    match self.get(i, j) {
                        Some(e) => format!("{}{}", style.format(e.rho), e.flag.stars()),
                        None => "n/a".to_string(),
                    }
                };
                let _ = write!(out, " {cell} |");
            }
            out.push('\n');
        }
        out
    }
}

/// Decimal rendering: `Dot` gives `0.341`, `Comma` mimics SPSS (`,341`, `-,113`, `1,000`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecimalStyle {
    #[default]
    Dot,
    Comma,
}

impl DecimalStyle {
    pub fn format(self, value: f64) -> String {
        let text = format!("{value:.3}");
        match self {
            DecimalStyle::Dot => text,
            DecimalStyle::Comma => {
                let text = text.replace('.', ",");
                if let Some(rest) = text.strip_prefix("-0,") {
                    format!("-,{rest}")
                } else if let Some(rest) = text.strip_prefix("0,") {
                    format!(",{rest}")
                } else {
                    text
                }
            }
        }
    }
}

/// Columns of the correlation matrix: D-layer followed by the metrics.
pub fn stat_columns(table: &MetricsTable, dlayers: &LayerAssignment) -> Result<Vec<(String, Vec<f64>)>> {
    let mut dl = Vec::with_capacity(table.len());
    for id in table.keys() {
        let d = dlayers
            .dlayer_of
            .get(id)
            .ok_or_else(|| Error::MissingLabel(id.to_string()))?;
        dl.push(f64::from(*d));
    }
    if dlayers.dlayer_of.len() != table.len() {
        let extra = dlayers.dlayer_of.keys().find(|id| !table.contains_key(*id));
        if let Some(id) = extra {
            return Err(Error::KeyMismatch(id.to_string()));
        }
    }
    let mut columns = vec![(DLAYER.to_string(), dl)];
    for metric in Metric::ALL {
        columns.push((
            metric.name().to_string(),
            table.values().map(|v| v.get(metric) as f64).collect(),
        ));
    }
    Ok(columns)
}

pub fn correlation_matrix(table: &MetricsTable, dlayers: &LayerAssignment) -> Result<CorrelationMatrix> {
    let columns = stat_columns(table, dlayers)?;
    let n = table.len();
    if n < 4 {
        return Err(Error::TooFewSamples { needed: 4, got: n });
    }
    let k = columns.len();
    let mut cells = vec![None; k * k];
    for i in 0..k {
        for j in i..k {
            let entry = if i == j {
                if is_constant(&columns[i].1) {
                    None
                } else {
                    Some(CorrelationEntry { rho: 1.0, n, p_value: 0.0, flag: SignificanceFlag::None })
                }
            } else {
                match spearman(&columns[i].1, &columns[j].1) {
                    Ok(rho) => Some(significance(rho, n)?),
                    Err(Error::ConstantVector) => None,
                    Err(e) => return Err(e),
                }
            };
            cells[i * k + j] = entry;
        }
    }
    Ok(CorrelationMatrix {
        labels: columns.into_iter().map(|(l, _)| l).collect(),
        n,
        cells,
    })
}

/// Metrics whose correlation with D-layer has `p < alpha`, in listing order.
/// Undefined (constant) columns are never selected.
pub fn select_correlated(matrix: &CorrelationMatrix, alpha: f64) -> Vec<Metric> {
    Metric::ALL
        .into_iter()
        .filter(|&m| matrix.dlayer_entry(m).is_some_and(|e| e.p_value < alpha))
        .collect()
}

/// Every metric with a defined D-layer correlation, regardless of p.
pub fn select_defined(matrix: &CorrelationMatrix) -> Vec<Metric> {
    Metric::ALL
        .into_iter()
        .filter(|&m| matrix.dlayer_entry(m).is_some())
        .collect()
}
