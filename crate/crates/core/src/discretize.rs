//! Supervised entropy/MDL discretization of metric columns and the nominal
//! dataset handed to the rule learner.
//!
//! Cuts are recursive binary splits at boundary points, kept only when the
//! information gain beats the minimum description length threshold. Bin `k`
//! covers `(cut[k-1], cut[k]]`, labelled from 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ClassId, Metric, MetricsTable, TentativeLayer};

/// Gains within this distance are treated as ties.
pub(crate) const GAIN_EPS: f64 = 1e-12;

/// Shannon entropy in bits of a label multiset; 0 when empty.
pub fn entropy(labels: &[u32]) -> f64 {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    entropy_of_counts(counts.values().copied(), labels.len())
}

fn entropy_of_counts(counts: impl IntoIterator<Item = usize>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Inputs of the MDL acceptance test for one binary split of `S` into `S1`, `S2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSummary {
    pub gain: f64,
    pub n: usize,
    /// Distinct classes in S, S1 and S2.
    pub k: usize,
    pub k1: usize,
    pub k2: usize,
    pub ent: f64,
    pub ent1: f64,
    pub ent2: f64,
}

/// Accept iff `gain > log2(n-1)/n + (log2(3^k - 2) - (k·ent - k1·ent1 - k2·ent2)) / n`.
pub fn mdlp_accept(s: &SplitSummary) -> bool {
    if s.n < 2 {
        return false;
    }
    let n = s.n as f64;
    let k = s.k as f64;
    let delta = (3f64.powf(k) - 2.0).log2() - (k * s.ent - s.k1 as f64 * s.ent1 - s.k2 as f64 * s.ent2);
    s.gain > (n - 1.0).log2() / n + delta / n
}

/// Sorted `(value, class index)` pairs with classes compacted to `0..k`.
struct Sorted {
    values: Vec<f64>,
    classes: Vec<usize>,
    k: usize,
}

impl Sorted {
    fn new(values: &[f64], labels: &[u32]) -> Self {
        let distinct: BTreeSet<u32> = labels.iter().copied().collect();
        let index: BTreeMap<u32, usize> = distinct.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut pairs: Vec<(f64, usize)> = values.iter().zip(labels).map(|(&v, l)| (v, index[l])).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Sorted {
            values: pairs.iter().map(|p| p.0).collect(),
            classes: pairs.iter().map(|p| p.1).collect(),
            k: distinct.len(),
        }
    }

    fn counts(&self, lo: usize, hi: usize) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &cls in &self.classes[lo..hi] {
            c[cls] += 1;
        }
        c
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    /// First index of the right half.
    split: usize,
    cut: f64,
    gain: f64,
}

/// Best boundary cut inside `lo..hi` of the sorted data.
fn best_cut_in(data: &Sorted, lo: usize, hi: usize) -> Option<Candidate> {
    let total = data.counts(lo, hi);
    let n = hi - lo;
    let ent = entropy_of_counts(total.iter().copied(), n);
    let mut left = vec![0usize; data.k];
    let mut best: Option<Candidate> = None;

    // Walk groups of equal values; between two groups a cut is a boundary
    // point unless both groups are pure in the same class.
    let mut start = lo;
    let mut prev_group: Option<(usize, usize)> = None;
    while start < hi {
        let mut end = start + 1;
        while end < hi && data.values[end] == data.values[start] {
            end += 1;
        }
        if let Some((ps, pe)) = prev_group {
            let mut labels = data.classes[ps..end].iter();
            let first = labels.next().copied();
            let boundary = labels.any(|&c| Some(c) != first);
            if boundary {
                let nl = start - lo;
                let nr = n - nl;
                let right = total.iter().zip(&left).map(|(t, l)| t - l);
                let gain = ent
                    - (nl as f64 / n as f64) * entropy_of_counts(left.iter().copied(), nl)
                    - (nr as f64 / n as f64) * entropy_of_counts(right, nr);
                if best.is_none_or(|b| gain > b.gain + GAIN_EPS) {
                    best = Some(Candidate {
                        split: start,
                        cut: (data.values[pe - 1] + data.values[start]) / 2.0,
                        gain,
                    });
                }
            }
        }
        for &c in &data.classes[start..end] {
            left[c] += 1;
        }
        prev_group = Some((start, end));
        start = end;
    }
    best
}

/// Highest-gain boundary cut and its information gain; ties go to the smaller cut.
pub fn best_cut(values: &[f64], labels: &[u32]) -> Option<(f64, f64)> {
    if values.len() != labels.len() || values.len() < 2 {
        return None;
    }
    let data = Sorted::new(values, labels);
    best_cut_in(&data, 0, data.values.len()).map(|c| (c.cut, c.gain))
}

fn summarize(data: &Sorted, lo: usize, split: usize, hi: usize, gain: f64) -> SplitSummary {
    let distinct = |a, b| data.counts(a, b).iter().filter(|&&c| c > 0).count();
    let ent = |a: usize, b: usize| entropy_of_counts(data.counts(a, b), b - a);
    SplitSummary {
        gain,
        n: hi - lo,
        k: distinct(lo, hi),
        k1: distinct(lo, split),
        k2: distinct(split, hi),
        ent: ent(lo, hi),
        ent1: ent(lo, split),
        ent2: ent(split, hi),
    }
}

fn split_recursive(data: &Sorted, lo: usize, hi: usize, cuts: &mut Vec<f64>) {
    if hi - lo < 2 {
        return;
    }
    let Some(c) = best_cut_in(data, lo, hi) else {
        return;
    };
    if !mdlp_accept(&summarize(data, lo, c.split, hi, c.gain)) {
        return;
    }
    split_recursive(data, lo, c.split, cuts);
    cuts.push(c.cut);
    split_recursive(data, c.split, hi, cuts);
}

/// Recursive MDL-accepted cuts, ascending. Empty when nothing is worth splitting.
pub fn mdlp_discretize(values: &[f64], labels: &[u32]) -> Vec<f64> {
    if values.len() != labels.len() || values.len() < 2 {
        return Vec::new();
    }
    let data = Sorted::new(values, labels);
    let mut cuts = Vec::new();
    split_recursive(&data, 0, data.values.len(), &mut cuts);
    cuts
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeBins {
    pub name: String,
    pub cuts: Vec<f64>,
    /// Observed training range, used to render the outer bins.
    pub min: f64,
    pub max: f64,
}

impl AttributeBins {
    pub fn is_degenerate(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn bin_count(&self) -> u32 {
        self.cuts.len() as u32 + 1
    }

    /// 1-based bin label; intervals are right-closed.
    pub fn label_of(&self, value: f64) -> u32 {
        1 + self.cuts.iter().filter(|&&c| c < value).count() as u32
    }

    /// Inclusive integer ranges per bin, e.g. `0`, `1-3`, `43-450`.
    pub fn integer_ranges(&self) -> Vec<String> {
        let k = self.cuts.len();
        (0..=k)
            .map(|i| {
                let lo = if i == 0 { self.min } else { self.cuts[i - 1].floor() + 1.0 };
                let hi = if i == k { self.max } else { self.cuts[i].floor() };
                if lo == hi {
                    format!("{lo}")
                } else {
                    format!("{lo}-{hi}")
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BinningScheme {
    pub attributes: Vec<AttributeBins>,
}

impl BinningScheme {
    pub fn get(&self, name: &str) -> Option<&AttributeBins> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn bin_of(&self, name: &str, value: f64) -> Result<u32> {
        self.get(name)
            .map(|a| a.label_of(value))
            .ok_or_else(|| Error::MissingAttribute(name.to_string()))
    }

    pub fn usable(&self) -> impl Iterator<Item = &AttributeBins> {
        self.attributes.iter().filter(|a| !a.is_degenerate())
    }
}

/// Discretizes each metric in `metrics` against the per-class supervising labels.
pub fn build_scheme(table: &MetricsTable, labels: &BTreeMap<ClassId, u32>, metrics: &[Metric]) -> Result<BinningScheme> {
    let mut supervision = Vec::with_capacity(table.len());
    for id in table.keys() {
        supervision.push(*labels.get(id).ok_or_else(|| Error::MissingLabel(id.to_string()))?);
    }
    let mut scheme = BinningScheme::default();
    for &metric in metrics {
        let values: Vec<f64> = table.values().map(|v| v.get(metric) as f64).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        scheme.attributes.push(AttributeBins {
            name: metric.name().to_string(),
            cuts: mdlp_discretize(&values, &supervision),
            min,
            max,
        });
    }
    Ok(scheme)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NominalRow {
    pub id: ClassId,
    pub values: Vec<u32>,
    pub label: TentativeLayer,
}

/// Binned attributes per class plus the tentative layer label. Rows are kept
/// sorted by class id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NominalDataset {
    pub attributes: Vec<String>,
    /// Number of bins per attribute; every row value lies in `1..=domain`.
    pub domains: Vec<u32>,
    pub rows: Vec<NominalRow>,
}

impl NominalDataset {
    pub fn new(attributes: Vec<String>, domains: Vec<u32>, mut rows: Vec<NominalRow>) -> Result<Self> {
        if attributes.len() != domains.len() {
            return Err(Error::LengthMismatch { left: attributes.len(), right: domains.len() });
        }
        for row in &rows {
            if row.values.len() != attributes.len() {
                return Err(Error::LengthMismatch { left: row.values.len(), right: attributes.len() });
            }
            if let Some(pos) = row.values.iter().zip(&domains).position(|(v, d)| *v < 1 || v > d) {
                return Err(Error::InvalidParams(format!(
                    "class {}: {} bin {} outside 1..={}",
                    row.id, attributes[pos], row.values[pos], domains[pos]
                )));
            }
        }
        rows.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = rows.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateClass(w[0].id.to_string()));
        }
        Ok(NominalDataset { attributes, domains, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> BTreeMap<ClassId, TentativeLayer> {
        self.rows.iter().map(|r| (r.id.clone(), r.label)).collect()
    }

    /// Attribute-name keyed view of one row.
    pub fn row_map(&self, row: &NominalRow) -> BTreeMap<String, u32> {
        self.attributes.iter().cloned().zip(row.values.iter().copied()).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> NominalDataset {
        NominalDataset {
            attributes: self.attributes.clone(),
            domains: self.domains.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// `class,WMCBin,...,layerBin` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class");
        for a in &self.attributes {
            let _ = write!(out, ",{a}Bin");
        }
        out.push_str(",layerBin\n");
        for row in &self.rows {
            let _ = write!(out, "{}", row.id);
            for v in &row.values {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{}", row.label);
        }
        out
    }

    /// Inverse of [`to_csv`](Self::to_csv); domains are the largest bin seen per column.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::EmptyInput)?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols[0] != "class" || cols[cols.len() - 1] != "layerBin" {
            return Err(Error::Schema { line: hline, message: "header must be `class,...,layerBin`".into() });
        }
        let attributes: Vec<String> = cols[1..cols.len() - 1]
            .iter()
            .map(|c| c.strip_suffix("Bin").unwrap_or(c).to_string())
            .collect();
        let mut rows = Vec::new();
        let mut domains = vec![0u32; attributes.len()];
        for (line, content) in lines {
            let fields: Vec<&str> = content.split(',').map(str::trim).collect();
            if fields.len() != cols.len() {
                return Err(Error::Schema {
                    line,
                    message: format!("expected {} fields, found {}", cols.len(), fields.len()),
                });
            }
            let id = ClassId::new(fields[0]).map_err(|e| Error::Schema { line, message: e.to_string() })?;
            let parse = |s: &str| {
                s.parse::<u32>()
                    .ok()
                    .filter(|v| *v >= 1)
                    .ok_or_else(|| Error::Schema { line, message: format!("bad bin label `{s}`") })
            };
            let mut values = Vec::with_capacity(attributes.len());
            for (slot, field) in fields[1..fields.len() - 1].iter().enumerate() {
                let v = parse(field)?;
                domains[slot] = domains[slot].max(v);
                values.push(v);
            }
            let label_text = fields[fields.len() - 1];
            let label = label_text
                .parse::<u8>()
                .ok()
                .and_then(TentativeLayer::from_index)
                .ok_or_else(|| Error::Schema { line, message: format!("bad layer `{label_text}`") })?;
            rows.push(NominalRow { id, values, label });
        }
        NominalDataset::new(attributes, domains, rows)
    }
}

/// Maps every metric value to its bin under `scheme`, skipping degenerate
/// attributes; the row label is the tentative layer.
pub fn apply_bins(
    table: &MetricsTable,
    layers: &BTreeMap<ClassId, TentativeLayer>,
    scheme: &BinningScheme,
) -> Result<NominalDataset> {
    let usable: Vec<(&AttributeBins, Metric)> = scheme
        .usable()
        .map(|a| Metric::from_name(&a.name).map(|m| (a, m)).ok_or_else(|| Error::MissingAttribute(a.name.clone())))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(table.len());
    for (id, v) in table {
        let label = *layers.get(id).ok_or_else(|| Error::MissingLabel(id.to_string()))?;
        let values = usable.iter().map(|(bins, m)| bins.label_of(v.get(*m) as f64)).collect();
        rows.push(NominalRow { id: id.clone(), values, label });
    }
    NominalDataset::new(
        usable.iter().map(|(b, _)| b.name.clone()).collect(),
        usable.iter().map(|(b, _)| b.bin_count()).collect(),
        rows,
    )
}
