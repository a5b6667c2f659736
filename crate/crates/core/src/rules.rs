//! Ordered rule induction in the RIPPER family over a [`NominalDataset`].
//!
//! Classes are handled from least to most frequent; the most frequent one
//! becomes the default. For each class, rules are grown on two thirds of
//! the remaining data with FOIL gain, pruned on the other third by worth
//! `(p - n) / (p + n)`, and accepted until no positives remain, the pruned
//! rule errs on more than half of what it covers, or the description length
//! climbs 64 bits above the best seen. Optimization passes then try a
//! replacement and a revision for every rule and keep whichever variant
//! gives the shortest description length.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::discretize::{NominalDataset, NominalRow};
use crate::error::{Error, Result};
use crate::model::TentativeLayer;

const EPS: f64 = 1e-12;
const MAX_DL_SURPLUS: f64 = 64.0;

/// `attribute = bin` equality test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: String,
    pub bin: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub consequent: TentativeLayer,
}

impl Rule {
    /// Every condition holds; a missing attribute fails its condition.
    pub fn matches(&self, row: &BTreeMap<String, u32>) -> bool {
        self.conditions
            .iter()
            .all(|c| row.get(&c.attribute) == Some(&c.bin))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerParams {
    pub seed: u64,
    /// One of `folds` parts of the data is held out for pruning.
    pub folds: usize,
    pub optimization_passes: usize,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            seed: 1,
            folds: 3,
            optimization_passes: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub default_class: TentativeLayer,
    pub meta: LearnerParams,
}

impl RuleSet {
    pub fn default_only(class: TentativeLayer, meta: LearnerParams) -> Self {
        RuleSet {
            rules: Vec::new(),
            default_class: class,
            meta,
        }
    }

    /// Consequent of the first matching rule, else the default class.
    pub fn predict(&self, row: &BTreeMap<String, u32>) -> TentativeLayer {
        self.rules
            .iter()
            .find(|r| r.matches(row))
            .map_or(self.default_class, |r| r.consequent)
    }

    pub fn predict_dataset(&self, ds: &NominalDataset) -> BTreeMap<crate::model::ClassId, TentativeLayer> {
        let compiled: Vec<(Vec<Cond>, TentativeLayer)> = self
            .rules
            .iter()
            .map(|r| (compile(&r.conditions, ds), r.consequent))
            .collect();
        ds.rows
            .iter()
            .map(|row| {
                let layer = compiled
                    .iter()
                    .find(|(conds, _)| covers(conds, row))
                    .map_or(self.default_class, |(_, l)| *l);
                (row.id.clone(), layer)
            })
            .collect()
    }

    /// One JSON record per line, the default rule last.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            index: usize,
            conditions: &'a [Condition],
            layer: TentativeLayer,
            default: bool,
        }
        let mut out = String::new();
        for (i, rule) in self.rules.iter().enumerate() {
            let rec = Record { index: i + 1, conditions: &rule.conditions, layer: rule.consequent, default: false };
            out.push_str(&serde_json::to_string(&rec).expect("rule record serializes"));
            out.push('\n');
        }
        let rec = Record { index: self.rules.len() + 1, conditions: &[], layer: self.default_class, default: true };
        out.push_str(&serde_json::to_string(&rec).expect("rule record serializes"));
        out.push('\n');
        out
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rules(self))
    }
}

pub fn predict(ruleset: &RuleSet, row: &BTreeMap<String, u32>) -> TentativeLayer {
    ruleset.predict(row)
}

/// Positive and negative instance counts covered by a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Coverage {
    pub p: usize,
    pub n: usize,
}

/// FOIL information gain of refining a rule from `before` to `after`;
/// negative infinity when the refinement covers no positives.
pub fn foil_gain(before: Coverage, after: Coverage) -> f64 {
    if after.p == 0 || before.p == 0 {
        return f64::NEG_INFINITY;
    }
    let precision = |c: Coverage| c.p as f64 / (c.p + c.n) as f64;
    after.p as f64 * (precision(after).log2() - precision(before).log2())
}

fn worth(c: Coverage) -> f64 {
    if c.p + c.n == 0 {
        -1.0
    } else {
        (c.p as f64 - c.n as f64) / (c.p + c.n) as f64
    }
}

/// Attribute-index form of a condition used while learning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cond {
    attr: usize,
    bin: u32,
}

fn compile(conditions: &[Condition], ds: &NominalDataset) -> Vec<Cond> {
    conditions
        .iter()
        .map(|c| Cond {
            attr: ds.attributes.iter().position(|a| *a == c.attribute).unwrap_or(usize::MAX),
            bin: c.bin,
        })
        .collect()
}

fn decompile(conds: &[Cond], ds: &NominalDataset, consequent: TentativeLayer) -> Rule {
    Rule {
        conditions: conds
            .iter()
            .map(|c| Condition { attribute: ds.attributes[c.attr].clone(), bin: c.bin })
            .collect(),
        consequent,
    }
}

fn covers(conds: &[Cond], row: &NominalRow) -> bool {
    conds.iter().all(|c| row.values.get(c.attr) == Some(&c.bin))
}

fn coverage(ds: &NominalDataset, rows: &[usize], conds: &[Cond], target: TentativeLayer) -> Coverage {
    let mut cov = Coverage::default();
    for &i in rows {
        let row = &ds.rows[i];
        if covers(conds, row) {
            if row.label == target {
                cov.p += 1;
            } else {
                cov.n += 1;
            }
        }
    }
    cov
}

/// Greedy FOIL refinement starting from `conds`. Ties go to the earlier
/// attribute, then the smaller bin.
fn grow(ds: &NominalDataset, rows: &[usize], target: TentativeLayer, mut conds: Vec<Cond>) -> Vec<Cond> {
    let mut covered: Vec<usize> = rows.iter().copied().filter(|&i| covers(&conds, &ds.rows[i])).collect();
    loop {
        let before = coverage(ds, &covered, &[], target);
        if before.n == 0 || before.p == 0 {
            break;
        }
        let mut best: Option<(Cond, f64)> = None;
        for (attr, &domain) in ds.domains.iter().enumerate() {
            if conds.iter().any(|c| c.attr == attr) {
                continue;
            }
            let mut counts = vec![Coverage::default(); domain as usize + 1];
            for &i in &covered {
                let row = &ds.rows[i];
                let slot = &mut counts[row.values[attr] as usize];
                if row.label == target {
                    slot.p += 1;
                } else {
                    slot.n += 1;
                }
            }
            for (bin, &after) in counts.iter().enumerate().skip(1) {
                let gain = foil_gain(before, after);
                if gain > EPS && best.is_none_or(|(_, g)| gain > g + EPS) {
                    best = Some((Cond { attr, bin: bin as u32 }, gain));
                }
            }
        }
        let Some((cond, _)) = best else { break };
        conds.push(cond);
        covered.retain(|&i| covers(&conds, &ds.rows[i]));
    }
    conds
}

/// Keeps the prefix of `conds` with the highest worth on `rows`; shorter wins ties.
fn prune(ds: &NominalDataset, rows: &[usize], target: TentativeLayer, conds: Vec<Cond>) -> Vec<Cond> {
    if rows.is_empty() {
        return conds;
    }
    let mut best_len = 0;
    let mut best = worth(coverage(ds, rows, &[], target));
    for len in 1..=conds.len() {
        let w = worth(coverage(ds, rows, &conds[..len], target));
        if w > best + EPS {
            best = w;
            best_len = len;
        }
    }
    let mut conds = conds;
    conds.truncate(best_len);
    conds
}

fn all_rows(ds: &NominalDataset) -> Vec<usize> {
    (0..ds.rows.len()).collect()
}

/// Grows a rule for `target` over every row of `grow_set`.
pub fn grow_rule(target: TentativeLayer, grow_set: &NominalDataset) -> Rule {
    let conds = grow(grow_set, &all_rows(grow_set), target, Vec::new());
    decompile(&conds, grow_set, target)
}

/// Truncates `rule` to the final-sequence deletion with the best worth on `prune_set`.
pub fn prune_rule(rule: &Rule, prune_set: &NominalDataset) -> Rule {
    let conds = compile(&rule.conditions, prune_set);
    let kept = prune(prune_set, &all_rows(prune_set), rule.consequent, conds).len();
    Rule {
        conditions: rule.conditions[..kept].to_vec(),
        consequent: rule.consequent,
    }
}

fn log2_binomial(n: usize, k: usize) -> f64 {
    if k == 0 || k >= n {
        return 0.0;
    }
    let ln = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
    (ln / std::f64::consts::LN_2).max(0.0)
}

/// Bits to encode one rule with `k` conditions drawn from `pool` possible ones.
fn theory_bits(k: usize, pool: usize) -> f64 {
    0.5 * (((k + 1) as f64).log2() + log2_binomial(pool, k))
}

fn exception_bits(covered: usize, fp: usize, uncovered: usize, fn_: usize) -> f64 {
    log2_binomial(covered, fp)
        + log2_binomial(uncovered, fn_)
        + ((covered + 1) as f64).log2()
        + ((uncovered + 1) as f64).log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptionLength {
    pub theory: f64,
    pub exceptions: f64,
}

impl DescriptionLength {
    pub fn total(&self) -> f64 {
        self.theory + self.exceptions
    }
}

fn dl_internal(ds: &NominalDataset, rows: &[usize], rules: &[Vec<Cond>], target: TentativeLayer) -> DescriptionLength {
    let pool: usize = ds.domains.iter().map(|&d| d as usize).sum();
    let theory = rules.iter().map(|r| theory_bits(r.len(), pool)).sum();
    let (mut cov, mut fp, mut fn_) = (0, 0, 0);
    for &i in rows {
        let row = &ds.rows[i];
        let positive = row.label == target;
        if rules.iter().any(|r| covers(r, row)) {
            cov += 1;
            fp += usize::from(!positive);
        } else {
            fn_ += usize::from(positive);
        }
    }
    DescriptionLength {
        theory,
        exceptions: exception_bits(cov, fp, rows.len() - cov, fn_),
    }
}

/// Description length of `rules` (all predicting `target`) over `ds`.
pub fn ruleset_description_length(rules: &[Rule], target: TentativeLayer, ds: &NominalDataset) -> DescriptionLength {
    let compiled: Vec<Vec<Cond>> = rules.iter().map(|r| compile(&r.conditions, ds)).collect();
    dl_internal(ds, &all_rows(ds), &compiled, target)
}

struct Learner<'a> {
    ds: &'a NominalDataset,
    params: LearnerParams,
    rng: ChaCha8Rng,
}

impl Learner<'_> {
    fn dl(&self, rows: &[usize], rules: &[Vec<Cond>], target: TentativeLayer) -> f64 {
        dl_internal(self.ds, rows, rules, target).total()
    }

    /// Seeded shuffle, then every `folds`-th instance of each class goes to pruning.
    fn split(&mut self, rows: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut order = rows.to_vec();
        order.shuffle(&mut self.rng);
        let folds = self.params.folds.max(2);
        let mut seen = [0usize; 4];
        let (mut grow_rows, mut prune_rows) = (Vec::new(), Vec::new());
        for i in order {
            let slot = self.ds.rows[i].label.slot();
            if seen[slot] % folds == folds - 1 {
                prune_rows.push(i);
            } else {
                grow_rows.push(i);
            }
            seen[slot] += 1;
        }
        (grow_rows, prune_rows)
    }

    fn uncovered(&self, rows: &[usize], rules: &[Vec<Cond>]) -> Vec<usize> {
        rows.iter()
            .copied()
            .filter(|&i| !rules.iter().any(|r| covers(r, &self.ds.rows[i])))
            .collect()
    }

    /// Adds rules for `target` until a stopping condition fires.
    fn cover(&mut self, target: TentativeLayer, data: &[usize], mut rules: Vec<Vec<Cond>>) -> Vec<Vec<Cond>> {
        let mut min_dl = self.dl(data, &rules, target);
        let mut remaining = self.uncovered(data, &rules);
        loop {
            if coverage(self.ds, &remaining, &[], target).p == 0 {
                break;
            }
            let (grow_rows, prune_rows) = self.split(&remaining);
            let grown = grow(self.ds, &grow_rows, target, Vec::new());
            let conds = prune(self.ds, &prune_rows, target, grown);
            if conds.is_empty() {
                break;
            }
            let on_data = coverage(self.ds, &remaining, &conds, target);
            if on_data.p == 0 {
                break;
            }
            let on_prune = coverage(self.ds, &prune_rows, &conds, target);
            let judged = if on_prune.p + on_prune.n > 0 { on_prune } else { on_data };
            if judged.n as f64 / (judged.p + judged.n) as f64 > 0.5 {
                break;
            }
            rules.push(conds);
            let dl = self.dl(data, &rules, target);
            if dl > min_dl + MAX_DL_SURPLUS {
                rules.pop();
                break;
            }
            min_dl = min_dl.min(dl);
            let last = rules.last().expect("just pushed");
            remaining.retain(|&i| !covers(last, &self.ds.rows[i]));
        }
        rules
    }

    fn optimize(&mut self, target: TentativeLayer, data: &[usize], mut rules: Vec<Vec<Cond>>) -> Vec<Vec<Cond>> {
        for i in 0..rules.len() {
            let before = self.uncovered(data, &rules[..i]);
            let (grow_rows, prune_rows) = self.split(&before);
            let replacement = {
                let grown = grow(self.ds, &grow_rows, target, Vec::new());
                prune(self.ds, &prune_rows, target, grown)
            };
            let revision = {
                let grown = grow(self.ds, &grow_rows, target, rules[i].clone());
                prune(self.ds, &prune_rows, target, grown)
            };
            let mut best_dl = self.dl(data, &rules, target);
            let mut best = rules[i].clone();
            for variant in [replacement, revision] {
                if variant.is_empty() || variant == best || coverage(self.ds, &before, &variant, target).p == 0 {
                    continue;
                }
                let mut trial = rules.clone();
                trial[i] = variant.clone();
                let dl = self.dl(data, &trial, target);
                if dl < best_dl - EPS {
                    best_dl = dl;
                    best = variant;
                }
            }
            rules[i] = best;
        }
        rules
    }

    /// Drops rules, last first, whenever that shortens the description.
    fn reduce(&self, target: TentativeLayer, data: &[usize], mut rules: Vec<Vec<Cond>>) -> Vec<Vec<Cond>> {
        let mut i = rules.len();
        while i > 0 {
            i -= 1;
            let mut without = rules.clone();
            without.remove(i);
            if self.dl(data, &without, target) < self.dl(data, &rules, target) - EPS {
                rules = without;
            }
        }
        rules
    }

    fn learn_class(&mut self, target: TentativeLayer, data: &[usize]) -> Vec<Vec<Cond>> {
        let mut rules = self.cover(target, data, Vec::new());
        for _ in 0..self.params.optimization_passes {
            rules = self.optimize(target, data, rules);
            rules = self.cover(target, data, rules);
        }
        self.reduce(target, data, rules)
    }
}

/// Class order for learning: ascending frequency, ties by layer index.
fn class_order(ds: &NominalDataset) -> Vec<TentativeLayer> {
    let mut counts = [0usize; 4];
    for row in &ds.rows {
        counts[row.label.slot()] += 1;
    }
    let mut present: Vec<TentativeLayer> = TentativeLayer::ALL
        .into_iter()
        .filter(|l| counts[l.slot()] > 0)
        .collect();
    present.sort_by_key(|l| (counts[l.slot()], l.index()));
    present
}

pub fn learn_ripper(ds: &NominalDataset, params: &LearnerParams) -> Result<RuleSet> {
    if ds.is_empty() {
        return Err(Error::EmptyInput);
    }
    if params.folds < 2 {
        return Err(Error::InvalidParams("folds must be at least 2".into()));
    }
    let order = class_order(ds);
    let default_class = *order.last().expect("non-empty dataset has a class");
    if order.len() < 2 {
        return Ok(RuleSet::default_only(default_class, *params));
    }
    if ds.attributes.is_empty() {
        return Err(Error::NoUsableAttribute);
    }

    let mut learner = Learner {
        ds,
        params: *params,
        rng: ChaCha8Rng::seed_from_u64(params.seed),
    };
    let mut remaining = all_rows(ds);
    let mut rules = Vec::new();
    for &target in &order[..order.len() - 1] {
        let learned = learner.learn_class(target, &remaining);
        remaining = learner.uncovered(&remaining, &learned);
        rules.extend(learned.iter().map(|conds| decompile(conds, ds, target)));
    }
    Ok(RuleSet {
        rules,
        default_class,
        meta: *params,
    })
}

/// `N. IF (CBOBin = 4) and (NPMBin = 5) THEN layerBin=3`, ending with `N. ELSE layerBin=d`.
pub fn format_rules(ruleset: &RuleSet) -> String {
    let mut out = String::new();
    for (i, rule) in ruleset.rules.iter().enumerate() {
        let conds: Vec<String> = rule
            .conditions
            .iter()
            .map(|c| format!("({}Bin = {})", c.attribute, c.bin))
            .collect();
        let _ = writeln!(out, "{}. IF {} THEN layerBin={}", i + 1, conds.join(" and "), rule.consequent);
    }
    let _ = writeln!(out, "{}. ELSE layerBin={}", ruleset.rules.len() + 1, ruleset.default_class);
    out
}

fn parse_layer(text: &str, line: usize) -> Result<TentativeLayer> {
    let value = text
        .trim()
        .strip_prefix("layerBin")
        .map(str::trim_start)
        .and_then(|s| s.strip_prefix('='))
        .map(str::trim)
        .ok_or_else(|| Error::Syntax { line, column: 1, message: format!("expected `layerBin=N`, found `{}`", text.trim()) })?;
    value
        .parse::<u8>()
        .ok()
        .and_then(TentativeLayer::from_index)
        .ok_or_else(|| Error::Syntax { line, column: 1, message: format!("layer `{value}` not in 1..=4") })
}

fn parse_conditions(text: &str, line: usize) -> Result<Vec<Condition>> {
    let err = |message: String| Error::Syntax { line, column: 1, message };
    let mut conditions = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        if !conditions.is_empty() {
            rest = rest
                .strip_prefix("and")
                .map(str::trim_start)
                .ok_or_else(|| err(format!("expected `and` before `{rest}`")))?;
        }
        let inner_end = rest.find(')').ok_or_else(|| err("unclosed condition".into()))?;
        let inner = rest
            .strip_prefix('(')
            .map(|_| &rest[1..inner_end])
            .ok_or_else(|| err(format!("expected `(` at `{rest}`")))?;
        let (attr, bin) = inner.split_once('=').ok_or_else(|| err(format!("expected `=` in `{inner}`")))?;
        let attr = attr.trim();
        let attribute = attr.strip_suffix("Bin").unwrap_or(attr).to_string();
        let bin = bin.trim().parse::<u32>().map_err(|_| err(format!("bad bin `{}`", bin.trim())))?;
        conditions.push(Condition { attribute, bin });
        rest = rest[inner_end + 1..].trim_start();
    }
    if conditions.is_empty() {
        return Err(err("rule without conditions".into()));
    }
    Ok(conditions)
}

/// Parses the numbered `IF ... THEN` / `ELSE` listing back into a rule set.
/// Spacing is lenient (`(LCOMBin=1)` and `)THEN` are accepted).
pub fn parse_rules(text: &str) -> Result<RuleSet> {
    let mut rules = Vec::new();
    let mut default_class = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if default_class.is_some() {
            return Err(Error::Syntax { line, column: 1, message: "rule after ELSE".into() });
        }
        let body = match content.split_once('.') {
            Some((num, rest)) if num.trim().chars().all(|c| c.is_ascii_digit()) && !num.trim().is_empty() => rest.trim(),
            _ => content,
        };
        if let Some(rest) = body.strip_prefix("ELSE") {
            default_class = Some(parse_layer(rest, line)?);
        } else if let Some(rest) = body.strip_prefix("IF") {
            let (conds, consequent) = rest
                .split_once("THEN")
                .ok_or_else(|| Error::Syntax { line, column: 1, message: "missing THEN".into() })?;
            rules.push(Rule {
                conditions: parse_conditions(conds, line)?,
                consequent: parse_layer(consequent, line)?,
            });
        } else {
            return Err(Error::Syntax { line, column: 1, message: format!("expected IF or ELSE, found `{body}`") });
        }
    }
    let default_class = default_class.ok_or(Error::Syntax { line: text.lines().count(), column: 1, message: "missing ELSE line".into() })?;
    Ok(RuleSet {
        rules,
        default_class,
        meta: LearnerParams::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ClassId;

    fn layer(i: u8) -> TentativeLayer {
        TentativeLayer::from_index(i).unwrap()
    }

    fn dataset(attrs: &[&str], domains: &[u32], rows: &[(&[u32], u8)]) -> NominalDataset {
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, (values, l))| NominalRow {
                id: ClassId::new(format!("c{i:04}")).unwrap(),
                values: values.to_vec(),
                label: layer(*l),
            })
            .collect();
        NominalDataset::new(attrs.iter().map(|s| s.to_string()).collect(), domains.to_vec(), rows).unwrap()
    }

    fn cond(attribute: &str, bin: u32) -> Condition {
        Condition { attribute: attribute.into(), bin }
    }

    #[test]
    fn foil_gain_cases() {
        let g = foil_gain(Coverage { p: 10, n: 10 }, Coverage { p: 5, n: 0 });
        assert!((g - 5.0).abs() < 1e-12);
        assert_eq!(foil_gain(Coverage { p: 10, n: 10 }, Coverage { p: 0, n: 3 }), f64::NEG_INFINITY);
        assert_eq!(foil_gain(Coverage { p: 7, n: 3 }, Coverage { p: 7, n: 3 }), 0.0);
    }

    #[test]
    fn grow_single_condition() {
        let mut rows: Vec<(&[u32], u8)> = Vec::new();
        for _ in 0..6 {
            rows.push((&[1, 1], 2));
            rows.push((&[1, 2], 2));
            rows.push((&[2, 1], 1));
            rows.push((&[2, 2], 1));
        }
        let ds = dataset(&["A", "B"], &[2, 2], &rows);
        let rule = grow_rule(layer(2), &ds);
        assert_eq!(rule.conditions, vec![cond("A", 1)]);
    }

    #[test]
    fn grow_planted_conjunction() {
        let mut rows: Vec<(&[u32], u8)> = Vec::new();
        for _ in 0..5 {
            rows.push((&[1, 2], 2));
            rows.push((&[1, 1], 1));
            rows.push((&[2, 2], 1));
            rows.push((&[2, 1], 1));
        }
        let ds = dataset(&["A", "B"], &[2, 2], &rows);
        let rule = grow_rule(layer(2), &ds);
        assert_eq!(rule.conditions, vec![cond("A", 1), cond("B", 2)]);
        let compiled = compile(&rule.conditions, &ds);
        assert_eq!(coverage(&ds, &all_rows(&ds), &compiled, layer(2)).n, 0);
    }

    #[test]
    fn grow_all_positive_is_empty_rule() {
        let ds = dataset(&["A"], &[2], &[(&[1], 3), (&[2], 3)]);
        assert!(grow_rule(layer(3), &ds).conditions.is_empty());
    }

    #[test]
    fn prune_keeps_agreeing_rule() {
        let ds = dataset(&["A", "B"], &[2, 2], &[(&[1, 2], 2), (&[1, 1], 1), (&[2, 2], 1), (&[1, 2], 2)]);
        let rule = Rule { conditions: vec![cond("A", 1), cond("B", 2)], consequent: layer(2) };
        assert_eq!(prune_rule(&rule, &ds), rule);
    }

    #[test]
    fn prune_drops_final_condition_that_only_excludes_positives() {
        // On this prune set B=2 excludes a positive and no negatives.
        let ds = dataset(&["A", "B"], &[2, 2], &[(&[1, 2], 2), (&[1, 1], 2), (&[2, 2], 1), (&[2, 1], 1)]);
        let rule = Rule { conditions: vec![cond("A", 1), cond("B", 2)], consequent: layer(2) };
        assert_eq!(prune_rule(&rule, &ds).conditions, vec![cond("A", 1)]);
    }

    #[test]
    fn prune_to_empty_when_first_condition_hurts() {
        let ds = dataset(&["A"], &[2], &[(&[2], 2), (&[2], 2), (&[1], 1), (&[2], 1)]);
        let rule = Rule { conditions: vec![cond("A", 1)], consequent: layer(2) };
        assert!(prune_rule(&rule, &ds).conditions.is_empty());
    }

    #[test]
    fn empty_ruleset_dl_is_default_errors() {
        let ds = dataset(&["A"], &[2], &[(&[1], 2), (&[1], 2), (&[2], 1), (&[2], 1), (&[2], 1)]);
        let dl = ruleset_description_length(&[], layer(2), &ds);
        assert_eq!(dl.theory, 0.0);
        let expected = log2_binomial(5, 2) + 0.0 + 1.0f64.log2() + 6f64.log2();
        assert!((dl.exceptions - expected).abs() < 1e-9);
        assert!((log2_binomial(5, 2) - 10f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn good_rule_lowers_dl_vacuous_rule_raises_it() {
        let mut rows: Vec<(&[u32], u8)> = Vec::new();
        for _ in 0..30 {
            rows.push((&[1, 2], 2));
            rows.push((&[1, 1], 1));
            rows.push((&[2, 2], 1));
            rows.push((&[2, 1], 1));
        }
        let ds = dataset(&["A", "B"], &[3, 2], &rows);
        let empty = ruleset_description_length(&[], layer(2), &ds).total();
        let good = Rule { conditions: vec![cond("A", 1), cond("B", 2)], consequent: layer(2) };
        assert!(ruleset_description_length(std::slice::from_ref(&good), layer(2), &ds).total() < empty);
        let vacuous = Rule { conditions: vec![cond("A", 3)], consequent: layer(2) };
        let with = ruleset_description_length(&[good.clone(), vacuous], layer(2), &ds).total();
        assert!(with > ruleset_description_length(&[good], layer(2), &ds).total());
    }

    #[test]
    fn single_class_is_default_only() {
        let ds = dataset(&["A"], &[2], &[(&[1], 3), (&[2], 3)]);
        let rs = learn_ripper(&ds, &LearnerParams::default()).unwrap();
        assert!(rs.rules.is_empty());
        assert_eq!(rs.default_class, layer(3));
        assert_eq!(format_rules(&rs), "1. ELSE layerBin=3\n");
    }

    #[test]
    fn planted_single_attribute_rule() {
        let mut rows: Vec<(Vec<u32>, u8)> = Vec::new();
        for i in 0..100u32 {
            let cbo = if i % 2 == 0 { 1 } else { 2 };
            rows.push((vec![cbo, 1 + (i * 7) % 3], if cbo == 1 { 1 } else { 2 }));
        }
        let refs: Vec<(&[u32], u8)> = rows.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
        let ds = dataset(&["CBO", "RFC"], &[2, 3], &refs);
        let rs = learn_ripper(&ds, &LearnerParams::default()).unwrap();
        assert_eq!(format_rules(&rs), "1. IF (CBOBin = 1) THEN layerBin=1\n2. ELSE layerBin=2\n");
    }

    #[test]
    fn predict_first_match_and_default() {
        let rs = RuleSet {
            rules: vec![
                Rule { conditions: vec![cond("A", 1)], consequent: layer(3) },
                Rule { conditions: vec![cond("B", 1)], consequent: layer(2) },
                Rule { conditions: vec![cond("A", 1), cond("B", 1)], consequent: layer(4) },
            ],
            default_class: layer(1),
            meta: LearnerParams::default(),
        };
        let row: BTreeMap<String, u32> = [("A".to_string(), 1), ("B".to_string(), 1)].into();
        assert_eq!(predict(&rs, &row), layer(3));
        let none: BTreeMap<String, u32> = [("A".to_string(), 2)].into();
        assert_eq!(predict(&rs, &none), layer(1));
    }

    #[test]
    fn published_listing_parses_and_predicts() {
        let text = "1. IF (DITBin = 2) and (CBOBin = 3)THEN layerBin=2\n\
                    2. IF (CBOBin = 3) and (RFCBin = 2) THEN layerBin=2\n\
                    3. IF (DITBin = 2) and (CBOBin = 2) THEN layerBin=2\n\
                    4. ELSE layerBin=1\n";
        let rs = parse_rules(text).unwrap();
        assert_eq!(rs.rules.len(), 3);
        let row: BTreeMap<String, u32> = [("DIT".into(), 2), ("CBO".into(), 3), ("RFC".into(), 1)].into();
        assert_eq!(rs.predict(&row), layer(2));
        let other: BTreeMap<String, u32> = [("DIT".into(), 1), ("CBO".into(), 1), ("RFC".into(), 1)].into();
        assert_eq!(rs.predict(&other), layer(1));
        assert!(parse_rules("1. IF (A = 1) and (LCOMBin=1) THEN layerBin=3\n2. ELSE layerBin=2").is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!(parse_rules("1. IF (ABin = 1) THEN layerBin=2").is_err());
        assert!(parse_rules("1. IF (ABin = 1) layerBin=2\n2. ELSE layerBin=1").is_err());
        assert!(parse_rules("1. ELSE layerBin=1\n2. ELSE layerBin=1").is_err());
        assert!(parse_rules("1. ELSE layerBin=7").is_err());
        assert!(parse_rules("1. IF (ABin = 1) or (BBin = 2) THEN layerBin=2\n2. ELSE layerBin=1").is_err());
    }

    #[test]
    fn jsonl_export_has_default_last() {
        let rs = parse_rules("1. IF (CBOBin = 1) THEN layerBin=1\n2. ELSE layerBin=2\n").unwrap();
        let jsonl = rs.to_jsonl();
        let lines: Vec<&str> = jsonl.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], r#"{"index":1,"conditions":[{"attribute":"CBO","bin":1}],"layer":1,"default":false}"#);
        assert!(lines[1].contains(r#""default":true"#));
    }
}
