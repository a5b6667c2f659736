//! The eight per-class design metrics computed over a [`ClassModel`].
//!
//! WMC uses unit weight per method. RFC is the one-level approximation
//! (declared methods plus distinct call targets). CBO counts external types
//! too, while Ca only sees afferents inside the model. Constructors count as
//! methods and static initializers do not, unless [`MetricOptions`] says
//! otherwise.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{ClassFacts, ClassModel, MethodFacts, MetricVector, MetricsTable, Visibility};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricOptions {
    pub count_constructors: bool,
    pub count_initializers: bool,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            count_constructors: true,
            count_initializers: false,
        }
    }
}

impl MetricOptions {
    fn counts(&self, m: &MethodFacts) -> bool {
        (self.count_constructors || !m.is_constructor()) && (self.count_initializers || !m.is_static_initializer())
    }
}

fn methods<'a>(c: &'a ClassFacts, opts: &'a MetricOptions) -> impl Iterator<Item = &'a MethodFacts> + 'a {
    c.methods.iter().filter(move |m| opts.counts(m))
}

pub fn wmc(c: &ClassFacts) -> u64 {
    wmc_with(c, &MetricOptions::default())
}

fn wmc_with(c: &ClassFacts, opts: &MetricOptions) -> u64 {
    methods(c, opts).count() as u64
}

/// In-model ancestors plus one implicit external root.
pub fn dit(c: &ClassFacts, model: &ClassModel) -> u64 {
    let mut depth = 1;
    let mut seen = BTreeSet::from([c.id.as_str()]);
    let mut cur = c;
    while let Some(parent) = cur.superclass.as_deref().and_then(|s| model.get(s)) {
        if !seen.insert(parent.id.as_str()) {
            break;
        }
        depth += 1;
        cur = parent;
    }
    depth
}

pub fn noc(c: &ClassFacts, model: &ClassModel) -> u64 {
    model
        .classes()
        .filter(|other| other.id != c.id && other.superclass.as_deref() == Some(c.id.as_str()))
        .count() as u64
}

pub fn cbo(c: &ClassFacts) -> u64 {
    c.type_references().len() as u64
}

pub fn rfc(c: &ClassFacts) -> u64 {
    rfc_with(c, &MetricOptions::default())
}

fn rfc_with(c: &ClassFacts, opts: &MetricOptions) -> u64 {
    let own: BTreeSet<String> = methods(c, opts).map(MethodFacts::signature).collect();
    let calls: BTreeSet<(&str, &str)> = methods(c, opts)
        .flat_map(|m| m.invokes.iter())
        .filter(|r| !(r.owner == c.id.as_str() && own.contains(&r.method)))
        .map(|r| (r.owner.as_str(), r.method.as_str()))
        .collect();
    (own.len() + calls.len()) as u64
}

pub fn lcom(c: &ClassFacts) -> u64 {
    lcom_with(c, &MetricOptions::default())
}

fn lcom_with(c: &ClassFacts, opts: &MetricOptions) -> u64 {
    let field_sets: Vec<BTreeSet<&str>> = methods(c, opts)
        .map(|m| {
            m.accesses
                .iter()
                .filter(|r| r.owner == c.id.as_str())
                .map(|r| r.field.as_str())
                .collect()
        })
        .collect();
    let (mut disjoint, mut sharing) = (0u64, 0u64);
    for (i, a) in field_sets.iter().enumerate() {
        for b in &field_sets[i + 1..] {
            if a.is_disjoint(b) {
                disjoint += 1;
            } else {
                sharing += 1;
            }
        }
    }
    disjoint.saturating_sub(sharing)
}

pub fn ca(c: &ClassFacts, model: &ClassModel) -> u64 {
    model
        .classes()
        .filter(|other| other.id != c.id && other.type_references().contains(c.id.as_str()))
        .count() as u64
}

pub fn npm(c: &ClassFacts) -> u64 {
    npm_with(c, &MetricOptions::default())
}

fn npm_with(c: &ClassFacts, opts: &MetricOptions) -> u64 {
    methods(c, opts).filter(|m| m.visibility == Visibility::Public).count() as u64
}

pub fn compute_metrics(model: &ClassModel) -> MetricsTable {
    compute_metrics_with(model, &MetricOptions::default())
}

pub fn compute_metrics_with(model: &ClassModel, opts: &MetricOptions) -> MetricsTable {
    // Reverse indices for NOC and Ca, built once.
    let mut children: BTreeMap<&str, u64> = BTreeMap::new();
    let mut afferents: BTreeMap<String, u64> = BTreeMap::new();
    let refs: BTreeMap<&str, BTreeSet<String>> = model
        .classes()
        .map(|c| (c.id.as_str(), c.type_references()))
        .collect();
    for c in model.classes() {
        if let Some(parent) = c.superclass.as_deref().and_then(|s| model.get(s)) {
            if parent.id != c.id {
                *children.entry(parent.id.as_str()).or_default() += 1;
            }
        }
        for target in &refs[c.id.as_str()] {
            if model.contains(target) {
                *afferents.entry(target.clone()).or_default() += 1;
            }
        }
    }

    model
        .classes()
        .map(|c| {
            let row = MetricVector {
                wmc: wmc_with(c, opts),
                dit: dit(c, model),
                noc: children.get(c.id.as_str()).copied().unwrap_or(0),
                cbo: refs[c.id.as_str()].len() as u64,
                rfc: rfc_with(c, opts),
                lcom: lcom_with(c, opts),
                ca: afferents.get(c.id.as_str()).copied().unwrap_or(0),
                npm: npm_with(c, opts),
            };
            (c.id.clone(), row)
        })
        .collect()
}
