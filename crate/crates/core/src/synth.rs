//! Seeded synthetic layered systems with planted ground truth.
//!
//! Each tentative layer holds `levels_per_layer` dependency levels, so the
//! top class sits at D-layer `4 * levels_per_layer - 1` and equal-width
//! binning maps every level back to its planted layer. Every class above
//! the bottom level depends on at least one class exactly one level down;
//! other edges only point further down. Cycles are mutual edges between
//! peers on the same level, which collapse into an SCC without moving any
//! D-layer.
//!
//! [`generate`] samples metric vectors straight from the per-layer
//! profiles. [`generate_class_facts`] instead builds class facts whose
//! computed WMC, NPM, RFC, LCOM and CBO land in the profile ranges; DIT,
//! NOC and Ca follow from the structure (1, 0 and the in-degree).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{format_ckjm, format_class_facts, format_edges, format_layer_csv};
use crate::layering::DependencyGraph;
use crate::model::{
    ClassFacts, ClassId, ClassModel, FieldFacts, FieldRef, MethodFacts, MethodRef, Metric, MetricVector, MetricsTable,
    TentativeLayer, Visibility,
};

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricRange {
    pub lo: u64,
    pub hi: u64,
}

impl MetricRange {
    pub const fn new(lo: u64, hi: u64) -> Self {
        MetricRange { lo, hi }
    }

    pub fn contains(&self, v: u64) -> bool {
        (self.lo..=self.hi).contains(&v)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(self.lo..=self.hi)
    }
}

/// Uniform range per metric, in [`Metric::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerProfile {
    pub ranges: [MetricRange; 8],
}

impl LayerProfile {
    pub fn range(&self, metric: Metric) -> MetricRange {
        self.ranges[metric as usize]
    }

    pub fn with(mut self, metric: Metric, lo: u64, hi: u64) -> Self {
        self.ranges[metric as usize] = MetricRange::new(lo, hi);
        self
    }
}

const fn profile(r: [(u64, u64); 8]) -> LayerProfile {
    let mut ranges = [MetricRange::new(0, 0); 8];
    let mut i = 0;
    while i < 8 {
        ranges[i] = MetricRange::new(r[i].0, r[i].1);
        i += 1;
    }
    LayerProfile { ranges }
}

/// Well-separated defaults: CBO ranges are disjoint across layers.
pub const DEFAULT_PROFILES: [LayerProfile; 4] = [
    //        WMC      DIT     NOC     CBO       RFC       LCOM       Ca       NPM
    profile([(2, 6), (1, 1), (0, 3), (0, 2), (3, 10), (0, 10), (8, 20), (1, 4)]),
    profile([(15, 30), (2, 3), (0, 2), (10, 20), (40, 80), (30, 100), (4, 8), (8, 14)]),
    profile([(7, 14), (1, 2), (0, 1), (3, 6), (11, 30), (11, 25), (0, 1), (5, 7)]),
    profile([(7, 14), (4, 6), (0, 0), (7, 9), (20, 39), (0, 3), (2, 3), (2, 4)]),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub classes_per_layer: [usize; 4],
    pub levels_per_layer: u32,
    /// Chance of an edge to each class one level down.
    pub down_dep_prob: f64,
    /// Chance of an edge to each class two or more levels down.
    pub skip_dep_prob: f64,
    /// Chance per class of a mutual edge pair with a same-level peer.
    pub cycle_prob: f64,
    pub profiles: [LayerProfile; 4],
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            classes_per_layer: [100; 4],
            levels_per_layer: 1,
            down_dep_prob: 0.05,
            skip_dep_prob: 0.01,
            cycle_prob: 0.0,
            profiles: DEFAULT_PROFILES,
            seed: 1,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        for (name, p) in [("down", self.down_dep_prob), ("skip", self.skip_dep_prob), ("cycle", self.cycle_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} probability {p} outside [0, 1]"));
            }
        }
        if self.levels_per_layer == 0 {
            return bad("levels_per_layer must be positive".into());
        }
        for (layer, &count) in TentativeLayer::ALL.iter().zip(&self.classes_per_layer) {
            if count < self.levels_per_layer as usize {
                return bad(format!("layer {layer} has {count} classes for {} levels", self.levels_per_layer));
            }
        }
        for (layer, p) in TentativeLayer::ALL.iter().zip(&self.profiles) {
            if let Some(m) = Metric::ALL.into_iter().find(|&m| p.range(m).lo > p.range(m).hi) {
                return bad(format!("layer {layer}: empty {} range", m.name()));
            }
            if p.range(Metric::Dit).lo < 1 {
                return bad(format!("layer {layer}: DIT range must start at 1 or above"));
            }
            if p.range(Metric::Npm).lo > p.range(Metric::Wmc).lo {
                return bad(format!("layer {layer}: NPM minimum exceeds WMC minimum"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSystem {
    pub graph: DependencyGraph,
    pub metrics: MetricsTable,
    pub truth: BTreeMap<ClassId, TentativeLayer>,
}

impl SynthSystem {
    /// `from -> to` lines.
    pub fn edges_text(&self) -> String {
        format_edges(self.graph.edges().iter().map(|(a, b)| (a, b)))
    }

    pub fn ckjm_text(&self) -> String {
        format_ckjm(&self.metrics)
    }

    /// `class,layer` CSV.
    pub fn truth_csv(&self) -> String {
        format_layer_csv(&self.truth)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthFacts {
    pub model: ClassModel,
    pub truth: BTreeMap<ClassId, TentativeLayer>,
}

impl SynthFacts {
    pub fn class_facts_text(&self) -> String {
        format_class_facts(&self.model)
    }

    pub fn truth_csv(&self) -> String {
        format_layer_csv(&self.truth)
    }
}

struct Structure {
    /// Class ids per global dependency level, bottom first.
    levels: Vec<Vec<ClassId>>,
    truth: BTreeMap<ClassId, TentativeLayer>,
    graph: DependencyGraph,
}

fn class_id(layer: TentativeLayer, index: usize) -> ClassId {
    ClassId::new(format!("synth.l{}.C{index:04}", layer.index())).expect("generated ids are valid")
}

fn build_structure(params: &SynthParams, rng: &mut ChaCha8Rng) -> Structure {
    let per = params.levels_per_layer as usize;
    let mut levels: Vec<Vec<ClassId>> = vec![Vec::new(); 4 * per];
    let mut truth = BTreeMap::new();
    let mut graph = DependencyGraph::new();
    for (slot, layer) in TentativeLayer::ALL.into_iter().enumerate() {
        for j in 0..params.classes_per_layer[slot] {
            let id = class_id(layer, j);
            levels[slot * per + j % per].push(id.clone());
            truth.insert(id.clone(), layer);
            graph.add_node(id);
        }
    }

    for g in 1..levels.len() {
        for from in &levels[g] {
            let mut any_down = false;
            for to in &levels[g - 1] {
                if rng.gen_bool(params.down_dep_prob) {
                    graph.add_edge(from.clone(), to.clone());
                    any_down = true;
                }
            }
            if !any_down {
                let to = levels[g - 1].choose(rng).expect("levels are non-empty");
                graph.add_edge(from.clone(), to.clone());
            }
            for lower in &levels[..g - 1] {
                for to in lower {
                    if rng.gen_bool(params.skip_dep_prob) {
                        graph.add_edge(from.clone(), to.clone());
                    }
                }
            }
        }
    }

    for level in &levels {
        if level.len() < 2 {
            continue;
        }
        for (i, a) in level.iter().enumerate() {
            if rng.gen_bool(params.cycle_prob) {
                let mut j = rng.gen_range(0..level.len() - 1);
                if j >= i {
                    j += 1;
                }
                graph.add_edge(a.clone(), level[j].clone());
                graph.add_edge(level[j].clone(), a.clone());
            }
        }
    }

    Structure { levels, truth, graph }
}

fn sample_vector(p: &LayerProfile, rng: &mut ChaCha8Rng) -> MetricVector {
    let mut v = MetricVector::default();
    for metric in Metric::ALL {
        v.set(metric, p.range(metric).sample(rng));
    }
    // Coupled sampling keeps npm <= wmc.
    let npm = p.range(Metric::Npm);
    v.npm = rng.gen_range(npm.lo..=npm.hi.min(v.wmc));
    v
}

/// Graph, metrics table and planted truth.
pub fn generate(params: &SynthParams) -> Result<SynthSystem> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let s = build_structure(params, &mut rng);
    let metrics = s
        .truth
        .iter()
        .map(|(id, layer)| (id.clone(), sample_vector(&params.profiles[layer.slot()], &mut rng)))
        .collect();
    Ok(SynthSystem {
        graph: s.graph,
        metrics,
        truth: s.truth,
    })
}

/// Picks `lcom` target parity so that `max(P - Q, 0)` stays in range where possible.
fn sharing_pairs(methods: u64, target: u64, range: MetricRange) -> u64 {
    let total = methods * methods.saturating_sub(1) / 2;
    if target >= total {
        return 0;
    }
    let slack = total - target;
    let down = slack / 2;
    if slack.is_multiple_of(2) || range.contains(total - 2 * down) {
        down
    } else {
        down + 1
    }
}

fn build_facts(
    id: &ClassId,
    profile: &LayerProfile,
    deps: &BTreeSet<ClassId>,
    rng: &mut ChaCha8Rng,
) -> ClassFacts {
    let mut class = ClassFacts::new(id.clone());
    let wmc = profile.range(Metric::Wmc).sample(rng).max(1);
    let npm_range = profile.range(Metric::Npm);
    let npm = rng.gen_range(npm_range.lo.min(wmc)..=npm_range.hi.min(wmc));
    let cbo = profile.range(Metric::Cbo).sample(rng).max(deps.len() as u64);
    let rfc = profile.range(Metric::Rfc).sample(rng).max(wmc);
    let lcom_range = profile.range(Metric::Lcom);
    let lcom = lcom_range.sample(rng);

    for i in 0..wmc {
        let vis = if i < npm { Visibility::Public } else { Visibility::Private };
        class.methods.push(MethodFacts::new(format!("m{i}"), vis));
    }

    let mut coupled: Vec<String> = deps.iter().map(|d| d.as_str().to_string()).collect();
    for k in 0..cbo - deps.len() as u64 {
        coupled.push(format!("ext.Lib{k}"));
    }
    class.methods[0].references.extend(coupled.iter().cloned());

    for k in 0..rfc - wmc {
        let owner = if coupled.is_empty() {
            id.as_str().to_string()
        } else {
            coupled[k as usize % coupled.len()].clone()
        };
        let m = (k % wmc) as usize;
        class.methods[m].invokes.insert(MethodRef { owner, method: format!("op{k}()") });
    }

    // One private field per sharing method pair.
    let q = sharing_pairs(wmc, lcom, lcom_range);
    let pairs = (0..wmc as usize).flat_map(|a| (a + 1..wmc as usize).map(move |b| (a, b)));
    for (f, (a, b)) in pairs.take(q as usize).enumerate() {
        let name = format!("f{f}");
        class.fields.push(FieldFacts { name: name.clone(), ty: "int".into(), visibility: Visibility::Private });
        for m in [a, b] {
            class.methods[m].accesses.insert(FieldRef { owner: id.as_str().to_string(), field: name.clone() });
        }
    }
    class
}

/// Class facts over the same structure as [`generate`], plus planted truth.
pub fn generate_class_facts(params: &SynthParams) -> Result<SynthFacts> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let s = build_structure(params, &mut rng);
    let mut deps: BTreeMap<&ClassId, BTreeSet<ClassId>> = BTreeMap::new();
    for (a, b) in s.graph.edges() {
        deps.entry(a).or_default().insert(b.clone());
    }
    let empty = BTreeSet::new();
    let mut classes = Vec::with_capacity(s.truth.len());
    for (id, layer) in &s.truth {
        let d = deps.get(id).unwrap_or(&empty);
        classes.push(build_facts(id, &params.profiles[layer.slot()], d, &mut rng));
    }
    debug_assert_eq!(s.levels.iter().map(Vec::len).sum::<usize>(), classes.len());
    Ok(SynthFacts {
        model: ClassModel::from_classes(classes)?,
        truth: s.truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layering::{assign_dlayers, bin_tentative, build_graph, condense};
    use crate::metrics::compute_metrics;

    fn small(per_layer: usize) -> SynthParams {
        SynthParams { classes_per_layer: [per_layer; 4], ..SynthParams::default() }
    }

    #[test]
    fn forced_chain() {
        let params = SynthParams { down_dep_prob: 1.0, skip_dep_prob: 0.0, ..small(1) };
        let sys = generate(&params).unwrap();
        let assign = assign_dlayers(&condense(&sys.graph));
        let d: Vec<u32> = assign.dlayer_of.values().copied().collect();
        assert_eq!(d, vec![0, 1, 2, 3]);
        assert_eq!(sys.edges_text().lines().count(), 3);
    }

    #[test]
    fn deterministic() {
        let p = SynthParams { cycle_prob: 0.1, ..small(20) };
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
        assert_eq!(generate_class_facts(&p).unwrap(), generate_class_facts(&p).unwrap());
    }

    #[test]
    fn acyclic_without_cycle_prob() {
        let sys = generate(&small(30)).unwrap();
        let cond = condense(&sys.graph);
        assert_eq!(cond.components.len(), sys.graph.node_count());
    }

    #[test]
    fn dlayer_bins_recover_truth_with_cycles() {
        for levels in [1, 3] {
            let p = SynthParams { cycle_prob: 0.2, levels_per_layer: levels, ..small(24) };
            let sys = generate(&p).unwrap();
            let cond = condense(&sys.graph);
            assert!(cond.components.len() < sys.graph.node_count());
            let assign = assign_dlayers(&cond);
            assert_eq!(assign.max_layer, 4 * levels - 1);
            let (_, layers) = bin_tentative(&assign).unwrap();
            assert_eq!(layers, sys.truth);
        }
    }

    #[test]
    fn metric_vectors_respect_profiles() {
        let sys = generate(&small(50)).unwrap();
        for (id, v) in &sys.metrics {
            let p = &DEFAULT_PROFILES[sys.truth[id].slot()];
            assert!(v.is_consistent());
            for m in Metric::ALL {
                assert!(p.range(m).contains(v.get(m)), "{id} {}", m.name());
            }
        }
    }

    #[test]
    fn class_facts_metrics_land_in_ranges() {
        let p = SynthParams { down_dep_prob: 0.02, skip_dep_prob: 0.0, ..small(40) };
        let facts = generate_class_facts(&p).unwrap();
        let graph = build_graph(&facts.model);
        assert_eq!(graph, generate(&p).unwrap().graph);
        let table = compute_metrics(&facts.model);
        for (id, v) in &table {
            let prof = &DEFAULT_PROFILES[facts.truth[id].slot()];
            for m in [Metric::Wmc, Metric::Npm, Metric::Rfc, Metric::Cbo] {
                assert!(prof.range(m).contains(v.get(m)), "{id} {} = {}", m.name(), v.get(m));
            }
            let lcom = prof.range(Metric::Lcom);
            assert!(v.lcom + 1 >= lcom.lo && v.lcom <= lcom.hi + 1, "{id} LCOM = {}", v.lcom);
            assert_eq!(v.dit, 1);
            assert_eq!(v.noc, 0);
        }
    }

    #[test]
    fn sharing_pairs_parity() {
        // 4 methods, 6 pairs: target 3 needs Q = 1.5, rounded to stay in range.
        assert_eq!(sharing_pairs(4, 3, MetricRange::new(3, 4)), 1);
        assert_eq!(sharing_pairs(4, 3, MetricRange::new(2, 3)), 2);
        assert_eq!(sharing_pairs(4, 10, MetricRange::new(0, 10)), 0);
        assert_eq!(sharing_pairs(1, 0, MetricRange::new(0, 0)), 0);
    }

    #[test]
    fn rejects_infeasible() {
        assert!(generate(&SynthParams { down_dep_prob: 1.5, ..small(2) }).is_err());
        assert!(generate(&SynthParams { levels_per_layer: 3, ..small(2) }).is_err());
        let mut profiles = DEFAULT_PROFILES;
        profiles[0] = profiles[0].with(Metric::Dit, 0, 1);
        assert!(generate(&SynthParams { profiles, ..small(2) }).is_err());
    }
}
