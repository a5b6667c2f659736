use std::collections::BTreeMap;

use proptest::prelude::*;

use archlayers::discretize::mdlp_discretize;
use archlayers::eval::{confusion, precision_recall, EvalMode};
use archlayers::ingest::{format_ckjm, parse_ckjm_metrics, parse_class_facts};
use archlayers::layering::{assign_dlayers, build_graph, condense, DependencyGraph};
use archlayers::metrics::compute_metrics;
use archlayers::model::{ClassId, ClassModel, MetricVector, MetricsTable, TentativeLayer};
use archlayers::rules::{format_rules, parse_rules, Condition, LearnerParams, Rule, RuleSet};
use archlayers::stats::spearman;
use archlayers::synth::{generate_class_facts, SynthParams};

fn id(i: usize) -> ClassId {
    ClassId::new(format!("p.N{i:02}")).unwrap()
}

fn layer_strategy() -> impl Strategy<Value = TentativeLayer> {
    (1u8..=4).prop_map(|i| TentativeLayer::from_index(i).unwrap())
}

fn synth_model(seed: u64, per_layer: usize) -> ClassModel {
    let params = SynthParams { classes_per_layer: [per_layer; 4], seed, ..SynthParams::default() };
    generate_class_facts(&params).unwrap().model
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dlayers_decrease_along_edges(n in 1usize..14, edges in prop::collection::vec((0usize..14, 0usize..14), 0..40)) {
        let mut graph = DependencyGraph::new();
        for i in 0..n {
            graph.add_node(id(i));
        }
        for &(a, b) in &edges {
            if a < n && b < n && a != b {
                graph.add_edge(id(a), id(b));
            }
        }
        let cond = condense(&graph);
        let layers = assign_dlayers(&cond);
        for (a, b) in graph.edges() {
            let (la, lb) = (layers.dlayer_of[a], layers.dlayer_of[b]);
            if cond.component_of[a] == cond.component_of[b] {
                prop_assert_eq!(la, lb);
            } else {
                prop_assert!(la > lb, "{a}={la} should exceed {b}={lb}");
            }
        }
        prop_assert_eq!(layers.max_layer, layers.dlayer_of.values().copied().max().unwrap_or(0));
    }

    #[test]
    fn spearman_ignores_monotone_transforms(pairs in prop::collection::vec((0u32..6, 0u32..6), 3..80)) {
        let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        prop_assume!(spearman(&x, &y).is_ok());
        let tx: Vec<f64> = x.iter().map(|v| v.powi(3) * 2.0 + 7.0).collect();
        let ty: Vec<f64> = y.iter().map(|v| (v + 1.0).ln()).collect();
        let a = spearman(&x, &y).unwrap();
        let b = spearman(&tx, &ty).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        let rev: Vec<f64> = y.iter().map(|v| -v).collect();
        prop_assert!((spearman(&x, &rev).unwrap() + a).abs() < 1e-12);
    }

    #[test]
    fn mdlp_ignores_row_order(pairs in prop::collection::vec((0u32..10, 0u32..3), 2..40), seed in any::<u64>()) {
        let values: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let labels: Vec<u32> = pairs.iter().map(|p| p.1).collect();
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let pv: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let pl: Vec<u32> = order.iter().map(|&i| labels[i]).collect();
        let cuts = mdlp_discretize(&values, &labels);
        prop_assert_eq!(&cuts, &mdlp_discretize(&pv, &pl));
        prop_assert!(cuts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ckjm_round_trip(rows in prop::collection::vec(prop::array::uniform8(0u64..100_000), 0..20)) {
        let table: MetricsTable = rows
            .iter()
            .enumerate()
            .map(|(i, v)| (ClassId::new(format!("q.Class{i}")).unwrap(), MetricVector::from_array(*v)))
            .collect();
        let text = format_ckjm(&table);
        let parsed = parse_ckjm_metrics(&text).unwrap();
        prop_assert_eq!(&parsed, &table);
        prop_assert_eq!(format_ckjm(&parsed), text);
    }

    #[test]
    fn confusion_counts_match_recount(rows in prop::collection::vec((layer_strategy(), layer_strategy()), 1..120)) {
        let truth: BTreeMap<ClassId, TentativeLayer> = rows.iter().enumerate().map(|(i, r)| (id(i % 100), r.0)).collect();
        let pred: BTreeMap<ClassId, TentativeLayer> = rows.iter().enumerate().map(|(i, r)| (id(i % 100), r.1)).collect();
        let cm = confusion(&pred, &truth).unwrap();
        let mut hits = 0;
        for a in TentativeLayer::ALL {
            for b in TentativeLayer::ALL {
                let count = truth.iter().filter(|(k, t)| **t == a && pred[*k] == b).count() as u64;
                prop_assert_eq!(cm.get(a, b), count);
                if a == b {
                    hits += count;
                }
            }
        }
        let report = precision_recall(&cm, EvalMode::Resubstitution);
        prop_assert!((report.accuracy - hits as f64 / truth.len() as f64).abs() < 1e-12);
        let micro: u64 = TentativeLayer::ALL.iter().map(|&l| cm.get(l, l)).sum();
        prop_assert!((micro as f64 / cm.n as f64 - report.accuracy).abs() < 1e-12);
        for l in TentativeLayer::ALL {
            prop_assert!((0.0..=1.0).contains(&report.precision_of(l)));
            prop_assert!((0.0..=1.0).contains(&report.recall_of(l)));
        }
    }

    #[test]
    fn rule_listing_round_trip(
        rules in prop::collection::vec(
            (prop::collection::vec((0usize..8, 1u32..10), 1..5), layer_strategy()),
            0..10,
        ),
        default in layer_strategy(),
    ) {
        let names = ["WMC", "DIT", "NOC", "CBO", "RFC", "LCOM", "Ca", "NPM"];
        let ruleset = RuleSet {
            rules: rules
                .into_iter()
                .map(|(conds, consequent)| Rule {
                    conditions: conds.into_iter().map(|(a, bin)| Condition { attribute: names[a].into(), bin }).collect(),
                    consequent,
                })
                .collect(),
            default_class: default,
            meta: LearnerParams::default(),
        };
        let text = format_rules(&ruleset);
        prop_assert_eq!(parse_rules(&text).unwrap(), ruleset);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn metrics_survive_renaming_and_composition(seed in 0u64..1000, per_layer in 2usize..8) {
        let model = synth_model(seed, per_layer);
        let text = archlayers::ingest::format_class_facts(&model);
        let renamed = parse_class_facts(&text.replace("synth.", "other.")).unwrap();
        let base = compute_metrics(&model);
        let moved = compute_metrics(&renamed);
        prop_assert_eq!(base.len(), moved.len());
        for (k, v) in &base {
            let other = ClassId::new(k.as_str().replacen("synth.", "other.", 1)).unwrap();
            prop_assert_eq!(&moved[&other], v);
        }

        let union = ClassModel::from_classes(model.classes().cloned().chain(renamed.classes().cloned())).unwrap();
        let joint = compute_metrics(&union);
        let mut expected = base.clone();
        expected.extend(moved);
        prop_assert_eq!(joint, expected);
    }

    #[test]
    fn afferent_coupling_mirrors_graph(seed in 0u64..1000, per_layer in 2usize..10) {
        let model = synth_model(seed, per_layer);
        let graph = build_graph(&model);
        let table = compute_metrics(&model);
        let total_ca: u64 = table.values().map(|v| v.ca).sum();
        prop_assert_eq!(total_ca, graph.edge_count() as u64);
        for (id, v) in &table {
            let out = graph.edges().iter().filter(|(a, _)| a == id).count() as u64;
            let inc = graph.edges().iter().filter(|(_, b)| b == id).count() as u64;
            prop_assert!(v.cbo >= out);
            prop_assert_eq!(v.ca, inc);
        }
    }
}
