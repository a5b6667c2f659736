//! Class dependency graph, strongly connected component condensation,
//! D-layer assignment and the four-way grouping into tentative layers.
//!
//! D-layer 0 holds the dependency sinks; every other component sits one
//! above the highest component it depends on. Classes in one cycle share a
//! D-layer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ingest::EdgeList;
use crate::model::{ClassId, ClassModel, TentativeLayer};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: BTreeSet<ClassId>,
    edges: BTreeSet<(ClassId, ClassId)>,
}

impl DependencyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: ClassId) {
        self.nodes.insert(id);
    }

    /// Adds `from -> to`, inserting both endpoints. Self-edges are ignored.
    pub fn add_edge(&mut self, from: ClassId, to: ClassId) {
        if from == to {
            return;
        }
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        self.edges.insert((from, to));
    }

    /// Builds a graph over `nodes`; every edge endpoint must be one of them.
    pub fn from_edge_list(nodes: impl IntoIterator<Item = ClassId>, list: &EdgeList) -> Result<Self> {
        let mut graph = DependencyGraph::new();
        graph.nodes.extend(nodes);
        for edge in &list.edges {
            for end in [&edge.from, &edge.to] {
                if !graph.nodes.contains(end) {
                    return Err(Error::InvalidParams(format!(
                        "edge {} -> {} references unknown class `{end}`",
                        edge.from, edge.to
                    )));
                }
            }
            graph.add_edge(edge.from.clone(), edge.to.clone());
        }
        Ok(graph)
    }

    /// Graph whose nodes are exactly the edge endpoints.
    pub fn from_edges(list: &EdgeList) -> Self {
        let mut graph = DependencyGraph::new();
        for edge in &list.edges {
            graph.add_edge(edge.from.clone(), edge.to.clone());
        }
        graph
    }

    pub fn nodes(&self) -> &BTreeSet<ClassId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(ClassId, ClassId)> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency lists over node indices in sorted-id order.
    pub fn adjacency(&self) -> (Vec<ClassId>, Vec<Vec<usize>>) {
        let ids: Vec<ClassId> = self.nodes.iter().cloned().collect();
        let index: BTreeMap<&ClassId, usize> = ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (from, to) in &self.edges {
            adj[index[from]].push(index[to]);
        }
        (ids, adj)
    }
}

/// Edge `a -> b` for every in-model type `b != a` that `a` references.
pub fn build_graph(model: &ClassModel) -> DependencyGraph {
    let mut graph = DependencyGraph::new();
    for class in model.classes() {
        graph.add_node(class.id.clone());
        for target in class.type_references() {
            if let Some(other) = model.get(&target) {
                graph.add_edge(class.id.clone(), other.id.clone());
            }
        }
    }
    graph
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Condensation {
    /// Each component sorted by id. Components are listed in reverse
    /// topological order: a component only points at earlier ones.
    pub components: Vec<Vec<ClassId>>,
    pub component_of: BTreeMap<ClassId, usize>,
    pub dag_edges: BTreeSet<(usize, usize)>,
}

/// Tarjan's algorithm with an explicit stack, so deep dependency chains do
/// not overflow the call stack.
fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next child position)
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

pub fn condense(graph: &DependencyGraph) -> Condensation {
    let (ids, adj) = graph.adjacency();
    let comps = tarjan(&adj);

    let mut comp_of_index = vec![0; ids.len()];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of_index[v] = c;
        }
    }
    let mut dag_edges = BTreeSet::new();
    for (u, targets) in adj.iter().enumerate() {
        for &v in targets {
            let (cu, cv) = (comp_of_index[u], comp_of_index[v]);
            if cu != cv {
                dag_edges.insert((cu, cv));
            }
        }
    }
    Condensation {
        components: comps
            .iter()
            .map(|members| members.iter().map(|&v| ids[v].clone()).collect())
            .collect(),
        component_of: ids.iter().cloned().zip(comp_of_index).collect(),
        dag_edges,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LayerAssignment {
    pub dlayer_of: BTreeMap<ClassId, u32>,
    pub max_layer: u32,
}

/// Longest path to a sink in the condensation, per component.
pub fn assign_dlayers(cond: &Condensation) -> LayerAssignment {
    let k = cond.components.len();
    let mut succ = vec![Vec::new(); k];
    let mut pred = vec![Vec::new(); k];
    for &(a, b) in &cond.dag_edges {
        succ[a].push(b);
        pred[b].push(a);
    }
    // Kahn's algorithm from the sinks upward.
    let mut remaining: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut ready: Vec<usize> = (0..k).filter(|&c| remaining[c] == 0).collect();
    let mut layer = vec![0u32; k];
    while let Some(c) = ready.pop() {
        layer[c] = succ[c].iter().map(|&s| layer[s] + 1).max().unwrap_or(0);
        for &p in &pred[c] {
            remaining[p] -= 1;
            if remaining[p] == 0 {
                ready.push(p);
            }
        }
    }

    let mut dlayer_of = BTreeMap::new();
    for (c, members) in cond.components.iter().enumerate() {
        for id in members {
            dlayer_of.insert(id.clone(), layer[c]);
        }
    }
    LayerAssignment {
        max_layer: layer.iter().copied().max().unwrap_or(0),
        dlayer_of,
    }
}

/// Four contiguous inclusive D-layer ranges; wider bins come first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinEdges {
    pub bins: [(u32, u32); 4],
}

impl BinEdges {
    pub fn for_max_layer(max_layer: u32) -> Result<Self> {
        if max_layer < 3 {
            return Err(Error::TooFewLayers(max_layer));
        }
        let span = max_layer + 1;
        let (width, extra) = (span / 4, span % 4);
        let mut bins = [(0, 0); 4];
        let mut lo = 0;
        for (i, bin) in bins.iter_mut().enumerate() {
            let w = width + u32::from((i as u32) < extra);
            *bin = (lo, lo + w - 1);
            lo += w;
        }
        Ok(BinEdges { bins })
    }

    pub fn layer_of(&self, dlayer: u32) -> TentativeLayer {
        let pos = self
            .bins
            .iter()
            .position(|&(_, hi)| dlayer <= hi)
            .unwrap_or(3);
        TentativeLayer::ALL[pos]
    }

    /// `0-3`, `4-7`, ... as rendered in descriptive tables.
    pub fn labels(&self) -> [String; 4] {
        self.bins.map(|(lo, hi)| {
            if lo == hi {
                lo.to_string()
            } else {
                format!("{lo}-{hi}")
            }
        })
    }
}

pub fn bin_tentative(assign: &LayerAssignment) -> Result<(BinEdges, BTreeMap<ClassId, TentativeLayer>)> {
    let edges = BinEdges::for_max_layer(assign.max_layer)?;
    let layers = assign
        .dlayer_of
        .iter()
        .map(|(id, &d)| (id.clone(), edges.layer_of(d)))
        .collect();
    Ok((edges, layers))
}

/// `class,dlayer,tentative_layer` CSV.
pub fn layer_csv(assign: &LayerAssignment, tentative: &BTreeMap<ClassId, TentativeLayer>) -> String {
    let mut out = String::from("class,dlayer,tentative_layer\n");
    for (id, d) in &assign.dlayer_of {
        let layer = tentative.get(id).map(|l| l.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{id},{d},{layer}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ClassFacts;

    fn id(name: &str) -> ClassId {
        ClassId::new(name).unwrap()
    }

    fn graph(edges: &[(&str, &str)]) -> DependencyGraph {
        let mut g = DependencyGraph::new();
        for (a, b) in edges {
            g.add_edge(id(a), id(b));
        }
        g
    }

    fn layers_of(g: &DependencyGraph) -> BTreeMap<String, u32> {
        assign_dlayers(&condense(g))
            .dlayer_of
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    #[test]
    fn external_superclass_adds_no_edge() {
        let mut a = ClassFacts::new(id("A"));
        a.superclass = Some("java.lang.Object".into());
        let g = build_graph(&ClassModel::from_classes([a]).unwrap());
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn in_model_superclass_is_edge() {
        let mut a = ClassFacts::new(id("A"));
        a.superclass = Some("B".into());
        let g = build_graph(&ClassModel::from_classes([a, ClassFacts::new(id("B"))]).unwrap());
        assert!(g.edges().contains(&(id("A"), id("B"))));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn acyclic_graph_has_singleton_components() {
        let cond = condense(&graph(&[("A", "B"), ("B", "C"), ("A", "C")]));
        assert_eq!(cond.components.len(), 3);
        assert!(cond.components.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn two_cycle_with_feeder() {
        let cond = condense(&graph(&[("A", "B"), ("B", "A"), ("C", "A")]));
        assert_eq!(cond.components.len(), 2);
        let ab = cond.component_of[&id("A")];
        let c = cond.component_of[&id("C")];
        assert_eq!(cond.component_of[&id("B")], ab);
        assert_eq!(cond.components[ab], vec![id("A"), id("B")]);
        assert_eq!(cond.dag_edges, BTreeSet::from([(c, ab)]));
    }

    #[test]
    fn empty_graph_condenses_to_nothing() {
        let cond = condense(&DependencyGraph::new());
        assert!(cond.components.is_empty());
        assert!(cond.dag_edges.is_empty());
        let a = assign_dlayers(&cond);
        assert!(a.dlayer_of.is_empty());
        assert_eq!(a.max_layer, 0);
    }

    #[test]
    fn single_node_is_layer_zero() {
        let mut g = DependencyGraph::new();
        g.add_node(id("A"));
        assert_eq!(layers_of(&g)["A"], 0);
    }

    #[test]
    fn chain_layers() {
        let l = layers_of(&graph(&[("A", "B"), ("B", "C")]));
        assert_eq!((l["C"], l["B"], l["A"]), (0, 1, 2));
    }

    #[test]
    fn diamond_with_cross_edge() {
        let l = layers_of(&graph(&[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D"), ("C", "B")]));
        assert_eq!((l["D"], l["B"], l["C"], l["A"]), (0, 1, 2, 3));
    }

    #[test]
    fn cycle_members_share_a_layer() {
        let l = layers_of(&graph(&[("A", "B"), ("B", "C"), ("C", "A"), ("C", "D"), ("E", "A")]));
        assert_eq!(l["D"], 0);
        assert_eq!((l["A"], l["B"], l["C"]), (1, 1, 1));
        assert_eq!(l["E"], 2);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let mut g = DependencyGraph::new();
        for i in 0..20_000 {
            g.add_edge(id(&format!("c{:05}", i + 1)), id(&format!("c{i:05}")));
        }
        assert_eq!(assign_dlayers(&condense(&g)).max_layer, 20_000);
    }

    #[test]
    fn bins_reproduce_descriptive_tables() {
        let rows = |m| BinEdges::for_max_layer(m).unwrap().labels();
        assert_eq!(rows(15), ["0-3", "4-7", "8-11", "12-15"]);
        assert_eq!(rows(19), ["0-4", "5-9", "10-14", "15-19"]);
        assert_eq!(rows(16), ["0-4", "5-8", "9-12", "13-16"]);
        assert_eq!(rows(3), ["0", "1", "2", "3"]);
    }

    #[test]
    fn too_few_layers() {
        assert!(matches!(BinEdges::for_max_layer(2), Err(Error::TooFewLayers(2))));
    }

    #[test]
    fn bin_tentative_maps_lowest_bin_to_infrastructure() {
        let assign = assign_dlayers(&condense(&graph(&[("A", "B"), ("B", "C"), ("C", "D")])));
        let (_, layers) = bin_tentative(&assign).unwrap();
        assert_eq!(layers[&id("D")], TentativeLayer::Infrastructure);
        assert_eq!(layers[&id("A")], TentativeLayer::UserInterface);
        let csv = layer_csv(&assign, &layers);
        assert!(csv.starts_with("class,dlayer,tentative_layer\nA,3,4\n"));
    }

    #[test]
    fn edge_list_with_unknown_endpoint_is_rejected() {
        let list = crate::ingest::parse_edges("A -> B").unwrap();
        assert!(DependencyGraph::from_edge_list([id("A")], &list).is_err());
        assert!(DependencyGraph::from_edge_list([id("A"), id("B")], &list).is_ok());
    }
}
