//! Condense a dependency graph with a cycle, assign D-layers and bin them
//! into the four tentative layers.

use archlayers::ingest::parse_edges;
use archlayers::layering::{assign_dlayers, bin_tentative, condense, layer_csv, BinEdges, DependencyGraph};
use archlayers::Result;

pub fn run() -> Result<()> {
    // ui -> controller -> {service, audit}; service <-> repository form a cycle.
    let edges = parse_edges(
        "app.Ui -> app.Controller\n\
         app.Controller -> app.Service\n\
         app.Controller -> app.Audit\n\
         app.Service -> app.Repository\n\
         app.Repository -> app.Service\n\
         app.Repository -> app.Db\n\
         app.Audit -> app.Db\n",
    )?;
    let graph = DependencyGraph::from_edges(&edges);
    let cond = condense(&graph);
    println!("{} classes in {} components", graph.node_count(), cond.components.len());
    for members in &cond.components {
        if members.len() > 1 {
            let names: Vec<&str> = members.iter().map(|m| m.as_str()).collect();
            println!("cycle: {{{}}}", names.join(", "));
        }
    }

    let assignment = assign_dlayers(&cond);
    assert_eq!(assignment.dlayer_of["app.Db"], 0);
    assert_eq!(assignment.dlayer_of["app.Service"], assignment.dlayer_of["app.Repository"]);
    let (bins, tentative) = bin_tentative(&assignment)?;
    println!("max D-layer {}, bins {:?}", assignment.max_layer, bins.labels());
    print!("{}", layer_csv(&assignment, &tentative));

    // Bin rows for deeper systems: 16 D-layers split evenly, 17 put the extra one first.
    for max in [15, 16, 19] {
        println!("maxLayer {max}: {}", BinEdges::for_max_layer(max)?.labels().join(" / "));
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
