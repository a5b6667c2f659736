//! Compute the eight design metrics from hand-written class facts and
//! export them as ckjm lines.

use archlayers::ingest::{format_ckjm, parse_ckjm_metrics, parse_class_facts};
use archlayers::metrics::{compute_metrics, compute_metrics_with, MetricOptions};
use archlayers::model::Metric;
use archlayers::Result;

const FACTS: &str = r#"
{"id":"shop.Base","methods":[{"name":"<init>","visibility":"public"}]}
{"id":"shop.Cart","superclass":"shop.Base","fields":[{"name":"f1","type":"int","visibility":"private"},{"name":"f2","type":"java.util.List<shop.Item>","visibility":"private"}],"methods":[{"name":"m1","visibility":"public","accesses":[{"owner":"shop.Cart","field":"f1"}]},{"name":"m2","visibility":"public","accesses":[{"owner":"shop.Cart","field":"f1"}],"invokes":[{"owner":"shop.Item","method":"price()"}]},{"name":"m3","visibility":"private","accesses":[{"owner":"shop.Cart","field":"f2"}],"invokes":[{"owner":"shop.Cart","method":"m1()"}]}]}
{"id":"shop.Item","methods":[{"name":"price","returns":"long","visibility":"public"},{"name":"<clinit>","visibility":"package"}]}
"#;

pub fn run() -> Result<()> {
    let model = parse_class_facts(FACTS)?;
    let table = compute_metrics(&model);
    print!("{}", format_ckjm(&table));

    let cart = &table["shop.Cart"];
    // m1,m2 share f1; (m1,m3) and (m2,m3) share nothing: P = 2, Q = 1.
    assert_eq!(cart.get(Metric::Lcom), 1);
    assert_eq!(cart.get(Metric::Dit), 2);
    // Three declared methods plus Item.price(); the self call to m1 is not counted.
    assert_eq!(cart.get(Metric::Rfc), 4);
    // Base, java.util.List and Item.
    assert_eq!(cart.get(Metric::Cbo), 3);
    assert_eq!(table["shop.Item"].get(Metric::Ca), 1);

    let with_init = compute_metrics_with(&model, &MetricOptions { count_constructors: true, count_initializers: true });
    println!("Item WMC: {} default, {} counting static initializers", table["shop.Item"].wmc, with_init["shop.Item"].wmc);

    assert_eq!(parse_ckjm_metrics(&format_ckjm(&table))?, table);
    Ok(())
}

fn main() -> Result<()> {
    run()
}
