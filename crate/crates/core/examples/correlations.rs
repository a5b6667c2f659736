//! Spearman correlations between D-layer and every metric, with
//! significance stars and both decimal renderings.

use archlayers::layering::{assign_dlayers, condense};
use archlayers::stats::{correlation_matrix, select_correlated, significance, DecimalStyle, SignificanceFlag};
use archlayers::synth::{generate, SynthParams};
use archlayers::Result;

pub fn run() -> Result<()> {
    let sys = generate(&SynthParams { classes_per_layer: [40; 4], seed: 7, ..SynthParams::default() })?;
    let assignment = assign_dlayers(&condense(&sys.graph));
    let matrix = correlation_matrix(&sys.metrics, &assignment)?;
    print!("{}", matrix.to_markdown(DecimalStyle::Dot));
    println!();
    print!("{}", matrix.to_markdown(DecimalStyle::Comma));

    let selected: Vec<&str> = select_correlated(&matrix, 0.05).iter().map(|m| m.name()).collect();
    println!("significant at 0.05: {}", selected.join(", "));

    // Large samples make weak correlations significant.
    let weak = significance(0.045, 3265)?;
    let moderate = significance(0.341, 3265)?;
    assert_eq!(weak.flag, SignificanceFlag::Five);
    assert_eq!(moderate.flag, SignificanceFlag::One);
    println!("rho 0.045, n 3265: p = {:.4} {}", weak.p_value, weak.flag.stars());
    Ok(())
}

fn main() -> Result<()> {
    run()
}
