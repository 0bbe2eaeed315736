//! Compiles a three-tree forest into one diagram, first against a labelled
//! dataset and then against the forest's full truth table.

use std::fs::File;

use omtbdd::pipeline::{
    ancestor_counts, compile_classifier, extract_conditions, read_rows, EqMode, TreeClassifier,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");
    let forest = TreeClassifier::parse(&std::fs::read_to_string(format!("{dir}/forest.txt"))?)?;
    let rows = read_rows(File::open(format!("{dir}/flowers.csv"))?)?;

    let conds = extract_conditions(&forest);
    println!("{} trees, {} distinct conditions:", forest.trees.len(), conds.len());
    for c in &conds {
        println!("  feature {} <= {}", c.feature, c.threshold);
    }
    println!("ancestor counts:");
    for row in ancestor_counts(&forest, &conds) {
        println!("  {row:?}");
    }

    let by_data = compile_classifier(&forest, &rows, EqMode::Dataset)?;
    println!();
    println!("variable order:");
    for (j, c) in by_data.conditions.iter().enumerate() {
        println!("  x{} = feature {} <= {}", j + 1, c.feature, c.threshold);
    }
    println!();
    println!("against the dataset:");
    print!("{}", by_data.report);

    let exact = compile_classifier(&forest, &rows, EqMode::Exact)?;
    println!();
    println!("against the truth table:");
    print!("{}", exact.report);
    let shared: usize = forest.trees.iter().map(|t| t.leaf_shared_size()).sum();
    println!("trees with merged leaves: {shared} nodes in total");

    let agree =
        rows.iter().filter(|r| exact.predict(&r.features).ok() == forest.predict(&r.features).ok()).count();
    println!("exact diagram matches the forest on {agree}/{} rows", rows.len());
    println!();
    print!("{}", exact.diagram.to_dot());
    Ok(())
}
