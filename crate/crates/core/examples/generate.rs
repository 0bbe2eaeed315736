//! Random reduced diagrams: exact node counts, determinism per seed and the
//! DOT rendering of a small one.

use omtbdd::generator::{generate, max_nodes, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, m, k) in [(10, 6, 3), (60, 16, 4), (300, 128, 16)] {
        let d = generate(&GenParams::new(n, m, k, 1))?;
        let again = generate(&GenParams::new(n, m, k, 1))?;
        println!(
            "n={n:3} m={m:3} K={k:2}: {} nodes, {} sinks, reduced {}, repeatable {}",
            d.node_count(),
            d.sink_count(),
            d.reduce() == d,
            d == again
        );
    }
    println!("largest reduced diagram over 5 variables and 3 values: {} nodes", max_nodes(5, 3));
    match generate(&GenParams::new(80, 4, 2, 0)) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("n=80 m=4 K=2: {e}"),
    }

    let small = generate(&GenParams::new(7, 4, 3, 3))?;
    println!();
    print!("{}", small.to_document());
    println!();
    print!("{}", small.to_dot());
    Ok(())
}
