//! Generates a random target and learns it back with exact oracles.
//!
//! `cargo run --release --example learn_random -- [n] [m] [k] [seed]`

use omtbdd::generator::{generate, GenParams};
use omtbdd::learner::{learn, query_bounds, LearnerConfig, UpdateKind};
use omtbdd::oracles::{oracles_from_target, CachedMembership};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let arg = |i: usize, default: u64| args.get(i).copied().unwrap_or(default);
    let (n, m, k, seed) = (arg(0, 100) as usize, arg(1, 256) as usize, arg(2, 8) as u32, arg(3, 7));

    let target = generate(&GenParams::new(n, m, k, seed))?;
    println!("target: {} nodes, {} sinks, m = {m}", target.node_count(), target.sink_count());

    let (mq, mut eq) = oracles_from_target(&target);
    let mut mq = CachedMembership::new(mq);
    let out = learn(m, &mut mq, &mut eq, &LearnerConfig::default())?;

    let splits = out.updates.iter().filter(|u| u.kind == UpdateKind::NodeSplit).count();
    let (mq_bound, eq_bound) = query_bounds(target.node_count(), m);
    println!(
        "learned: {} nodes, equal to target: {}",
        out.diagram.node_count(),
        out.diagram.same_structure(&target)
    );
    println!("membership queries: {} (distinct {}, bound {mq_bound})", out.mq, mq.distinct());
    println!("equivalence queries: {} (bound {eq_bound})", out.eq);
    println!("updates: {} node splits, {} new branching nodes", splits, out.updates.len() - splits);
    Ok(())
}
