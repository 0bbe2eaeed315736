//! Learns a random target while checking every node, tree and edge
//! condition after each update, then breaks an edge on purpose.

use omtbdd::bits::BitString;
use omtbdd::generator::{generate, GenParams};
use omtbdd::learner::{learn, LearnerConfig};
use omtbdd::oracles::oracles_from_target;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut updates = 0;
    for seed in 0..20 {
        let target = generate(&GenParams::new(12 + seed as usize, 8, 3, seed))?;
        let (mut mq, mut eq) = oracles_from_target(&target);
        let config = LearnerConfig { check_against: Some(target.clone()), ..LearnerConfig::default() };
        let out = learn(8, &mut mq, &mut eq, &config)?;
        updates += out.updates.len();
    }
    println!("20 targets, {updates} updates, conditions held after each one");

    let target = generate(&GenParams::new(15, 8, 3, 99))?;
    let (mut mq, mut eq) = oracles_from_target(&target);
    let out = learn(8, &mut mq, &mut eq, &LearnerConfig::default())?;
    let state = out.state.expect("non-constant target");
    println!("learned state: {}", state.check(&target, 12));

    // bits after the first one of a label are skipped variables, so
    // flipping them changes nothing
    let mut flipped = state.clone();
    for (from, bit, edge) in state.s.edges().into_iter().filter(|(_, _, e)| e.label.len() > 1) {
        let mut label = edge.label.bits().to_vec();
        *label.last_mut().expect("labels are nonempty") ^= 1;
        flipped.s.redirect(from, bit, edge.to, BitString::from_bits(label))?;
    }
    println!("every skipped bit flipped: {}", flipped.check(&target, 12));

    // pointing an edge at another node of the same level does break things
    let (from, bit, edge, other) = state
        .s
        .edges()
        .into_iter()
        .find_map(|(from, bit, e)| {
            let level = state.s.id(e.to).len();
            let other = state
                .s
                .real_nodes()
                .map(|(ix, _)| ix)
                .find(|&ix| ix != e.to && state.s.id(ix).len() == level)?;
            Some((from, bit, e, other))
        })
        .expect("two nodes share a level");
    let mut broken = state.clone();
    broken.s.redirect(from, bit, other, edge.label.clone())?;
    println!("edge {:?} -> {:?} moved to {:?}:", state.s.id(from), state.s.id(edge.to), state.s.id(other));
    print!("{}", broken.check(&target, 12));
    Ok(())
}
