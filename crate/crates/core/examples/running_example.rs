//! Replays a hand-picked counterexample sequence on a small eight-variable
//! target and prints every hypothesis update.

use omtbdd::bits::BitString;
use omtbdd::diagram::Omtbdd;
use omtbdd::learner::{learn, Event, LearnerConfig, UpdateKind};
use omtbdd::oracles::{ScriptedEquivalence, TargetMembership};

const TARGET: &str = include_str!("data/running.dd");

const SCRIPT: [&str; 6] = ["10100100", "01111100", "01000101", "01100000", "01111010", "10100010"];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target = Omtbdd::from_document(TARGET)?;
    for x in ["01000101", "10100101", "01101010", "10101010", "01111010"] {
        println!("D({x}) = {}", target.eval(&x.parse()?)?);
    }

    let script: Vec<BitString> = SCRIPT.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let mut mq = TargetMembership::new(&target);
    let mut eq = ScriptedEquivalence::new(&target, script);
    let config = LearnerConfig {
        check_against: Some(target.clone()),
        record_events: true,
        ..LearnerConfig::default()
    };
    let out = learn(8, &mut mq, &mut eq, &config)?;

    println!();
    let counterexamples = out.events.iter().filter_map(|e| match e {
        Event::Update { counterexample, .. } => Some(counterexample),
        _ => None,
    });
    for ((n, u), e) in out.updates.iter().enumerate().zip(counterexamples) {
        let kind = match u.kind {
            UpdateKind::NodeSplit => "NodeSplit",
            UpdateKind::NewBranchingNode => "NewBranchingNode",
        };
        print!("update {} on {e:?}: {kind} at i={}", n + 1, u.i);
        if let Some(j) = u.j {
            print!(", j={j}");
        }
        print!(", node {}", u.new_node.display_id());
        if u.dummy_promoted {
            print!(" (dummy root promoted)");
        }
        println!(", {} -> {} nodes", u.nodes_before, u.nodes_after);
    }
    println!();
    println!("skipped script entries: {:?}", eq.skipped());
    println!("learned {} nodes with {} MQ and {} EQ", out.diagram.node_count(), out.mq, out.eq);
    println!("matches target: {}", out.diagram.equivalent(&target)?.is_yes());
    if let Some(state) = &out.state {
        println!();
        print!("{}", state.s.dump());
    }
    Ok(())
}
