//! Diagram equivalence and the three equivalence-oracle regimes: exact,
//! dataset consistency and random sampling.

use omtbdd::bits::BitString;
use omtbdd::diagram::{EqResult, Omtbdd};
use omtbdd::learner::{learn, LearnerConfig};
use omtbdd::oracles::{
    DatasetEquivalence, EquivalenceOracle, SamplingEquivalence, TargetEquivalence, TargetMembership,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // x1 xor x3 with a third value when x2 = x3 = 1
    let table: Vec<u32> = (0..8u32)
        .map(|x| {
            let (a, b, c) = (x >> 2 & 1, x >> 1 & 1, x & 1);
            if b == 1 && c == 1 {
                2
            } else {
                a ^ c
            }
        })
        .collect();
    let f = Omtbdd::from_truth_table(3, 3, &table)?;
    let zero = Omtbdd::constant(3, 3, 0);
    println!("f has {} nodes", f.node_count());
    println!("f vs f: {:?}", f.equivalent(&f)?);
    match f.equivalent(&zero)? {
        EqResult::No(e) => println!("f vs 0: counterexample {e:?}, f = {}", f.eval(&e)?),
        EqResult::Yes => println!("f vs 0: equivalent?"),
    }

    let mut exact = TargetEquivalence::new(&f);
    println!("exact oracle on 0: {:?}", exact.check(&zero));

    let samples: Vec<(BitString, u32)> =
        ["000", "110"].iter().map(|s| s.parse().map(|a: BitString| (a, 0))).collect::<Result<_, _>>()?;
    let mut data = DatasetEquivalence::new(3, samples)?;
    println!("dataset oracle on 0 (agrees on every sample): {:?}", data.check(&zero));

    let mut sampling = SamplingEquivalence::new(TargetMembership::new(&f), 3, 64, 11);
    println!("sampling oracle on 0: {:?}", sampling.check(&zero));

    // a learner driven by the sampling oracle still finds f on a small cube
    let mut mq = TargetMembership::new(&f);
    let mut eq = SamplingEquivalence::new(TargetMembership::new(&f), 3, 64, 5);
    let out = learn(3, &mut mq, &mut eq, &LearnerConfig::default())?;
    println!("learned with sampling: equal to f {}", out.diagram.same_structure(&f));
    Ok(())
}
