use hopfbrace::coeff::{HSeries, Window};
use hopfbrace::embed::{adt_twistor_verdicts, order_one_kernel, random_adt_candidate, CMorphism};
use hopfbrace::liepair::{adte_verdicts, Chain, ChainKey, LiePair, ValidatedPair};
use hopfbrace::sample::{rng_from_seed, SizeBound};
use std::sync::Arc;

fn main() {
    let pair = Arc::new(ValidatedPair::new(LiePair::aff1()).unwrap());
    let order = 2i64;
    let cm = CMorphism::new(pair.clone(), order);
    let w = cm.window;
    let mut cands: Vec<(String, Chain)> = vec![
        ("trivial".into(), Chain::unit(2, &pair, w)),
        ("(1+h)*unit".into(), Chain::unit(2, &pair, w).scale(&HSeries::one(w).add(&HSeries::hbar(w)))),
    ];
    let mut k3 = Chain::unit(2, &pair, w);
    k3.terms.add_term(ChainKey { g: vec![vec![0,0], vec![0,0]], l: vec![1] }, HSeries::hbar(w));
    cands.push(("unit + h(1⊗1⊗l)".into(), k3));
    for (i, kern) in order_one_kernel(&pair, w).into_iter().enumerate().take(3) {
        cands.push((format!("kernel{i}"), Chain::unit(2, &pair, w).add(&kern.scale(&HSeries::hbar(w)))));
    }
    let bound = SizeBound { max_terms: 1, coeff_height: 2, degree: 1, hbar_order: order };
    for s in 0..6u64 {
        let mut rng = rng_from_seed(1000 + s);
        cands.push((format!("rand{s}"), random_adt_candidate(&pair, w, &mut rng, &bound)));
    }
    for (name, k) in &cands {
        let adte = adte_verdicts(&pair, k, w);
        match adt_twistor_verdicts(&cm, k) {
            Ok((_, tw)) => {
                println!("{name}:");
                println!("  ADTE   : {:?}", &adte[..=(order as usize + 2).min(adte.len()-1)]);
                println!("  cocycle: {:?}", &tw.cocycle[..=(order as usize + 2).min(tw.cocycle.len()-1)]);
                println!("  counit : {:?}", &tw.counit[..=(order as usize + 2).min(tw.counit.len()-1)]);
            }
            Err(e) => println!("{name}: ERR {e}"),
        }
    }
}
