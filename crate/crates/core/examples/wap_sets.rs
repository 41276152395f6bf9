//! Finite-difference probes of WAP sets.

use symdyn::lang::ShiftBudget;
use symdyn::sources::IntegerSet;
use symdyn::wapset::{ruppert_test, wap_countability_note, RuppertProbe};

fn main() {
    let horizons = vec![1_000, 10_000, 100_000];
    let evens = IntegerSet::periodic(2, vec![0]).unwrap();
    let cases = [
        ("evens", evens.clone(), evens),
        ("naturals", IntegerSet::natural(), IntegerSet::natural()),
        (
            "finite",
            IntegerSet::explicit(vec![-3, 0, 5], [-10, 10]).unwrap(),
            IntegerSet::natural(),
        ),
    ];
    for (name, d, b) in cases {
        let v = ruppert_test(&RuppertProbe::new(d, b, 3, horizons.clone()).unwrap()).unwrap();
        println!(
            "{name:<9} {:?} F = {:?} sizes {:?} {:?}",
            v.outcome, v.f, v.sizes, v.growth
        );
    }

    let note = wap_countability_note(
        &IntegerSet::natural(),
        20,
        12,
        &ShiftBudget::centered(100_000),
        1 << 20,
    )
    .unwrap();
    println!(
        "1_N: p(20) = {}, k* = {}",
        note.complexity.p(20).unwrap(),
        note.search.k_star
    );
    println!("{}", note.limitation);
}
