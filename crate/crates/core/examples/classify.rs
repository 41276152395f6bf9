//! Three-axis classification reports with embedded evidence.

use symdyn::classify::{classify, recheck, BudgetProfile};
use symdyn::lang::ShiftBudget;
use symdyn::manifest::to_sorted_json;
use symdyn::spec::SourceDocument;

fn main() {
    // the density proxy is only as good as the window lengths: morse still
    // clears 0.25 at lengths 6, 9, 12
    let cases = [
        (
            "champernowne",
            SourceDocument::champernowne(1 << 21),
            vec![6, 9, 12],
        ),
        ("fibonacci", SourceDocument::fibonacci(), vec![8, 16, 32]),
        ("morse", SourceDocument::morse(1 << 21), vec![6, 9, 12]),
        ("morse", SourceDocument::morse(1 << 21), vec![8, 16, 24]),
    ];
    for (name, doc, windows) in cases {
        let src = doc.build().unwrap();
        let profile = BudgetProfile::new(ShiftBudget::first(1_000_000), windows, 6);
        let r = classify(&src, &profile).unwrap();
        let v = &r.verdicts;
        println!(
            "{name:<13} k* {:?}  positive_entropy {:?}  nonnull {:?}  tame_consistent {:?}  rechecked {}",
            r.k_stars, v.positive_entropy, v.nonnull, v.tame_consistent, recheck(&src, &r)
        );
    }
    let src = SourceDocument::constant().build().unwrap();
    let r = classify(
        &src,
        &BudgetProfile::new(ShiftBudget::first(1000), vec![3, 4, 5], 3),
    )
    .unwrap();
    print!("{}", to_sorted_json(&r.verdicts));
}
