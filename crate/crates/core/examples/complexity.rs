//! Word complexity tables and growth fits along nested coordinate sets.

use symdyn::lang::{complexity_table, projection_growth, PrefixFamily, ShiftBudget};
use symdyn::spec::SourceDocument;

fn main() {
    let shifts = ShiftBudget::first(1_000_000);
    let fib = SourceDocument::fibonacci().build().unwrap();
    let t = complexity_table(&fib, 200, &shifts).unwrap();
    println!(
        "fibonacci p(1), p(100), p(200) = {}, {}, {}",
        t.p(1).unwrap(),
        t.p(100).unwrap(),
        t.p(200).unwrap()
    );

    let morse = SourceDocument::morse(1 << 21).build().unwrap();
    let t = complexity_table(&morse, 16, &shifts).unwrap();
    print!("{}", t.to_csv());

    for doc in [
        SourceDocument::fibonacci(),
        SourceDocument::champernowne(1 << 20),
    ] {
        let src = doc.build().unwrap();
        for fam in PrefixFamily::defaults() {
            let g = projection_growth(
                &src,
                &fam.prefixes(12).unwrap(),
                &ShiftBudget::first(500_000),
            )
            .unwrap();
            let counts: Vec<u64> = g.points.iter().map(|p| p.count).collect();
            println!("{:<13} {:<13} {:?}", fam.name(), g.fit.label.name(), counts);
        }
    }
}
