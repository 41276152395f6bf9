//! Free-set certificates, missing patterns and the largest free subset of a window.

use symdyn::indep::{
    free_density_profile, is_free, max_free_size, verify_certificate, Freeness, SymbolPair,
};
use symdyn::lang::{pattern_string, CoordinateSet, ShiftBudget};
use symdyn::spec::SourceDocument;

fn main() {
    let fib = SourceDocument::fibonacci().build().unwrap();
    let shifts = ShiftBudget::first(100_000);
    let pair = SymbolPair::binary();

    for coords in [vec![0, 1], vec![0, 2]] {
        let k = CoordinateSet::new(coords).unwrap();
        match is_free(&fib, &k, pair, &shifts).unwrap() {
            Freeness::Free(cert) => {
                let w: Vec<i64> = cert.witnesses.iter().map(|w| w.shift).collect();
                println!(
                    "{k} free, witnesses {w:?}, re-verified {}",
                    verify_certificate(&fib, &cert)
                );
            }
            Freeness::Missing(m) => {
                let missing: Vec<String> = m
                    .missing
                    .iter()
                    .map(|p| pattern_string(u128::from(*p), k.len(), 2))
                    .collect();
                println!("{k} not free, missing {missing:?}");
            }
        }
    }

    let r = max_free_size(
        &fib,
        &CoordinateSet::contiguous(31).unwrap(),
        pair,
        &shifts,
        4,
        1 << 22,
    )
    .unwrap();
    println!(
        "fibonacci on {{0..30}}: k* = {} (exhaustive {}, {} nodes)",
        r.k_star, r.exhaustive, r.nodes
    );

    let morse = SourceDocument::morse(1 << 18).build().unwrap();
    let r = max_free_size(
        &morse,
        &CoordinateSet::contiguous(24).unwrap(),
        pair,
        &shifts,
        8,
        1 << 22,
    )
    .unwrap();
    println!(
        "morse on {{0..23}}: k* = {}, best {}",
        r.k_star, r.best.coords
    );

    let champ = SourceDocument::champernowne(1 << 21).build().unwrap();
    let d = free_density_profile(
        &champ,
        &[4, 6, 8],
        pair,
        &ShiftBudget::first(1 << 20),
        1 << 20,
    )
    .unwrap();
    for row in &d.rows {
        println!(
            "champernowne L = {}: k* = {} ratio {:.2}",
            row.length, row.k_star, row.ratio
        );
    }
    println!("positive density: {}", d.positive_density);
}
