//! Entropy slopes along the identity, geometric and block sequences.

use symdyn::entropy::{sequence_entropy, topological_entropy, EntropySequence};
use symdyn::lang::ShiftBudget;
use symdyn::spec::SourceDocument;

fn main() {
    let shifts = ShiftBudget::first(1_000_000);
    let morse = SourceDocument::morse(1 << 21).build().unwrap();
    for n in [8, 12, 16] {
        let e = topological_entropy(&morse, n, &shifts).unwrap();
        println!("morse n_max = {n}: tail_max {:.4}", e.tail_max);
    }
    let e = topological_entropy(&morse, 16, &shifts).unwrap();
    print!("{}", e.to_csv());

    let fib = SourceDocument::fibonacci().build().unwrap();
    let e = sequence_entropy(&fib, &EntropySequence::Geometric, 20, &shifts).unwrap();
    println!(
        "fibonacci along 2^i: N_20 = {}",
        e.row(20).unwrap().n_patterns
    );

    let blocks = SourceDocument::kerr_li().build().unwrap();
    let e = sequence_entropy(&blocks, &EntropySequence::kerr_li_blocks(), 8, &shifts).unwrap();
    let counts: Vec<u64> = e.rows.iter().map(|r| r.n_patterns).collect();
    println!(
        "block word along block positions: {counts:?}, tail_max {}",
        e.tail_max
    );
}
