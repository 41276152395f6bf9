//! A Z^2 rotation coding and its patterns on a lattice window.

use symdyn::lang::{extract_lattice_patterns, LatticeBox};
use symdyn::spec::SourceDocument;
use symdyn::torus::Constant;

fn main() {
    let doc = SourceDocument::Rotation {
        bits: 256,
        alphas: vec![
            Constant::golden().into(),
            Constant::sqrt_rational(2, 1).into(),
        ],
        base: Constant::rational(1, 7).into(),
        cuts: vec![
            Constant::rational(0, 1).into(),
            Constant::rational(1, 2).into(),
        ],
        guard_bits: None,
    };
    let src = doc.build().unwrap();
    for side in 1..=4i64 {
        let window: Vec<Vec<i64>> = (0..side)
            .flat_map(|i| (0..side).map(move |j| vec![i, j]))
            .collect();
        let store = extract_lattice_patterns(&src, &window, &LatticeBox::cube(2, 150), 4).unwrap();
        println!("{side}x{side} block: {} patterns", store.len());
    }
}
