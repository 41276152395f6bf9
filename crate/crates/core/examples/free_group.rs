//! Coding a free-group action on the circle by reduced words.

use symdyn::sources::Index;
use symdyn::sources::{reduced_words, FreeGroupCoding, SymbolicSource};

fn main() {
    let coding =
        FreeGroupCoding::new(0.381_966, [1.0, 1.0, 0.0], 0.1, vec![0.0, 0.5], 1e-9, 16).unwrap();
    let src = SymbolicSource::FreeGroup(coding);
    for w in reduced_words(2) {
        let s = src.eval(&Index::Word(w.clone()));
        println!("{w:<3} {}", s.map_or("?".into(), |s| s.to_string()));
    }
    println!("{} reduced words of length <= 6", reduced_words(6).len());
}
