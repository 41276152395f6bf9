//! Building sources from JSON documents and reading symbols.

use symdyn::sources::IntegerSetKind;
use symdyn::spec::SourceDocument;

fn show(name: &str, doc: &SourceDocument, range: std::ops::Range<i64>) {
    let src = doc.build().unwrap();
    let word: String = src
        .materialize(range, 1)
        .unwrap()
        .into_iter()
        .map(|c| c.map_or('?', |s| char::from(b'0' + s)))
        .collect();
    println!("{name:<14} {word}");
}

fn main() {
    show("fibonacci", &SourceDocument::fibonacci(), 0..40);
    show("morse", &SourceDocument::morse(64), 0..40);
    show("champernowne", &SourceDocument::champernowne(64), 0..40);
    show("block word", &SourceDocument::kerr_li(), 1..41);
    show(
        "1_N",
        &SourceDocument::indicator(IntegerSetKind::Natural),
        -20..20,
    );
    show(
        "IP{10^t}",
        &SourceDocument::indicator(IntegerSetKind::IpBase { base: 10, t_min: 1 }),
        0..40,
    );

    let text = r#"{"kind": "rotation", "alphas": [{"kind": "sqrt_rational", "p": 3, "q": 1}],
                   "base": {"kind": "rational", "p": 0, "q": 1},
                   "cuts": [{"kind": "rational", "p": 0, "q": 1}, {"kind": "rational", "p": 1, "q": 3}, {"kind": "rational", "p": 2, "q": 3}]}"#;
    let doc = SourceDocument::from_json(text).unwrap();
    show("three arcs", &doc, 0..40);
    println!("digest of the three-arc document: {}", doc.digest());

    // the golden coding's shift -1 sits exactly on a cut
    show("ambiguous", &SourceDocument::fibonacci(), -3..5);
}
