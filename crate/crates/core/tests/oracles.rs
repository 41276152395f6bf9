//! Fixture values recomputed by independent means.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use symdyn::entropy::{sequence_entropy, topological_entropy, EntropySequence};
use symdyn::indep::{is_free, max_free_size, verify_certificate, Freeness, SymbolPair};
use symdyn::lang::{complexity_table, extract_patterns, CoordinateSet, ShiftBudget};
use symdyn::sources::{kerr_li_block_start, kerr_li_word, IntegerSetKind};
use symdyn::spec::SourceDocument;
use symdyn::torus::{make_constant, ConstantKind};

/// `floor(n·(√5−1)/2)` in integer arithmetic.
fn floor_n_alpha(n: u64) -> u64 {
    let n2 = BigUint::from(n) * BigUint::from(n) * 5u32;
    let root = n2.sqrt().to_u64().unwrap();
    (root - n) / 2
}

/// Letter `n` of the golden rotation coding with `c = 1 − α`, `z = 0`.
fn fibonacci_oracle(n: u64) -> u8 {
    (floor_n_alpha(n + 1) - floor_n_alpha(n)) as u8
}

fn factors(word: &[u8], n: usize) -> usize {
    word.windows(n).collect::<HashSet<_>>().len()
}

#[test]
fn fibonacci_letters_match_floor_formula() {
    let src = SourceDocument::fibonacci().build().unwrap();
    let cells = src.materialize(0..100_000, 4).unwrap();
    for (n, c) in cells.iter().enumerate() {
        assert_eq!(c.unwrap(), fibonacci_oracle(n as u64), "n = {n}");
    }
}

#[test]
fn fibonacci_complexity_matches_factor_count() {
    let word: Vec<u8> = (0..200_000).map(fibonacci_oracle).collect();
    let src = SourceDocument::fibonacci().build().unwrap();
    let t = complexity_table(&src, 40, &ShiftBudget::first(100_000)).unwrap();
    for n in 1..=40 {
        assert_eq!(
            t.p(n).unwrap() as usize,
            factors(&word[..100_000 + n - 1], n)
        );
        assert_eq!(t.p(n).unwrap(), n as u64 + 1);
    }
}

#[test]
fn golden_constant_digits() {
    // floor(2^64 · (√5−1)/2)
    let g = make_constant(&ConstantKind::Golden, 64).unwrap();
    assert_eq!(g.mantissa(), BigUint::from(0x9e37_79b9_7f4a_7c15u64));
    let g = make_constant(&ConstantKind::Golden, 256).unwrap();
    let expect = (BigUint::from(5u32) << 512usize).sqrt() - (BigUint::from(1u32) << 256usize);
    assert_eq!(g.mantissa(), expect >> 1);
}

#[test]
fn fibonacci_missing_pattern_on_adjacent_pair() {
    let word: Vec<u8> = (0..100_001).map(fibonacci_oracle).collect();
    let seen: HashSet<&[u8]> = word.windows(2).collect();
    let absent: Vec<[u8; 2]> = [[0, 0], [0, 1], [1, 0], [1, 1]]
        .into_iter()
        .filter(|p| !seen.contains(&p[..]))
        .collect();
    assert_eq!(absent, vec![[0, 0]]);

    let src = SourceDocument::fibonacci().build().unwrap();
    let k = CoordinateSet::new(vec![0, 1]).unwrap();
    match is_free(&src, &k, SymbolPair::binary(), &ShiftBudget::first(100_000)).unwrap() {
        Freeness::Missing(m) => {
            assert_eq!(m.missing, vec![0]);
            assert_eq!(m.realized, 3);
        }
        Freeness::Free(_) => panic!("{{0,1}} is not free"),
    }
}

#[test]
fn morse_letters_and_counts() {
    let src = SourceDocument::morse(1 << 16).build().unwrap();
    let cells = src.materialize(0..(1 << 16), 1).unwrap();
    let word: Vec<u8> = (0u32..1 << 16)
        .map(|n| (n.count_ones() % 2) as u8)
        .collect();
    assert_eq!(cells.iter().map(|c| c.unwrap()).collect::<Vec<_>>(), word);
    let e = topological_entropy(&src, 12, &ShiftBudget::first(60_000)).unwrap();
    for r in &e.rows {
        assert_eq!(
            r.n_patterns as usize,
            factors(&word[..60_000 + r.n - 1], r.n)
        );
    }
}

/// The block word built by concatenation.
fn kerr_li_prefix(levels: u32) -> Vec<u8> {
    let mut w = Vec::new();
    for l in 1..=levels {
        let mut u = Vec::new();
        for a in 0u32..1 << l {
            for i in (0..l).rev() {
                u.push(((a >> i) & 1) as u8);
            }
            u.extend(std::iter::repeat_n(0, l as usize));
        }
        let len = u.len();
        w.extend(u);
        w.extend(std::iter::repeat_n(0, len));
    }
    w
}

#[test]
fn kerr_li_word_matches_concatenation() {
    let w = kerr_li_prefix(9);
    for (i, &letter) in w.iter().enumerate() {
        assert_eq!(kerr_li_word(i as i64 + 1), letter, "position {}", i + 1);
    }
    let mut start = 1usize;
    for l in 1..=9u32 {
        assert_eq!(kerr_li_block_start(l), start as i64);
        start += 4 * l as usize * (1 << l);
    }
    assert_eq!(kerr_li_block_start(8), 6153);
}

#[test]
fn kerr_li_blocks_realize_all_patterns() {
    let w = kerr_li_prefix(12);
    let s = kerr_li_block_start(8) as usize;
    for n in 1..=8 {
        let seen: HashSet<Vec<u8>> = (0..100_000usize)
            .filter(|m| s + m + n - 1 <= w.len())
            .map(|m| (0..n).map(|i| w[s + m + i - 1]).collect())
            .collect();
        assert_eq!(seen.len(), 1 << n);
    }
    let src = SourceDocument::kerr_li().build().unwrap();
    let e = sequence_entropy(
        &src,
        &EntropySequence::kerr_li_blocks(),
        8,
        &ShiftBudget::first(100_000),
    )
    .unwrap();
    for r in &e.rows {
        assert_eq!(r.n_patterns, 1 << r.n);
        assert_eq!(r.slope, 1.0);
    }
}

/// `n ∈ IP{10^t : t >= 1}` iff the decimal digits are 0/1 and the last is 0.
fn ip_oracle(n: i64) -> bool {
    n > 0 && n % 10 == 0 && n.to_string().bytes().all(|b| b == b'0' || b == b'1')
}

#[test]
fn ip_indicator_matches_digit_rule() {
    let src = SourceDocument::indicator(IntegerSetKind::IpBase { base: 10, t_min: 1 })
        .build()
        .unwrap();
    for n in -50..200_000 {
        assert_eq!(src.eval_z(n).unwrap() == 1, ip_oracle(n), "n = {n}");
    }
}

#[test]
fn ip_witnesses_by_digit_arithmetic() {
    let a = [10i64, 100, 1000];
    // smallest m realizing each pattern, bit i for coordinate a[i]
    let mut first = [None; 8];
    for m in 0..1_000_000i64 {
        let p = a.iter().enumerate().fold(0usize, |acc, (i, x)| {
            acc | (usize::from(ip_oracle(x + m)) << i)
        });
        first[p].get_or_insert(m);
    }
    assert!(first.iter().all(Option::is_some));
    // (1,0,0): 10+m ∈ IP, 100+m ∉, 1000+m ∉
    assert!(ip_oracle(10 + 99_990) && !ip_oracle(100 + 99_990) && !ip_oracle(1000 + 99_990));
    assert_eq!(first[0b001], Some(90));

    let src = SourceDocument::indicator(IntegerSetKind::IpBase { base: 10, t_min: 1 })
        .build()
        .unwrap();
    let k = CoordinateSet::new(a.to_vec()).unwrap();
    let cert = match is_free(
        &src,
        &k,
        SymbolPair::binary(),
        &ShiftBudget::first(1_000_000),
    )
    .unwrap()
    {
        Freeness::Free(c) => c,
        Freeness::Missing(m) => panic!("missing {:?}", m.missing),
    };
    assert!(cert.verified && verify_certificate(&src, &cert));
    for w in &cert.witnesses {
        assert_eq!(Some(w.shift), first[w.pattern().unwrap() as usize]);
    }
}

#[test]
fn champernowne_is_full_on_short_windows() {
    let src = SourceDocument::champernowne(1_100_000).build().unwrap();
    let k = CoordinateSet::contiguous(10).unwrap();
    let store = extract_patterns(&src, &k, &ShiftBudget::first(1_000_000)).unwrap();
    assert_eq!(store.len(), 1024);
    let r = max_free_size(
        &src,
        &CoordinateSet::contiguous(8).unwrap(),
        SymbolPair::binary(),
        &ShiftBudget::first(100_000),
        8,
        1 << 20,
    )
    .unwrap();
    assert_eq!(r.k_star, 8);
}

#[test]
fn natural_indicator_complexity() {
    let src = SourceDocument::indicator(IntegerSetKind::Natural)
        .build()
        .unwrap();
    let t = complexity_table(&src, 100, &ShiftBudget::centered(100_000)).unwrap();
    // factors of 1_N are 0^a 1^b, a + b = n
    assert!(t.rows.iter().all(|r| r.p_n == r.n as u64 + 1));
}
