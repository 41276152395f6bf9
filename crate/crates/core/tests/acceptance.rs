//! One PASS/FAIL line per acceptance criterion, with timings.

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::classify::{classify, recheck, BudgetProfile, Verdict};
use symdyn::entropy::{sequence_entropy, topological_entropy, EntropySequence};
use symdyn::indep::{is_free, max_free_size, verify_certificate, Freeness, SymbolPair};
use symdyn::lang::{
    complexity_table, extract_patterns, projection_growth, CoordinateSet, GrowthLabel,
    PrefixFamily, ShiftBudget,
};
use symdyn::manifest::to_sorted_json;
use symdyn::sources::{IntegerSet, SymbolicSource};
use symdyn::spec::{ConstantValue, SourceDocument};
use symdyn::torus::{rotate, Constant, FixedPointFrac, RotationSpec, TorusPoint};
use symdyn::wapset::{ruppert_test, GrowthFlag, RuppertOutcome, RuppertProbe};

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn load(name: &str) -> SymbolicSource {
    let path = format!("{}/specs/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).expect("fixture exists");
    SourceDocument::from_json(&text).unwrap().build().unwrap()
}

fn free_cert(
    src: &SymbolicSource,
    k: &[i64],
    m: u64,
) -> Result<symdyn::indep::FreeSetCertificate, String> {
    let k = CoordinateSet::new(k.to_vec()).map_err(|e| e.to_string())?;
    match is_free(src, &k, SymbolPair::binary(), &ShiftBudget::first(m))
        .map_err(|e| e.to_string())?
    {
        Freeness::Free(c) => Ok(c),
        Freeness::Missing(mp) => Err(format!("{k} misses {:?}", mp.missing)),
    }
}

/// `floor(n·(√5−1)/2)` in integer arithmetic.
fn floor_n_alpha(n: u64) -> u64 {
    let root = (BigUint::from(n) * BigUint::from(n) * 5u32)
        .sqrt()
        .to_u64()
        .unwrap();
    (root - n) / 2
}

fn sturmian_complexity() -> Check {
    let src = load("fibonacci.json");
    let t =
        complexity_table(&src, 200, &ShiftBudget::first(1_000_000)).map_err(|e| e.to_string())?;
    let bad: Vec<_> = t
        .rows
        .iter()
        .filter(|r| r.p_n != r.n as u64 + 1)
        .map(|r| (r.n, r.p_n))
        .collect();
    ensure(
        bad.is_empty() && t.rows.len() == 200 && !t.tainted,
        format!("off rows {bad:?}"),
    )?;
    Ok(format!(
        "p(n) = n+1 for n = 1..200, p(200) = {}",
        t.p(200).unwrap()
    ))
}

fn sturmian_ceiling() -> Check {
    let src = load("fibonacci.json");
    let shifts = ShiftBudget::first(100_000);
    let window = CoordinateSet::contiguous(31).unwrap();
    let r = max_free_size(&src, &window, SymbolPair::binary(), &shifts, 4, 1 << 22)
        .map_err(|e| e.to_string())?;
    ensure(
        r.k_star == 2 && r.exhaustive,
        format!("k* = {}, exhaustive = {}", r.k_star, r.exhaustive),
    )?;
    ensure(
        verify_certificate(&src, &r.best),
        "best set does not re-verify",
    )?;
    // oracle: adjacent pairs of the floor-formula word
    let word: Vec<u8> = (0..100_002u64)
        .map(|n| (floor_n_alpha(n + 1) - floor_n_alpha(n)) as u8)
        .collect();
    let seen: HashSet<u64> = word
        .windows(2)
        .take(100_000)
        .map(|w| u64::from(w[0]) | u64::from(w[1]) << 1)
        .collect();
    let oracle: Vec<u64> = (0..4).filter(|p| !seen.contains(p)).collect();
    let k = CoordinateSet::new(vec![0, 1]).unwrap();
    match is_free(&src, &k, SymbolPair::binary(), &shifts).map_err(|e| e.to_string())? {
        Freeness::Missing(m) => ensure(
            m.missing == oracle,
            format!("missing {:?}, oracle {oracle:?}", m.missing),
        )?,
        Freeness::Free(_) => return Err("{0,1} reported free".into()),
    }
    Ok(format!(
        "k* = 2 exhaustive (best {}, {} nodes); {{0,1}} misses {oracle:?} = \"00\"",
        r.best.coords, r.nodes
    ))
}

fn disjunctive_control() -> Check {
    let src = load("champernowne.json");
    let m = 10_000_000;
    let cert = free_cert(&src, &(0..10).collect::<Vec<_>>(), m)?;
    ensure(
        cert.verified && !cert.tainted,
        "size-10 certificate not verified",
    )?;
    let e = topological_entropy(&src, 10, &ShiftBudget::first(m)).map_err(|e| e.to_string())?;
    let r10 = e.row(10).unwrap();
    ensure(
        r10.n_patterns == 1024 && r10.slope == 1.0 && e.tail_max == 1.0,
        format!("N_10 = {}", r10.n_patterns),
    )?;
    let report = classify(
        &src,
        &BudgetProfile::new(ShiftBudget::first(m), vec![4, 7, 10], 10),
    )
    .map_err(|e| e.to_string())?;
    let v = &report.verdicts;
    ensure(
        v.positive_entropy == Verdict::Certified && v.nonnull == Verdict::Certified,
        format!("verdicts {v:?}"),
    )?;
    ensure(
        recheck(&src, &report),
        "report certificates do not re-verify",
    )?;
    Ok(format!("{{0..9}} free at M = 10^7, N_10 = 1024, slope 1.0, k* = {:?}, positive_entropy and nonnull CERTIFIED", report.k_stars))
}

fn natural_indicator() -> Check {
    let src = load("naturals.json");
    let shifts = ShiftBudget::centered(1_000_000);
    let t = complexity_table(&src, 100, &shifts).map_err(|e| e.to_string())?;
    ensure(
        t.rows.iter().all(|r| r.p_n == r.n as u64 + 1),
        "p(n) != n+1",
    )?;
    let r = max_free_size(
        &src,
        &CoordinateSet::contiguous(12).unwrap(),
        SymbolPair::binary(),
        &shifts,
        4,
        1 << 22,
    )
    .map_err(|e| e.to_string())?;
    ensure(r.k_star == 1 && r.exhaustive, format!("k* = {}", r.k_star))?;
    let probe = RuppertProbe::new(
        IntegerSet::natural(),
        IntegerSet::natural(),
        3,
        vec![1000, 10_000, 100_000],
    )
    .map_err(|e| e.to_string())?;
    let v = ruppert_test(&probe).map_err(|e| e.to_string())?;
    ensure(
        v.outcome == RuppertOutcome::FailEvidence && v.growth == GrowthFlag::Linear,
        format!("{:?} {:?}", v.outcome, v.growth),
    )?;
    let max_f = v.f.iter().copied().max().unwrap_or(0);
    for (n, s) in v.horizons.iter().zip(&v.sizes) {
        let expect = *n as i64 - max_f;
        ensure(
            (*s as i64 - expect).abs() <= 2,
            format!("size {s} at N = {n}, expected {expect} ± 2"),
        )?;
    }
    Ok(format!(
        "p(n) = n+1 to 100, k* = 1 exhaustive, FAIL_EVIDENCE with F = {:?}, sizes {:?} (linear)",
        v.f, v.sizes
    ))
}

fn periodic_control() -> Check {
    let evens = IntegerSet::periodic(2, vec![0]).unwrap();
    let probe = RuppertProbe::new(evens.clone(), evens, 3, vec![1000, 10_000, 100_000])
        .map_err(|e| e.to_string())?;
    let v = ruppert_test(&probe).map_err(|e| e.to_string())?;
    ensure(
        v.outcome == RuppertOutcome::Pass && v.f == vec![0] && v.sizes.iter().all(|s| *s == 0),
        format!("{:?} F = {:?} sizes {:?}", v.outcome, v.f, v.sizes),
    )?;
    Ok("PASS with F = {0}, sizes [0, 0, 0]".into())
}

fn kerr_li() -> Check {
    let src = load("kerr_li.json");
    let cert = free_cert(&src, &(0..6).collect::<Vec<_>>(), 100_000)?;
    ensure(cert.verified, "certificate not verified")?;
    let e = sequence_entropy(
        &src,
        &EntropySequence::kerr_li_blocks(),
        8,
        &ShiftBudget::first(1_000_000),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        e.rows
            .iter()
            .all(|r| r.n_patterns == 1 << r.n && r.slope == 1.0),
        "N_n != 2^n along blocks",
    )?;
    let t =
        complexity_table(&src, 12, &ShiftBudget::first(1_000_000)).map_err(|e| e.to_string())?;
    let counts: Vec<u64> = t.rows.iter().map(|r| r.p_n).collect();
    let full = t.rows.iter().all(|r| r.p_n == 1 << r.n);
    Ok(format!(
        "{{0..5}} free at M = 10^5 (max witness {}), N_n = 2^n to n = 8 along blocks; recorded contiguous p(n) {counts:?}{}",
        cert.witnesses.iter().map(|w| w.shift).max().unwrap(),
        if full { " = 2^n, flagged against countability" } else { "" }
    ))
}

/// `n ∈ IP{10^t : t >= 1}` by decimal digits.
fn ip_digits(n: i64) -> bool {
    n > 0 && n % 10 == 0 && n.to_string().bytes().all(|b| b == b'0' || b == b'1')
}

fn ip_interpolation() -> Check {
    let src = load("ip10.json");
    let a = [10i64, 100, 1000];
    let cert = free_cert(&src, &a, 1_000_000)?;
    ensure(
        cert.verified && verify_certificate(&src, &cert),
        "certificate not verified",
    )?;
    let mut first = [None; 8];
    for m in 0..1_000_000i64 {
        let p = a.iter().enumerate().fold(0usize, |acc, (i, x)| {
            acc | usize::from(ip_digits(x + m)) << i
        });
        first[p].get_or_insert(m);
    }
    for w in &cert.witnesses {
        let p = w.pattern().unwrap() as usize;
        ensure(
            Some(w.shift) == first[p],
            format!(
                "witness {} for pattern {p:03b}, oracle {:?}",
                w.shift, first[p]
            ),
        )?;
    }
    let m = 99_990;
    let at: Vec<u8> = a.iter().map(|x| src.eval_z(x + m).unwrap()).collect();
    ensure(at == [1, 0, 0], format!("m = 99990 reads {at:?}"))?;
    Ok(format!(
        "{{10,100,1000}} free at M = 10^6, witnesses {:?}; m = 99990 also realizes (1,0,0)",
        cert.witnesses.iter().map(|w| w.shift).collect::<Vec<_>>()
    ))
}

fn morse() -> Check {
    let src = load("morse.json");
    let b = ShiftBudget::first(1_000_000);
    let tails: Vec<f64> = [8, 12, 16]
        .iter()
        .map(|&n| topological_entropy(&src, n, &b).map(|e| e.tail_max))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(
        tails[2] <= 0.45 && tails[0] > tails[1] && tails[1] > tails[2],
        format!("tails {tails:?}"),
    )?;
    let window = CoordinateSet::contiguous(16).unwrap();
    let r = max_free_size(
        &src,
        &window,
        SymbolPair::binary(),
        &ShiftBudget::first(100_000),
        8,
        1 << 22,
    )
    .map_err(|e| e.to_string())?;
    ensure(r.k_star >= 3, format!("k* = {}", r.k_star))?;
    // oracle: Thue–Morse letters are binary digit sums mod 2
    let tm = |n: i64| (n.count_ones() % 2) as u8;
    for w in &r.best.witnesses {
        let p = w.pattern().unwrap();
        for (i, a) in r.best.coords.as_slice().iter().enumerate() {
            ensure(
                u64::from(tm(a + w.shift)) == (p >> i) & 1,
                "witness disagrees with digit-sum oracle",
            )?;
        }
    }
    Ok(format!(
        "tail_max {:.4} > {:.4} > {:.4}; k* = {} on {{0..15}} at M = 10^5 (best {})",
        tails[0], tails[1], tails[2], r.k_star, r.best.coords
    ))
}

fn sphere() -> Check {
    let src = load("sphere_auto.json");
    let cells = src
        .materialize(-100_000..100_000, 8)
        .map_err(|e| e.to_string())?;
    let ambiguous = cells.iter().filter(|c| c.is_none()).count();
    ensure(
        cells.len() == 200_000 && ambiguous == 0,
        format!("{ambiguous} ambiguous symbols"),
    )?;
    let shifts = ShiftBudget::range(-100_000, 100_000 - 12);
    let mut labels = Vec::new();
    for fam in PrefixFamily::defaults() {
        let g = projection_growth(&src, &fam.prefixes(12).map_err(|e| e.to_string())?, &shifts)
            .map_err(|e| e.to_string())?;
        ensure(
            matches!(
                g.fit.label,
                GrowthLabel::Polynomial { .. } | GrowthLabel::Linear { .. }
            ),
            format!(
                "{} labeled {} (counts {:?})",
                fam.name(),
                g.fit.label.name(),
                g.points.iter().map(|p| p.count).collect::<Vec<_>>()
            ),
        )?;
        labels.push(format!("{} {}", fam.name(), g.fit.label.name()));
    }
    Ok(format!(
        "200000 symbols without ambiguity; {}",
        labels.join(", ")
    ))
}

fn random_frac(rng: &mut ChaCha8Rng, bits: u32) -> FixedPointFrac {
    let digits: Vec<u32> = (0..bits / 32).map(|_| rng.gen()).collect();
    FixedPointFrac::from_mantissa(&BigUint::new(digits), bits).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> TorusPoint {
    TorusPoint::new((0..dim).map(|_| random_frac(rng, 256)).collect()).unwrap()
}

fn exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let dim = rng.gen_range(1..=3);
        let gens = rng.gen_range(1..=3);
        let z = random_point(&mut rng, dim);
        let spec =
            RotationSpec::new((0..gens).map(|_| random_point(&mut rng, dim)).collect()).unwrap();
        let m: Vec<i64> = (0..gens)
            .map(|_| rng.gen_range(-(1i64 << 40)..1i64 << 40))
            .collect();
        let n: Vec<i64> = (0..gens)
            .map(|_| rng.gen_range(-(1i64 << 40)..1i64 << 40))
            .collect();
        let sum: Vec<i64> = m.iter().zip(&n).map(|(a, b)| a + b).collect();
        let lhs = rotate(&z, &spec, &sum).unwrap();
        let rhs = rotate(&rotate(&z, &spec, &m).unwrap(), &spec, &n).unwrap();
        ensure(lhs == rhs, "rotate is not a group action")?;
    }
    let fib = load("fibonacci.json");
    let champ = load("champernowne.json");
    let outputs = |w: usize| -> Result<Vec<String>, String> {
        let e = |e: symdyn::lang::LangError| e.to_string();
        let t = complexity_table(&fib, 200, &ShiftBudget::first(1_000_000).with_workers(w))
            .map_err(e)?;
        let s = max_free_size(
            &fib,
            &CoordinateSet::contiguous(31).unwrap(),
            SymbolPair::binary(),
            &ShiftBudget::first(100_000).with_workers(w),
            4,
            1 << 22,
        )
        .map_err(e)?;
        let c = classify(
            &champ,
            &BudgetProfile::new(
                ShiftBudget::first(10_000_000).with_workers(w),
                vec![4, 7, 10],
                10,
            ),
        )
        .map_err(e)?;
        Ok(vec![
            to_sorted_json(&t),
            to_sorted_json(&s),
            to_sorted_json(&c),
        ])
    };
    ensure(
        outputs(1)? == outputs(8)?,
        "outputs differ between 1 and 8 workers",
    )?;
    Ok("10^4 associativity checks exact; criteria 1-3 JSON identical for 1 and 8 workers".into())
}

fn cell_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let d = rng.gen_range(1..=3usize);
        let mut cuts: Vec<FixedPointFrac> = (0..d).map(|_| random_frac(&mut rng, 256)).collect();
        cuts.push(FixedPointFrac::zero(256).unwrap());
        cuts.sort();
        cuts.dedup();
        let hex = |f: &FixedPointFrac| ConstantValue::from(Constant::hex(f.to_hex(), 256));
        let doc = SourceDocument::Rotation {
            bits: 256,
            alphas: vec![hex(&random_frac(&mut rng, 256))],
            base: hex(&random_frac(&mut rng, 256)),
            cuts: cuts.iter().map(hex).collect(),
            guard_bits: None,
        };
        let src = doc.build().map_err(|e| e.to_string())?;
        let size = rng.gen_range(1..=12usize);
        let mut k: Vec<i64> = Vec::new();
        while k.len() < size {
            let x = rng.gen_range(-500..500);
            if !k.contains(&x) {
                k.push(x);
            }
        }
        let k = CoordinateSet::new(k).unwrap();
        let m = rng.gen_range(1_000..200_000);
        let store =
            extract_patterns(&src, &k, &ShiftBudget::first(m)).map_err(|e| e.to_string())?;
        let bound = k.len() * (cuts.len());
        ensure(
            store.len() <= bound,
            format!("case {case}: {} patterns > {bound}", store.len()),
        )?;
        worst = worst.max(store.len() as f64 / bound as f64);
    }
    Ok(format!(
        "50 codings within |K|(d+1); largest ratio {worst:.3}"
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("sturmian complexity", sturmian_complexity),
        ("sturmian freeness ceiling", sturmian_ceiling),
        ("disjunctive control", disjunctive_control),
        ("natural indicator", natural_indicator),
        ("periodic control", periodic_control),
        ("block word", kerr_li),
        ("IP interpolation", ip_interpolation),
        ("Thue-Morse", morse),
        ("sphere coding", sphere),
        ("exactness", exactness),
        ("cell bound", cell_bound),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = check();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.2}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
