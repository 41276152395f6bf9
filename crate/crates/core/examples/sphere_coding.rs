//! Sphere codings on T^2 with a radius kept clear of the sampled orbit.

use symdyn::lang::{projection_growth, PrefixFamily, ShiftBudget};
use symdyn::sources::{choose_safe_radius, SphereCoding, SymbolicSource};
use symdyn::torus::{Constant, SqFrac, TorusPoint};

fn main() {
    let bits = 256;
    let point = |cs: [Constant; 2]| {
        TorusPoint::new(cs.iter().map(|c| c.resolve(bits).unwrap()).collect()).unwrap()
    };
    let alpha = point([Constant::golden(), Constant::sqrt_rational(2, 1)]);
    let y0 = point([Constant::rational(0, 1), Constant::rational(0, 1)]);
    let center = point([Constant::rational(1, 2), Constant::rational(1, 3)]);
    let r_min = Constant::rational(1, 10).resolve(bits).unwrap();
    let r_max = Constant::rational(2, 5).resolve(bits).unwrap();
    let delta = SqFrac::pow2_neg(40, 2 * bits);

    let safe = choose_safe_radius(&alpha, &y0, &center, 100_000, &r_min, &r_max, &delta).unwrap();
    println!(
        "r^2 = {:.9}, margin {:.3e}, {} orbit points in range",
        safe.sq_radius.to_f64(),
        safe.margin.to_f64(),
        safe.obstructions
    );

    let src = SymbolicSource::Sphere(
        SphereCoding::new(alpha, y0, center, safe.sq_radius, delta).unwrap(),
    );
    let cells = src.materialize(-100_000..100_000, 4).unwrap();
    let ones = cells.iter().filter(|c| **c == Some(1)).count();
    println!(
        "{} symbols, {} inside, {} ambiguous",
        cells.len(),
        ones,
        cells.iter().filter(|c| c.is_none()).count()
    );

    for fam in PrefixFamily::defaults() {
        let g = projection_growth(
            &src,
            &fam.prefixes(12).unwrap(),
            &ShiftBudget::range(-100_000, 99_000),
        )
        .unwrap();
        println!("{:<13} {}", fam.name(), g.fit.label.name());
    }
}
