//! Exact circle arithmetic: constants, rotations and boundary distances.

use symdyn::torus::{boundary_distance, rotate, Constant, RotationSpec, TorusPoint};

fn main() {
    let golden = Constant::golden().resolve(256).unwrap();
    let sqrt2 = Constant::sqrt_rational(2, 1).resolve(256).unwrap();
    println!("golden  = {:.12} ({})", golden.to_f64(), golden.to_hex());
    println!("sqrt(2) = {:.12} (fractional part)", sqrt2.to_f64());

    let spec = RotationSpec::new(vec![TorusPoint::new(vec![golden, sqrt2]).unwrap()]).unwrap();
    let z = TorusPoint::origin(2, 256).unwrap();
    let far = rotate(&z, &spec, &[1 << 40]).unwrap();
    let back = rotate(&far, &spec, &[-(1 << 40)]).unwrap();
    assert_eq!(back, z);
    println!("2^40 steps there and back return exactly to the origin");

    let third = Constant::rational(1, 3).resolve(256).unwrap();
    let cuts = [Constant::rational(0, 1).resolve(256).unwrap(), third];
    let x = golden.mul_int(7);
    println!(
        "7·golden mod 1 = {:.6}, distance to the cuts {{0, 1/3}} = {:.6}",
        x.to_f64(),
        boundary_distance(&x, &cuts).to_f64()
    );
}
