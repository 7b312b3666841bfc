//! Free algebra words, q-commutators, coproduct, counit and antipode.

use qonsager::qalgebra::{antipode, coproduct, counit, gens, FreeElement, Letter};

fn main() {
    let e0 = gens::e0();
    let e1 = gens::e1();
    let x = gens::qcomm(&e0, &e1, 1);
    println!("qc(e0, e1, 1) = {}", x.to_text());

    let d = coproduct(&x, 2, false).unwrap();
    println!("coproduct    = {}", d.to_text());
    println!("counit       = {}", counit(&x).to_canonical());
    println!("antipode(e1) = {}", antipode(&e1).to_text());

    // The coproduct is multiplicative.
    let a = FreeElement::from_letters(&[Letter::E1, Letter::F1]);
    let b = gens::t0();
    let lhs = coproduct(&(&a * &b), 2, false).unwrap();
    let rhs = coproduct(&a, 2, false).unwrap().mul(&coproduct(&b, 2, false).unwrap());
    assert!(lhs.add(&rhs.scale(&qonsager::coeff::Scalar::int(-1))).is_zero());
    println!("coproduct(e1 f1 t0) = coproduct(e1 f1) coproduct(t0)");

    // Three-fold coproduct, which the chain representation is built on.
    println!("coproduct^3(e1) = {}", coproduct(&e1, 3, false).unwrap().to_text());
}
