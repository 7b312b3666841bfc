//! Laurent-rational coefficients: arithmetic, canonical text, limits.

use qonsager::coeff::{params, Assignment, Scalar, Var};

fn main() {
    let q = Scalar::q();
    let qi = Scalar::qpow(-1);
    let diff = &q - &qi;
    let sum = &q + &qi;
    let prod = &diff * &sum;
    println!("(q - q^-1)(q + q^-1) = {}", prod.to_canonical());

    let quot = prod.checked_div(&diff).unwrap();
    println!("divided back by (q - q^-1): {}", quot.to_canonical());

    let parsed = Scalar::parse(&prod.to_canonical()).unwrap();
    assert_eq!(parsed, prod);
    println!("canonical text parses back to the same value");

    println!("rho   = {}", params::rho().to_canonical());
    println!("rho_d = {}", params::rho_d().to_canonical());

    // kp*(1 + kp) / kp at kp -> 0
    let kp = Scalar::var(Var::Kp);
    let s = &kp * &(&Scalar::one() + &kp);
    println!("order kp^1 of kp(1+kp): {}", s.extract_order(Var::Kp, 1).unwrap().to_canonical());
    println!("lim kp(1+kp)/kp:       {}", s.divide_limit(Var::Kp, 1).unwrap().to_canonical());

    let at = Assignment::new().with(Var::Q, qonsager::coeff::rat(2, 1));
    println!("q - q^-1 at q = 2: {}", diff.substitute(&at).unwrap().to_canonical());
}
