//! Classical loop-algebra automorphisms and the q -> 1 images.

use qonsager::coideal::{classical_automorphism, Automorphism};
use qonsager::qalgebra::{gens, FreeElement, Letter};

fn main() {
    let e1 = FreeElement::letter(Letter::E1c);
    let f1 = FreeElement::letter(Letter::F1c);
    let h = gens::comm(&e1, &f1);
    for a in Automorphism::ALL {
        let img = classical_automorphism(a, &h).unwrap();
        println!("{}([e1, f1]) = {}", a.name(), img.to_text());
    }
}
