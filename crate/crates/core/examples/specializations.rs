//! Reduction of the generic images to the triangular, diagonal and
//! special regimes.

use qonsager::coideal::{specialization_table, specialize, psi_image, Algebra, Case, Variant};

fn main() {
    let w1 = psi_image(Algebra::QOnsager.generator("W1").unwrap()).unwrap();
    for case in [Case::Triangular, Case::Diagonal, Case::SpecialB] {
        println!("W1 in {}: {}", case.name(), specialize(&w1, case).unwrap().to_text());
    }
    for case in [Case::Triangular, Case::Diagonal, Case::SpecialB] {
        let t = specialization_table(case, Variant::Amended).unwrap();
        let ids: Vec<&str> = t.iter().map(|e| e.id.as_str()).collect();
        println!("{} table: {}", case.name(), ids.join(" "));
    }
}
