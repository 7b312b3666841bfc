//! Presentations, coideal images, counits and coaction tables.

use qonsager::coideal::{coaction_image, counit_value, export_tables, presentation, psi_image, Algebra, Variant};

fn main() {
    let p = presentation(Algebra::Augmented, Variant::Amended);
    print!("{}", p.to_suite_text());

    for g in Algebra::Triangular.all_generators() {
        println!("{g}: psi = {}", psi_image(g).unwrap().to_text());
        println!("{g}: counit = {}", counit_value(g).unwrap().to_canonical());
    }

    let x = Algebra::Gl2Inv.generator("X").unwrap();
    for v in [Variant::Printed, Variant::Amended] {
        println!("delta({x}) [{}] = {}", v.name(), coaction_image(x, v).unwrap().to_text());
    }

    let table = export_tables(Algebra::QOnsager, Variant::Amended).unwrap();
    println!("{}", table.lines().next().unwrap_or(""));
}
