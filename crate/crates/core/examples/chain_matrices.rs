//! Chain representation: evaluate an element on N sites, export and
//! re-import the coordinate list.

use qonsager::qalgebra::gens;
use qonsager::repmat::{support, Chain, SparseMatrix};

fn main() {
    let chain = Chain::new(3).unwrap();
    let x = gens::qcomm(&gens::e1(), &gens::f1(), 0);
    let m = chain.eval(&x).unwrap();
    println!("[e1, f1] on 3 sites: {}x{}, {} nonzero", m.dim(), m.dim(), m.nnz());

    let t1 = chain.eval(&gens::t1()).unwrap();
    assert!(t1.is_diagonal());

    // Multiplicativity of the representation.
    let ab = chain.eval(&(&gens::e0() * &gens::f0())).unwrap();
    let a_b = chain.eval(&gens::e0()).unwrap().try_mul(&chain.eval(&gens::f0()).unwrap()).unwrap();
    assert_eq!(ab, a_b);

    let text = m.to_coordinate_text();
    println!("coordinate text (first lines):");
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    let back = SparseMatrix::from_coordinate_text(&text).unwrap();
    assert_eq!(back, m);
    println!("round trip ok");

    let op = chain.operator(&gens::e1(), "e1").unwrap();
    println!("support of e1 on 3 sites: {:?}", support(&op));
}
