//! Open-chain Hamiltonian with a diagonal boundary term and the far-end
//! support of its bracket with the coideal generators.

use qonsager::coideal::{psi_image, Algebra};
use qonsager::repmat::{hamiltonian, support, BoundaryParams, Chain};

fn main() {
    let n = 3;
    let p = BoundaryParams::symbolic();
    let h = hamiltonian(n, &p).unwrap();
    println!("H on {n} sites with {p}: {} nonzero", h.matrix.nnz());

    let chain = Chain::new(n).unwrap();
    for name in ["W0", "W1"] {
        let g = Algebra::QOnsager.generator(name).unwrap();
        let w = chain.operator(&psi_image(g).unwrap(), name).unwrap();
        let br = h.commutator(&w).unwrap();
        println!("[H, {name}] support: {:?}", support(&br));
    }
}
