//! Higher generators in Chevalley and polynomial form, compared on a chain.

use qonsager::coideal::{descendant, Descendant, Form, Variant};
use qonsager::repmat::Chain;

fn main() {
    let chain = Chain::new(2).unwrap();
    for d in [Descendant::G1, Descendant::Wm1] {
        for v in [Variant::Printed, Variant::Amended] {
            let ch = descendant(d, Form::Chevalley, v).unwrap();
            let po = descendant(d, Form::Polynomial, v).unwrap();
            let a = chain.eval(&ch.element.scale(&po.clearing.scalar())).unwrap();
            let b = chain.eval(&po.element.scale(&ch.clearing.scalar())).unwrap();
            let ok = a.try_sub(&b).unwrap().is_zero();
            println!("{:<4} {:<8} chevalley == polynomial on 2 sites: {ok}", d.name(), v.name());
        }
    }
}
