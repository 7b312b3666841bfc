//! Parsing, formatting and evaluating the suite language.

use qonsager::coideal::u_env;
use qonsager::dsl::{format, format_suite, parse_expr, parse_suite};
use qonsager::qalgebra::FreeElement;

const SUITE: &str = "
# A user-written identity: q-Serre relation.
check my.serre {
  kind = identity
  lhs = c(e0, qc(e0, qc(e0, e1, 1), -1))
  rhs = 0
}
";

fn main() {
    let s = parse_suite(SUITE).unwrap();
    let text = format_suite(&s);
    print!("{text}");
    assert_eq!(parse_suite(&text).unwrap(), s);

    let ast = parse_expr("qc(e1, f1, 0) - (t1 - t1') * (q - q^-1)^-1").unwrap();
    println!("formatted: {}", format(&ast));
    let env = u_env();
    match env.eval_elem(&ast, &FreeElement::one()) {
        Ok(x) => println!("free element: {}", x.to_text()),
        Err(e) => println!("evaluation failed: {e}"),
    }

    let err = parse_expr("qc(W0 W1)").unwrap_err();
    println!("rejected: {err}");
}
