//! Labelled chain operators as written by `qonsager emit`.

use qonsager::repmat::ChainOperator;
use qonsager::verify::{emit_labels, emit_operator};

fn main() {
    println!("labels: {}", emit_labels().join(" "));
    let op = emit_operator("psi.W0", 2).unwrap();
    let doc = op.to_json();
    let back = ChainOperator::from_json(&doc).unwrap();
    assert_eq!(back.matrix, op.matrix);
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    let expr = emit_operator("expr:qc(e0, f0, 1)", 2).unwrap();
    print!("{}", expr.matrix.to_coordinate_text());
}
