//! The commutator test in two associative variables modulo the identities of 2x2 matrices.

use tangentia::wildness::{detect_rank2_associative, IdealTag, QuotientContext};
use tangentia::{Element, Endomorphism, Variety};

fn main() -> tangentia::Result<()> {
    let v = Variety::associative(2);
    let names = v.default_names();
    let (a, b) = (Element::var(v, 0), Element::var(v, 1));
    let c = a.commutator(&b)?;
    let phi = Endomorphism::new(v, vec![&a + &(&c * &c), b])?;

    let ctx = QuotientContext::new(v, IdealTag::VarM2)?;
    let cert = detect_rank2_associative(&phi, &ctx)?;
    println!("{}", cert.verdict);
    for line in &cert.trace {
        println!("  {line}");
    }
    println!("witness {}", cert.witness.unwrap().display_with(&names));
    Ok(())
}
