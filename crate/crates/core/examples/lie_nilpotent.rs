//! A certificate of absolute wildness modulo a term of the lower central series.

use tangentia::wildness::{detect_divergence_wild, IdealTag, QuotientContext};
use tangentia::{Element, Endomorphism, Variety};

fn main() -> tangentia::Result<()> {
    let v = Variety::lie(3);
    let names = v.default_names();
    let x = |i| Element::var(v, i);
    let eps = Endomorphism::new(v, vec![&x(0) + &(&x(0) * &x(1)), x(1), x(2)])?;

    for class in [1, 3, 5] {
        let ctx = QuotientContext::new(v, IdealTag::NilpotentClass { class })?;
        let cert = detect_divergence_wild(&eps, &ctx)?;
        println!("class {class}: {}", cert.verdict);
        for h in &cert.hypotheses {
            println!("  [{}] {}: {}", if h.passed { "ok" } else { "--" }, h.name, h.detail);
        }
        if let Some(w) = &cert.witness {
            println!("  witness {}", w.display_with(&names));
        }
    }
    Ok(())
}
