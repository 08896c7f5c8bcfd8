//! Truncated inverses and exact inverses of elementary maps.

use num::One;
use tangentia::morphism::{compose_truncated, truncated_inverse, Automorphism};
use tangentia::{Element, Endomorphism, Rational, Variety};

fn main() -> tangentia::Result<()> {
    let v = Variety::associative(2);
    let names = v.default_names();
    let (a, b) = (Element::var(v, 0), Element::var(v, 1));

    let phi = Endomorphism::new(v, vec![&a + &(&a * &b), b.clone()])?;
    for k in [2, 4, 6] {
        let inv = truncated_inverse(&phi, k)?;
        let id = compose_truncated(&phi, &inv, k)?;
        println!(
            "k = {k}: inverse {}  identity {}",
            inv.display_with(&names),
            id.is_identity()
        );
    }

    let e = Automorphism::elementary(v, 0, Rational::one(), &b * &(&b * &b))?;
    println!(
        "elementary {:?}: {}",
        e.exactness(),
        e.inverse_map().display_with(&names)
    );
    Ok(())
}
