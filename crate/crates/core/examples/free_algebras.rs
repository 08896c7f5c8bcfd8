//! Arithmetic in the four supported varieties.

use tangentia::{Element, Variety};

fn main() -> tangentia::Result<()> {
    for v in [
        Variety::polynomial(2),
        Variety::associative(2),
        Variety::lie(2),
        Variety::metabelian(3),
    ] {
        let names = v.default_names();
        let (a, b) = (Element::var(v, 0), Element::var(v, 1));
        // `*` is the bracket in the Lie varieties
        let ab = a.checked_mul(&b)?;
        let aab = a.checked_mul(&ab)?;
        println!("{v}");
        println!("  x1*x2       = {}", ab.display_with(&names));
        println!("  x1*(x1*x2)  = {}", aab.display_with(&names));
        println!("  degree      = {:?}", aab.degree());
    }

    // the Jacobi identity holds on the nose
    let v = Variety::lie(3);
    let x = |i| Element::var(v, i);
    let jac = &(&(&x(0) * &(&x(1) * &x(2))) + &(&x(1) * &(&x(2) * &x(0)))) + &(&x(2) * &(&x(0) * &x(1)));
    println!("Jacobi sum in {v}: {jac}");
    Ok(())
}
