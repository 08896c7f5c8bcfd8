//! Fox derivatives, Jacobian matrices and the chain rule.

use tangentia::morphism::{chain_rule_check, compose};
use tangentia::{fox_derivative, Element, Endomorphism, Variety};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = Variety::associative(2);
    let names = vec!["x".to_string(), "y".to_string()];
    let (x, y) = (Element::var(v, 0), Element::var(v, 1));

    let f = &(&x * &y) * &x;
    for i in 0..2 {
        println!("d(xyx)/d{} = {}", names[i], fox_derivative(&f, i)?.display_with(&names));
    }

    let phi = Endomorphism::new(v, vec![&x + &(&y * &y), y.clone()])?;
    let psi = Endomorphism::new(v, vec![x.clone(), &y + &(&x * &x)])?;
    let j = compose(&phi, &psi)?.jacobian()?;
    for row in j.display_with(&names) {
        println!("  [{}]", row.join(", "));
    }
    println!("chain rule holds: {}", chain_rule_check(&phi, &psi)?);
    Ok(())
}
