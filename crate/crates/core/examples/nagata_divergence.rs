//! The tangent derivation of Nagata's automorphism and its divergence.

use tangentia::morphism::{ia_level, tangent, DEFAULT_MAX_DEGREE};
use tangentia::script::eval_endomorphism;
use tangentia::Variety;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = Variety::polynomial(3);
    let names: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    let nagata = eval_endomorphism(
        "(x - 2*y*(x*z + y^2) - z*(x*z + y^2)^2, y + z*(x*z + y^2), z)",
        v,
        &names,
    )?;
    println!("phi   = {}", nagata.display_with(&names));
    println!("level = {}", ia_level(&nagata, DEFAULT_MAX_DEGREE));
    let t = tangent(&nagata)?;
    println!("T     = {}", t.display_with(&names));
    println!("div T = {}", t.divergence()?.display_with(&names));
    Ok(())
}
