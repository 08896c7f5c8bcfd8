//! Degree bookkeeping and certificates for polynilpotent class sequences.

use tangentia::wildness::{build_polynilpotent_witness, polynilpotent_report, DEFAULT_EXPANSION_LIMIT};

fn main() -> tangentia::Result<()> {
    for c in [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 2]] {
        match polynilpotent_report(&c) {
            Err(e) => println!("{c:?}: {e}"),
            Ok(r) => println!(
                "{c:?}: degrees {:?}, product {}, inequality {} < {}",
                r.degrees, r.product, r.inequality_lhs, r.product
            ),
        }
    }

    let w = build_polynilpotent_witness(&[1, 2], 3, DEFAULT_EXPANSION_LIMIT)?;
    let names = tangentia::Variety::lie(3).default_names();
    if let Some(u) = &w.u {
        println!("u = {}", u.display_with(&names));
    }
    if let Some(cert) = w.certify()? {
        println!(
            "{} with witness {}",
            cert.verdict,
            cert.witness.unwrap().display_with(&names)
        );
    }
    Ok(())
}
