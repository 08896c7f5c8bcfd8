//! Sampling the degree-one tangent space of a generated subgroup.

use tangentia::wildness::{standard_generators, tangent_span, GeneratorFamily, SpanOptions};
use tangentia::Variety;

fn main() -> tangentia::Result<()> {
    let v = Variety::polynomial(3);
    let mut gens = standard_generators(v, GeneratorFamily::Affine)?;
    gens.extend(standard_generators(v, GeneratorFamily::ElementaryQuadratic)?);
    let r = tangent_span(&gens, 1, 500, 1, &SpanOptions::default())?;
    println!("{} generators, {} samples, {} hits", gens.len(), r.samples, r.hits);
    println!("rank {} ({:?})", r.rank, r.diagnostics);
    let names = v.default_names();
    for b in r.basis.iter().take(5) {
        println!("  {}", b.display_with(&names));
    }
    Ok(())
}
