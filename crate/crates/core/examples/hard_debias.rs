//! Hard debiasing with the bundled lexicons, then the same analogy before
//! and after.

use fairvec::debias::{hard_debias, HardDebiasConfig};
use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::analogy;
use fairvec::metrics::direct_bias;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Embedding::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt"),
        Format::Text,
    )?
    .normalize()?;
    let cfg = HardDebiasConfig::default();
    let g = cfg.direction.build(&e)?;
    let out = hard_debias(&e, None, &cfg)?;

    // equalized pairs keep their gender component, so measure the rest
    let paired: Vec<String> = cfg
        .equalize_pairs
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect();
    let neutral: Vec<String> = out
        .report
        .processed
        .iter()
        .filter(|w| !paired.contains(w))
        .cloned()
        .collect();
    println!(
        "neutralized {} words, skipped {}",
        neutral.len(),
        out.report.skipped.len()
    );
    println!("direct bias before: {:.4}", direct_bias(&e, &g, &neutral, 1.0)?.value());
    println!(
        "direct bias after:  {:.6}",
        direct_bias(&out.embedding, &g, &neutral, 1.0)?.value()
    );
    println!(
        "man : programmer :: woman : {} (before)",
        analogy(&e, "man", "programmer", "woman")?
    );
    println!(
        "man : programmer :: woman : {} (after)",
        analogy(&out.embedding, "man", "programmer", "woman")?
    );
    Ok(())
}
