//! RAN debiasing of a few occupations, with the per-word objective trace.

use fairvec::debias::{ran_debias, RanConfig};
use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::{cosine_to_direction, direction_pca};
use fairvec::lexicons;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Embedding::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt"),
        Format::Text,
    )?
    .normalize()?;
    let g = direction_pca(&e, &lexicons::definitional_pairs())?;
    let words: Vec<String> = ["nurse", "homemaker", "receptionist", "engineer"]
        .map(String::from)
        .to_vec();
    let cfg = RanConfig {
        k: 8,
        ..RanConfig::default()
    };
    let out = ran_debias(&e, Some(&words), &g, &cfg)?;
    for entry in &out.report.per_word {
        let i = e.lookup(&entry.item).unwrap();
        println!(
            "{:<13} F {:.4} -> {:.4} in {:>3} steps, |Ω| = {}, cos(w,g) {:+.4} -> {:+.4}",
            entry.item,
            entry.scores["initial"],
            entry.scores["final"],
            entry.scores["iterations"],
            entry.scores["repulsion"],
            cosine_to_direction(&e, i, &g)?,
            cosine_to_direction(&out.embedding, i, &g)?,
        );
    }
    Ok(())
}
