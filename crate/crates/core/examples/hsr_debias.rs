//! Half-sibling regression: remove the part of each target vector that the
//! definitional words explain.

use fairvec::debias::{hsr_debias, HsrConfig};
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
    // a few definitional words, so the regression cannot span every dimension
    let cfg = HsrConfig {
        definitional: ["she", "he", "woman", "man"].map(String::from).to_vec(),
        alpha: 1.0,
    };
    let words: Vec<String> = ["nurse", "doctor", "homemaker", "programmer"]
        .map(String::from)
        .to_vec();
    let out = hsr_debias(&e, Some(&words), &cfg)?;
    for w in &words {
        let i = e.lookup(w).unwrap();
        println!(
            "{w:<11} cos(w,g) {:+.4} -> {:+.4}",
            cosine_to_direction(&e, i, &g)?,
            cosine_to_direction(&out.embedding, i, &g)?
        );
    }
    println!("degenerate: {:?}", out.report.degenerate);
    Ok(())
}
