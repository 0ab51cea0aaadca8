//! Direct bias, indirect bias, PMN, proximity bias and GIPE on the toy
//! occupations embedding.

use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::{direction_pair_diff, direction_pca};
use fairvec::lexicons;
use fairvec::metrics::{direct_bias, gipe, indirect_bias, pmn, proximity_bias};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Embedding::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt"),
        Format::Text,
    )?
    .normalize()?;
    let g = direction_pca(&e, &lexicons::definitional_pairs())?;
    let simple = direction_pair_diff(&e, "she", "he")?;
    println!(
        "cos(pca direction, she-he) = {:.4}",
        g.values().iter().zip(simple.values()).map(|(a, b)| a * b).sum::<f64>()
    );

    let jobs: Vec<String> = [
        "nurse",
        "doctor",
        "engineer",
        "homemaker",
        "receptionist",
        "surgeon",
        "astronaut",
    ]
    .map(String::from)
    .to_vec();
    let db = direct_bias(&e, &g, &jobs, 1.0)?;
    println!(
        "direct bias over occupations: {:.4} (skipped {:?})",
        db.value(),
        db.skipped
    );
    for entry in &db.breakdown {
        println!("  {:<14} cos = {:+.4}", entry.item, entry.scores["cosine"]);
    }

    let beta = indirect_bias(&e, &g, "nurse", "receptionist")?;
    println!("indirect bias nurse/receptionist: {:.4}", beta.value());
    println!("PMN(nurse, k=5): {:.2}", pmn(&e, &g, "nurse", 5)?.value());
    println!(
        "proximity bias(nurse, k=5): {:.2}",
        proximity_bias(&e, &g, "nurse", 5, 0.05)?.value()
    );
    let all = gipe(&e, &g, &jobs, 5, 0.05)?;
    println!("GIPE over occupations: {:.3}", all.value());
    println!("{}", serde_json::to_string_pretty(&all)?);
    Ok(())
}
