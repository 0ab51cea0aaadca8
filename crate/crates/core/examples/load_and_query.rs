//! Load an embedding, round-trip it through every format and query
//! neighbours and analogies.
//!
//! cargo run --example load_and_query [-- path/to/embedding.txt]

use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::{analogy, knn, Query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt").into());
    let e = Embedding::load(&path, Format::Auto)?.normalize()?;
    println!("{} words, {} dimensions", e.len(), e.dim());

    let dir = tempfile_dir()?;
    for format in [Format::Text, Format::Word2VecBin, Format::VocabNpy] {
        let out = dir.join(format!("copy-{format}"));
        e.save(&out, format)?;
        let back = Embedding::load(&out, format)?;
        println!(
            "{format:>13}: reloaded {} words, identical = {}",
            back.len(),
            back.matrix() == e.matrix()
        );
    }

    for n in knn(&e, Query::Word("nurse"), 5, &[] as &[&str])?.entries {
        println!("  {:<14} {:.4}", n.word, n.cosine);
    }
    println!(
        "man : programmer :: woman : {}",
        analogy(&e, "man", "programmer", "woman")?
    );
    Ok(())
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("fairvec-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
