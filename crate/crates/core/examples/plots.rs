//! All four SVG plots for the toy embedding.

use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::direction_pca;
use fairvec::lexicons;
use fairvec::viz;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Embedding::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt"),
        Format::Text,
    )?
    .normalize()?;
    let g = direction_pca(&e, &lexicons::definitional_pairs())?;
    let dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("fairvec-plots"));
    let words = [
        "nurse",
        "doctor",
        "engineer",
        "homemaker",
        "receptionist",
        "surgeon",
        "programmer",
    ];

    let cloud: Vec<(String, f64)> = viz::bias_values(&e, &g, &words)?
        .into_iter()
        .map(|(w, c)| (w, c.abs()))
        .collect();
    for path in [
        viz::neighbor_scatter(&e, &g, "nurse", 10, &dir.join("nurse-neighbors.svg"))?,
        viz::bias_bar(&e, &g, &words, &dir.join("occupations-bias.svg"))?,
        viz::pca_scatter(&e, &words, &dir.join("occupations-pca.svg"), &g)?,
        viz::word_cloud(&cloud, &dir.join("occupations-cloud.svg"))?,
    ] {
        println!("wrote {}", path.display());
    }
    Ok(())
}
