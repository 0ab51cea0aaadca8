//! Word-level and global reports, printed as text; plots go to a temp dir.

use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::direction_pca;
use fairvec::lexicons;
use fairvec::report::{global_report, render, word_report, RenderFormat, WordReportOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt");
    let e = Embedding::load(path, Format::Text)?.normalize()?;
    let g = direction_pca(&e, &lexicons::definitional_pairs())?;
    let out = std::env::temp_dir().join("fairvec-reports");

    let options = WordReportOptions { k: 8, theta: 0.05 };
    let word = word_report(&e, &g, "nurse", &options, Some(&out))?;
    print!("{}", render(&word, RenderFormat::Text));
    println!();
    print!("{}", render(&global_report(&e, &g, 5, path)?, RenderFormat::Text));
    for a in &word.attachments {
        println!("wrote {}", a.display());
    }
    Ok(())
}
