//! A WEAT run on a small synthetic embedding where one target set leans
//! toward one attribute set.

use fairvec::embedding::Embedding;
use fairvec::metrics::{weat_with, PValueMethod, WeatSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // axis 0 separates the attribute sets, axis 1 is shared noise
    let rows = [
        ("flower", [0.9f32, 0.3, 0.1]),
        ("rose", [0.8, 0.5, 0.2]),
        ("tulip", [0.7, 0.4, 0.5]),
        ("insect", [-0.8, 0.4, 0.3]),
        ("wasp", [-0.9, 0.2, 0.3]),
        ("moth", [-0.6, 0.6, 0.4]),
        ("pleasant", [1.0, 0.1, 0.0]),
        ("lovely", [0.9, 0.2, 0.1]),
        ("unpleasant", [-1.0, 0.1, 0.0]),
        ("awful", [-0.9, 0.1, 0.2]),
    ];
    let e = Embedding::from_rows(rows.iter().map(|(w, v)| (*w, v.to_vec())))?.normalize()?;
    let words = |ws: &[&str]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>();
    let spec = WeatSpec::new(
        "flowers-insects",
        words(&["flower", "rose", "tulip"]),
        words(&["insect", "wasp", "moth"]),
        words(&["pleasant", "lovely"]),
        words(&["unpleasant", "awful"]),
    )?;
    for method in [PValueMethod::Exhaustive, PValueMethod::MonteCarlo] {
        let r = weat_with(&e, &spec, 10_000, 7, method)?;
        println!(
            "{method:?}: S = {:.4}, d = {:.4}, p = {:.4}",
            r.get("statistic").unwrap(),
            r.get("effect_size").unwrap(),
            r.get("p_value").unwrap()
        );
    }
    let swapped = weat_with(&e, &spec.swap_targets(), 0, 0, PValueMethod::Exhaustive)?;
    println!("targets swapped: d = {:.4}", swapped.get("effect_size").unwrap());
    Ok(())
}
