//! A new debiaser behind the shared `Debiaser` interface: shrink each
//! word's gender component by a fixed factor instead of removing it.

use fairvec::debias::{DebiasOutcome, DebiasReport, Debiaser, HardDebias};
use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::{direction_pca, BiasDirection};
use fairvec::lexicons;
use fairvec::metrics::direct_bias;

struct Shrink {
    direction: BiasDirection,
    keep: f64,
}

impl Debiaser for Shrink {
    fn name(&self) -> &'static str {
        "shrink"
    }

    fn run(&self, e: &Embedding, words: Option<&[String]>) -> fairvec::debias::Result<DebiasOutcome> {
        let g = self.direction.values();
        let mut m = e.matrix().to_owned();
        let mut report = DebiasReport {
            method: self.name().into(),
            ..Default::default()
        };
        let targets: Vec<String> = words.map(<[String]>::to_vec).unwrap_or_else(|| e.vocab().to_vec());
        for w in targets {
            let Some(i) = e.lookup(&w) else {
                report.skipped.push(w);
                continue;
            };
            let mut row: Vec<f64> = m.row(i).iter().map(|&x| f64::from(x)).collect();
            let p: f64 = row.iter().zip(g).map(|(x, gi)| x * gi).sum();
            row.iter_mut()
                .zip(g)
                .for_each(|(x, gi)| *x -= (1.0 - self.keep) * p * gi);
            let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            m.row_mut(i)
                .iter_mut()
                .zip(&row)
                .for_each(|(dst, x)| *dst = (x / n) as f32);
            report.processed.push(w);
        }
        Ok(DebiasOutcome {
            embedding: e.with_matrix(m)?,
            report,
        })
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = Embedding::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt"),
        Format::Text,
    )?
    .normalize()?;
    let g = direction_pca(&e, &lexicons::definitional_pairs())?;
    let jobs: Vec<String> = ["nurse", "doctor", "engineer", "homemaker", "receptionist"]
        .map(String::from)
        .to_vec();
    let debiasers: Vec<Box<dyn Debiaser>> = vec![
        Box::new(Shrink {
            direction: g.clone(),
            keep: 0.5,
        }),
        Box::new(HardDebias::default()),
    ];
    println!("before: direct bias {:.4}", direct_bias(&e, &g, &jobs, 1.0)?.value());
    for d in &debiasers {
        let out = d.run(&e, Some(&jobs))?;
        println!(
            "{:>6}: direct bias {:.4}",
            d.name(),
            direct_bias(&out.embedding, &g, &jobs, 1.0)?.value()
        );
    }
    Ok(())
}
