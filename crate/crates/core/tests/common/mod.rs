#![allow(dead_code)]

use fairvec::embedding::Embedding;
use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform entries in [-1, 1), rows scaled to unit length.
pub fn unit_rows(rng: &mut impl Rng, v: usize, d: usize) -> Array2<f32> {
    let mut m = Array2::<f32>::zeros((v, d));
    for mut row in m.outer_iter_mut() {
        row.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        let n = row.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt() as f32;
        row.iter_mut().for_each(|x| *x /= n);
    }
    m
}

/// `w0 … w{v-1}` with random unit rows.
pub fn random_embedding(seed: u64, v: usize, d: usize) -> Embedding {
    let mut r = rng(seed);
    let vocab = (0..v).map(|i| format!("w{i}")).collect();
    Embedding::new(vocab, unit_rows(&mut r, v, d)).unwrap()
}

pub fn row(e: &Embedding, word: &str) -> Vec<f64> {
    e.row_of(word).unwrap().iter().map(|&x| f64::from(x)).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cos(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (norm(a) * norm(b))
}

/// Full-sort neighbour oracle: indices by descending cosine, ties by
/// ascending index, query and zero rows excluded.
pub fn brute_force_knn(e: &Embedding, q: &[f64], k: usize, exclude: &[usize]) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = (0..e.len())
        .filter(|i| !exclude.contains(i))
        .filter_map(|i| {
            let r: Vec<f64> = e.row(i).iter().map(|&x| f64::from(x)).collect();
            let n = norm(&r);
            (n > 0.0).then(|| (dot(&r, q) / (n * norm(q)), i))
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    scored.into_iter().take(k).map(|(_, i)| i).collect()
}
