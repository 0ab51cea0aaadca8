//! SVG plots: neighbour scatter, bias bars, PCA scatter and word cloud.
//!
//! Output is a deterministic function of the inputs. Every number is
//! written with four decimals and plotted points carry their data values in
//! `data-x` / `data-y` attributes.

mod cloud;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use thiserror::Error;

use crate::embedding::{Embedding, EmbeddingError};
use crate::geometry::{cosine_to_direction, BiasDirection, GeometryError};
use crate::metrics::{neighbours_analysis, partition_words, MetricError};
use crate::numerics::{pca, NumericsError};

pub use cloud::{layout as cloud_layout, render as render_cloud, Placed, MAX_FONT, MIN_FONT};
use svg::{color, num, Svg};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LEFT: f64 = 80.0;
const RIGHT: f64 = 40.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 70.0;

#[derive(Debug, Error)]
pub enum VizError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("nothing to plot")]
    Empty,
    #[error("word {word:?} has invalid weight {weight}")]
    InvalidWeight { word: String, weight: f64 },
    #[error("none of the requested words are in the vocabulary")]
    AllOutOfVocabulary { skipped: Vec<String> },
    #[error("need at least {required} in-vocabulary words, found {found}")]
    TooFewWords { required: usize, found: usize },
}

pub type Result<T, E = VizError> = std::result::Result<T, E>;

/// A labeled point in data coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub word: String,
    pub x: f64,
    pub y: f64,
    /// Cosine with the gender direction, used for the color.
    pub bias: f64,
}

/// Writes `content` to `path`, replacing any existing file.
pub fn write_svg(path: &Path, content: &str) -> Result<PathBuf> {
    if path.exists() {
        log::info!("overwriting {}", path.display());
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| VizError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, content).map_err(|source| VizError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

struct Frame {
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        LEFT + (x - lo) / (hi - lo) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        TOP + (1.0 - (y - lo) / (hi - lo)) * (HEIGHT - TOP - BOTTOM)
    }

    fn draw_axes(&self, svg: &mut Svg, x_label: &str, y_label: &str) {
        for i in 0..=4 {
            let f = f64::from(i) / 4.0;
            let x = self.x_range.0 + f * (self.x_range.1 - self.x_range.0);
            let y = self.y_range.0 + f * (self.y_range.1 - self.y_range.0);
            svg.line(self.px(x), TOP, self.px(x), HEIGHT - BOTTOM, "#e0e0e0", 1.0);
            svg.line(LEFT, self.py(y), WIDTH - RIGHT, self.py(y), "#e0e0e0", 1.0);
            svg.text(self.px(x), HEIGHT - BOTTOM + 18.0, 11.0, "middle", "#555555", &num(x));
            svg.text(LEFT - 8.0, self.py(y) + 4.0, 11.0, "end", "#555555", &num(y));
        }
        svg.rect(
            LEFT,
            TOP,
            WIDTH - LEFT - RIGHT,
            HEIGHT - TOP - BOTTOM,
            "none",
            " stroke=\"#888888\" stroke-width=\"1.0000\"",
        );
        if self.x_range.0 < 0.0 && self.x_range.1 > 0.0 {
            svg.line(self.px(0.0), TOP, self.px(0.0), HEIGHT - BOTTOM, "#444444", 1.5);
        }
        svg.text(
            (LEFT + WIDTH - RIGHT) / 2.0,
            HEIGHT - 20.0,
            13.0,
            "middle",
            "#222222",
            x_label,
        );
        svg.raw(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13.0000\" text-anchor=\"middle\" fill=\"#222222\" transform=\"rotate(-90 {} {})\">{}</text>",
            num(20.0),
            num((TOP + HEIGHT - BOTTOM) / 2.0),
            num(20.0),
            num((TOP + HEIGHT - BOTTOM) / 2.0),
            svg::escape(y_label)
        ));
    }
}

fn scatter(title: &str, points: &[Point], frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut svg = Svg::new(WIDTH, HEIGHT, title);
    svg.rect(0.0, 0.0, WIDTH, HEIGHT, "#ffffff", "");
    svg.text(WIDTH / 2.0, 30.0, 16.0, "middle", "#111111", title);
    frame.draw_axes(&mut svg, x_label, y_label);
    for p in points {
        let (cx, cy) = (frame.px(p.x), frame.py(p.y));
        svg.point(cx, cy, &color(p.bias), &p.word, p.x, p.y);
        svg.text(cx + 6.0, cy - 6.0, 11.0, "start", "#222222", &p.word);
    }
    svg.finish()
}

/// Neighbours of `word`: x is the cosine with `g`, y the cosine with the
/// word. Values come from [`neighbours_analysis`].
pub fn neighbor_points(e: &Embedding, g: &BiasDirection, word: &str, k: usize) -> Result<Vec<Point>> {
    let table = neighbours_analysis(e, g, word, k)?;
    Ok(table
        .breakdown
        .iter()
        .map(|row| Point {
            word: row.item.clone(),
            x: row.scores["g_cosine"],
            y: row.scores["cosine"],
            bias: row.scores["g_cosine"],
        })
        .collect())
}

pub fn neighbor_scatter_svg(e: &Embedding, g: &BiasDirection, word: &str, k: usize) -> Result<String> {
    let points = neighbor_points(e, g, word, k)?;
    let frame = Frame {
        x_range: (-1.0, 1.0),
        y_range: (-1.0, 1.0),
    };
    Ok(scatter(
        &format!("Nearest neighbours of {word}"),
        &points,
        &frame,
        "cosine with gender direction",
        &format!("cosine with {word}"),
    ))
}

pub fn neighbor_scatter(e: &Embedding, g: &BiasDirection, word: &str, k: usize, out: &Path) -> Result<PathBuf> {
    write_svg(out, &neighbor_scatter_svg(e, g, word, k)?)
}

/// Signed cosines with `g`, largest first; equal values keep input order.
pub fn bias_values<S: AsRef<str>>(e: &Embedding, g: &BiasDirection, words: &[S]) -> Result<Vec<(String, f64)>> {
    let (found, skipped) = partition_words(e, words);
    let mut bars = Vec::with_capacity(found.len());
    for i in found {
        bars.push((e.word(i).to_string(), cosine_to_direction(e, i, g)?));
    }
    if bars.is_empty() {
        return Err(VizError::AllOutOfVocabulary { skipped });
    }
    bars.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(bars)
}

pub fn bias_bar_svg<S: AsRef<str>>(e: &Embedding, g: &BiasDirection, words: &[S]) -> Result<String> {
    const ROW: f64 = 24.0;
    let bars = bias_values(e, g, words)?;
    let height = HEIGHT.max(TOP + BOTTOM + ROW * bars.len() as f64);
    let title = "Cosine with the gender direction";
    let mut svg = Svg::new(WIDTH, height, title);
    svg.rect(0.0, 0.0, WIDTH, height, "#ffffff", "");
    svg.text(WIDTH / 2.0, 30.0, 16.0, "middle", "#111111", title);
    let left = 160.0;
    let right = WIDTH - RIGHT;
    let center = (left + right) / 2.0;
    let half = (right - left) / 2.0;
    for i in 0..=4 {
        let v = -1.0 + f64::from(i) * 0.5;
        let x = center + v * half;
        svg.line(x, TOP, x, height - BOTTOM, "#e0e0e0", 1.0);
        svg.text(x, height - BOTTOM + 18.0, 11.0, "middle", "#555555", &num(v));
    }
    svg.line(center, TOP, center, height - BOTTOM, "#444444", 1.5);
    svg.text(center - half, height - 20.0, 12.0, "start", "#2166ac", "male");
    svg.text(center + half, height - 20.0, 12.0, "end", "#b2182b", "female");
    for (row, (word, value)) in bars.iter().enumerate() {
        let y = TOP + ROW * row as f64 + 4.0;
        let w = value.abs() * half;
        let x = if *value < 0.0 { center - w } else { center };
        svg.raw(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" data-word=\"{}\" data-x=\"{}\"/>",
            num(x),
            num(y),
            num(w),
            num(ROW - 8.0),
            color(*value),
            svg::escape(word),
            num(*value)
        ));
        svg.text(left - 8.0, y + ROW / 2.0, 12.0, "end", "#222222", word);
    }
    Ok(svg.finish())
}

pub fn bias_bar<S: AsRef<str>>(e: &Embedding, g: &BiasDirection, words: &[S], out: &Path) -> Result<PathBuf> {
    write_svg(out, &bias_bar_svg(e, g, words)?)
}

/// Words projected onto their own first two principal components, colored
/// by cosine with `g`.
pub fn pca_points<S: AsRef<str>>(e: &Embedding, words: &[S], g: &BiasDirection) -> Result<Vec<Point>> {
    let (found, _) = partition_words(e, words);
    if found.len() < 3 {
        return Err(VizError::TooFewWords {
            required: 3,
            found: found.len(),
        });
    }
    let mut rows = Array2::<f64>::zeros((found.len(), e.dim()));
    for (r, &i) in found.iter().enumerate() {
        for (c, &x) in e.row(i).iter().enumerate() {
            rows[[r, c]] = f64::from(x);
        }
    }
    let fit = pca(rows.view(), 2)?;
    let mut points = Vec::with_capacity(found.len());
    for (r, &i) in found.iter().enumerate() {
        let row: Vec<f64> = rows.row(r).to_vec();
        let p = fit.project(&row);
        points.push(Point {
            word: e.word(i).to_string(),
            x: p[0],
            y: p[1],
            bias: cosine_to_direction(e, i, g)?,
        });
    }
    Ok(points)
}

pub fn pca_scatter_svg<S: AsRef<str>>(e: &Embedding, words: &[S], g: &BiasDirection) -> Result<String> {
    let points = pca_points(e, words, g)?;
    let extent = points
        .iter()
        .flat_map(|p| [p.x.abs(), p.y.abs()])
        .fold(0.0, f64::max)
        .max(1e-12)
        * 1.1;
    let frame = Frame {
        x_range: (-extent, extent),
        y_range: (-extent, extent),
    };
    Ok(scatter(
        "PCA projection",
        &points,
        &frame,
        "first component",
        "second component",
    ))
}

pub fn pca_scatter<S: AsRef<str>>(e: &Embedding, words: &[S], out: &Path, g: &BiasDirection) -> Result<PathBuf> {
    write_svg(out, &pca_scatter_svg(e, words, g)?)
}

pub fn word_cloud_svg<S: AsRef<str>>(items: &[(S, f64)]) -> Result<String> {
    let placed = cloud::layout(items)?;
    Ok(cloud::render(&placed, "Word cloud"))
}

pub fn word_cloud<S: AsRef<str>>(items: &[(S, f64)], out: &Path) -> Result<PathBuf> {
    write_svg(out, &word_cloud_svg(items)?)
}
