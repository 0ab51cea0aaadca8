//! Word cloud layout on an Archimedean spiral.

use super::svg::{num, Svg};
use super::{VizError, HEIGHT, WIDTH};

pub const MIN_FONT: f64 = 10.0;
pub const MAX_FONT: f64 = 48.0;
/// Approximate glyph advance as a fraction of the font size.
const GLYPH_WIDTH: f64 = 0.6;
const PADDING: f64 = 2.0;
/// Radius gained per radian of spiral.
const SPIRAL_STEP: f64 = 1.5;
const ANGLE_STEP: f64 = 0.05;

/// A placed word; `(x, y)` is the box center.
#[derive(Clone, Debug, PartialEq)]
pub struct Placed {
    pub word: String,
    pub weight: f64,
    pub font_size: f64,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Placed {
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.x - self.width / 2.0,
            self.y - self.height / 2.0,
            self.x + self.width / 2.0,
            self.y + self.height / 2.0,
        )
    }

    /// Axis-aligned overlap of the padded boxes.
    pub fn overlaps(&self, other: &Placed) -> bool {
        let (ax0, ay0, ax1, ay1) = self.bounds();
        let (bx0, by0, bx1, by1) = other.bounds();
        ax0 < bx1 + PADDING && bx0 < ax1 + PADDING && ay0 < by1 + PADDING && by0 < ay1 + PADDING
    }
}

/// Places words heaviest first (stable, so equal weights keep input
/// order). The first word sits at the canvas center; each later word takes
/// the first spiral position whose box clears every placed box.
pub fn layout<S: AsRef<str>>(items: &[(S, f64)]) -> Result<Vec<Placed>, VizError> {
    if items.is_empty() {
        return Err(VizError::Empty);
    }
    if let Some((w, weight)) = items.iter().find(|(_, x)| !(*x >= 0.0) || !x.is_finite()) {
        return Err(VizError::InvalidWeight {
            word: w.as_ref().to_string(),
            weight: *weight,
        });
    }
    let max = items.iter().map(|(_, x)| *x).fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[b].1.total_cmp(&items[a].1));

    let (cx, cy) = (WIDTH / 2.0, HEIGHT / 2.0);
    let mut placed: Vec<Placed> = Vec::with_capacity(items.len());
    for i in order {
        let (word, weight) = (items[i].0.as_ref(), items[i].1);
        let font_size = if max > 0.0 {
            MIN_FONT + (MAX_FONT - MIN_FONT) * weight / max
        } else {
            MIN_FONT
        };
        let mut candidate = Placed {
            word: word.to_string(),
            weight,
            font_size,
            x: cx,
            y: cy,
            width: GLYPH_WIDTH * font_size * word.chars().count().max(1) as f64,
            height: font_size,
        };
        let mut t = 0.0f64;
        while placed.iter().any(|p| p.overlaps(&candidate)) {
            t += ANGLE_STEP;
            candidate.x = cx + SPIRAL_STEP * t * t.cos();
            candidate.y = cy + SPIRAL_STEP * t * t.sin();
        }
        placed.push(candidate);
    }
    Ok(placed)
}

/// Renders a layout; the view box grows as needed to show every word.
pub fn render(placed: &[Placed], title: &str) -> String {
    let margin = 10.0;
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, WIDTH, HEIGHT);
    for p in placed {
        let (a, b, c, d) = p.bounds();
        x0 = x0.min(a - margin);
        y0 = y0.min(b - margin);
        x1 = x1.max(c + margin);
        y1 = y1.max(d + margin);
    }
    let mut svg = Svg::new(WIDTH, HEIGHT, title);
    svg.set_view_box(x0, y0, x1 - x0, y1 - y0);
    svg.rect(x0, y0, x1 - x0, y1 - y0, "#ffffff", "");
    for p in placed {
        svg.raw(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\" fill=\"#333333\" data-weight=\"{}\">{}</text>",
            num(p.x),
            num(p.y),
            num(p.font_size),
            num(p.weight),
            super::svg::escape(&p.word)
        ));
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word_centered() {
        let placed = layout(&[("nurse", 1.0)]).unwrap();
        assert_eq!((placed[0].x, placed[0].y), (WIDTH / 2.0, HEIGHT / 2.0));
        assert_eq!(placed[0].font_size, MAX_FONT);
    }

    #[test]
    fn font_scale_and_zero_weights() {
        let placed = layout(&[("a", 2.0), ("b", 1.0), ("c", 0.0)]).unwrap();
        let size = |w: &str| placed.iter().find(|p| p.word == w).unwrap().font_size;
        assert_eq!(size("a"), 48.0);
        assert_eq!(size("b"), 29.0);
        assert_eq!(size("c"), 10.0);
        let flat = layout(&[("a", 0.0), ("b", 0.0)]).unwrap();
        assert!(flat.iter().all(|p| p.font_size == MIN_FONT));
    }

    #[test]
    fn ties_keep_input_order_and_no_overlap() {
        let items: Vec<(String, f64)> = (0..40).map(|i| (format!("word{i}"), 1.0)).collect();
        let placed = layout(&items).unwrap();
        for (p, (w, _)) in placed.iter().zip(&items) {
            assert_eq!(&p.word, w);
        }
        for i in 0..placed.len() {
            for j in i + 1..placed.len() {
                assert!(!placed[i].overlaps(&placed[j]), "{i} {j}");
            }
        }
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(matches!(layout(&[("a", -1.0)]), Err(VizError::InvalidWeight { .. })));
        assert!(matches!(layout::<&str>(&[]), Err(VizError::Empty)));
    }
}
