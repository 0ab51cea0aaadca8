//! Minimal SVG writer with fixed number formatting.

use std::fmt::Write as _;

/// Exactly four decimals, without a negative zero.
pub fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Diverging scale for cosines: blue at −1, gray at 0, red at +1.
pub fn color(cosine: f64) -> String {
    const NEG: [f64; 3] = [33.0, 102.0, 172.0];
    const MID: [f64; 3] = [190.0, 190.0, 190.0];
    const POS: [f64; 3] = [178.0, 24.0, 43.0];
    let t = cosine.clamp(-1.0, 1.0);
    let (from, to, s) = if t < 0.0 { (MID, NEG, -t) } else { (MID, POS, t) };
    let c: Vec<u8> = (0..3)
        .map(|i| (from[i] + (to[i] - from[i]) * s).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

pub struct Svg {
    body: String,
    width: f64,
    height: f64,
    view_box: (f64, f64, f64, f64),
}

impl Svg {
    pub fn new(width: f64, height: f64, title: &str) -> Self {
        let mut svg = Svg {
            body: String::new(),
            width,
            height,
            view_box: (0.0, 0.0, width, height),
        };
        svg.raw(&format!("<title>{}</title>", escape(title)));
        svg
    }

    pub fn set_view_box(&mut self, x: f64, y: f64, w: f64, h: f64) {
        self.view_box = (x, y, w, h);
        self.width = w;
        self.height = h;
    }

    pub fn raw(&mut self, element: &str) {
        self.body.push_str("  ");
        self.body.push_str(element);
        self.body.push('\n');
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, extra: &str) {
        let _ = writeln!(
            self.body,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"{}/>",
            num(x),
            num(y),
            num(w),
            num(h),
            fill,
            extra
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            stroke,
            num(width)
        );
    }

    /// `anchor` is `start`, `middle` or `end`.
    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, fill: &str, content: &str) {
        let _ = writeln!(
            self.body,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"{}\" fill=\"{}\">{}</text>",
            num(x),
            num(y),
            num(size),
            anchor,
            fill,
            escape(content)
        );
    }

    pub fn point(&mut self, cx: f64, cy: f64, fill: &str, word: &str, data_x: f64, data_y: f64) {
        let _ = writeln!(
            self.body,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"4.0000\" fill=\"{}\" data-word=\"{}\" data-x=\"{}\" data-y=\"{}\"/>",
            num(cx),
            num(cy),
            fill,
            escape(word),
            num(data_x),
            num(data_y)
        );
    }

    pub fn finish(self) -> String {
        let (x, y, w, h) = self.view_box;
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n{}</svg>\n",
            num(self.width),
            num(self.height),
            num(x),
            num(y),
            num(w),
            num(h),
            self.body
        )
    }
}
