//! A minimal SVG writer with a linear chart frame.
//!
//! Coordinates are written with three decimals so output is byte-stable.

use std::fmt::Write as _;

use super::format::sig;

fn esc(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn n(v: f64) -> String {
    let s = format!("{v:.3}");
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        let mut svg = Self {
            width,
            height,
            body: String::new(),
        };
        svg.rect(0.0, 0.0, width, height, "#ffffff", None);
        svg
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: Option<&str>) {
        let stroke = stroke
            .map(|s| format!(r#" stroke="{s}""#))
            .unwrap_or_default();
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"{stroke}/>"#,
            n(x),
            n(y),
            n(w),
            n(h)
        );
    }

    pub fn line(&mut self, a: [f64; 2], b: [f64; 2], stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{}"/>"#,
            n(a[0]),
            n(a[1]),
            n(b[0]),
            n(b[1]),
            n(width)
        );
    }

    pub fn circle(&mut self, c: [f64; 2], r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
            n(c[0]),
            n(c[1]),
            n(r)
        );
    }

    pub fn ring(&mut self, c: [f64; 2], r: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
            n(c[0]),
            n(c[1]),
            n(r),
            n(width)
        );
    }

    pub fn polyline(&mut self, pts: &[[f64; 2]], stroke: &str, width: f64, dash: Option<&str>) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{},{}", n(p[0]), n(p[1])))
            .collect();
        let dash = dash
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{}"{dash}/>"#,
            coords.join(" "),
            n(width)
        );
    }

    pub fn polygon(&mut self, pts: &[[f64; 2]], fill: &str, opacity: f64) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{},{}", n(p[0]), n(p[1])))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" fill-opacity="{}" stroke="none"/>"#,
            coords.join(" "),
            n(opacity)
        );
    }

    pub fn text(&mut self, at: [f64; 2], size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="{anchor}">{}</text>"#,
            n(at[0]),
            n(at[1]),
            n(size),
            esc(content)
        );
    }

    pub fn vertical_text(&mut self, at: [f64; 2], size: f64, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="{}" text-anchor="middle" transform="rotate(-90 {x} {y})">{}</text>"#,
            n(size),
            esc(content),
            x = n(at[0]),
            y = n(at[1]),
        );
    }

    /// A line with a filled triangular head at `b`.
    pub fn arrow(&mut self, a: [f64; 2], b: [f64; 2], stroke: &str, width: f64) {
        self.line(a, b, stroke, width);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        if len == 0.0 {
            return;
        }
        let (ux, uy) = (dx / len, dy / len);
        let head = (4.0 * width).max(6.0).min(0.4 * len);
        let base = [b[0] - head * ux, b[1] - head * uy];
        let half = 0.5 * head;
        self.polygon(
            &[
                b,
                [base[0] - half * uy, base[1] + half * ux],
                [base[0] + half * uy, base[1] - half * ux],
            ],
            stroke,
            1.0,
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{}</svg>\n",
            self.body,
            w = n(self.width),
            h = n(self.height)
        )
    }
}

/// Maps a data rectangle onto a pixel rectangle, y up.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl Frame {
    /// A frame over the given ranges with room for axis labels; empty or
    /// zero-width ranges are widened.
    pub fn new(
        x_range: (f64, f64),
        y_range: (f64, f64),
        left: f64,
        top: f64,
        width: f64,
        height: f64,
    ) -> Self {
        Self {
            x_range: widen(x_range),
            y_range: widen(y_range),
            left,
            top,
            width,
            height,
        }
    }

    pub fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * self.width
    }

    pub fn py(&self, y: f64) -> f64 {
        self.top + (self.y_range.1 - y) / (self.y_range.1 - self.y_range.0) * self.height
    }

    pub fn at(&self, x: f64, y: f64) -> [f64; 2] {
        [self.px(x), self.py(y)]
    }

    /// Plot border, five ticks per axis, labels and a title.
    pub fn axes(&self, svg: &mut Svg, title: &str, x_label: &str, y_label: &str) {
        svg.rect(
            self.left,
            self.top,
            self.width,
            self.height,
            "none",
            Some("#333333"),
        );
        for i in 0..5 {
            let t = i as f64 / 4.0;
            let xv = self.x_range.0 + t * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + t * (self.y_range.1 - self.y_range.0);
            let (x, y) = (self.px(xv), self.py(yv));
            let bottom = self.top + self.height;
            svg.line([x, bottom], [x, bottom + 4.0], "#333333", 1.0);
            svg.text([x, bottom + 16.0], 10.0, "middle", &sig(xv, 3));
            svg.line([self.left - 4.0, y], [self.left, y], "#333333", 1.0);
            svg.text([self.left - 6.0, y + 3.5], 10.0, "end", &sig(yv, 3));
        }
        svg.text(
            [self.left + 0.5 * self.width, self.top - 10.0],
            13.0,
            "middle",
            title,
        );
        svg.text(
            [self.left + 0.5 * self.width, self.top + self.height + 34.0],
            11.0,
            "middle",
            x_label,
        );
        svg.vertical_text(
            [self.left - 44.0, self.top + 0.5 * self.height],
            11.0,
            y_label,
        );
    }
}

fn widen((lo, hi): (f64, f64)) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Minimum and maximum of finite values, padded by 5% on each side.
pub fn padded_range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return (0.0, 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Viridis sampled at nine evenly spaced stops.
const VIRIDIS: [[u8; 3]; 9] = [
    [0x44, 0x01, 0x54],
    [0x47, 0x2d, 0x7b],
    [0x3b, 0x52, 0x8b],
    [0x2c, 0x72, 0x8e],
    [0x21, 0x91, 0x8c],
    [0x28, 0xae, 0x80],
    [0x5e, 0xc9, 0x62],
    [0xad, 0xdc, 0x30],
    [0xfd, 0xe7, 0x25],
];

/// Viridis color for `t` in `[0, 1]`, linearly interpolated between stops.
pub fn viridis(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let pos = t * (VIRIDIS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(VIRIDIS.len() - 2);
    let f = pos - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|k| {
            let a = f64::from(VIRIDIS[i][k]);
            let b = f64::from(VIRIDIS[i + 1][k]);
            (a + f * (b - a)).round() as u8
        })
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Categorical palette for cluster ids.
pub fn category_color(i: usize) -> &'static str {
    const PALETTE: [&str; 8] = [
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    ];
    PALETTE[i % PALETTE.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(viridis(0.0), "#440154");
        assert_eq!(viridis(1.0), "#fde725");
        assert_eq!(viridis(0.5), "#21918c");
        assert_eq!(viridis(f64::NAN), "#440154");
    }

    #[test]
    fn frame_maps_corners() {
        let f = Frame::new((0.0, 2.0), (-1.0, 1.0), 10.0, 20.0, 100.0, 50.0);
        assert_eq!(f.at(0.0, 1.0), [10.0, 20.0]);
        assert_eq!(f.at(2.0, -1.0), [110.0, 70.0]);
        let flat = Frame::new((3.0, 3.0), (0.0, 1.0), 0.0, 0.0, 10.0, 10.0);
        assert!(flat.px(3.0).is_finite());
    }

    #[test]
    fn text_is_escaped() {
        let mut svg = Svg::new(10.0, 10.0);
        svg.text([0.0, 0.0], 10.0, "start", "a<b & c");
        assert!(svg.finish().contains("a&lt;b &amp; c"));
    }
}
