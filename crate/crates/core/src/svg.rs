//! Minimal deterministic SVG line charts for profile and decay plots.
//!
//! Output is a plain standalone SVG with one polyline per series; identical
//! input produces byte-identical output.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct PlotOptions {
    pub title: String,
    /// Plot against ln x instead of x; requires positive x values.
    pub log_x: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions { title: String::new(), log_x: false, width: 640, height: 420 }
    }
}

const PALETTE: [&str; 6] = ["#1f6f8b", "#c44536", "#2d6a4f", "#7b2d8b", "#b8860b", "#444444"];
const MARGIN: f64 = 48.0;

/// Renders the chart to an SVG string.
pub fn render_svg(series: &[Series], opts: &PlotOptions) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(Error::InvalidArg("every series must contain at least one point".into()));
    }
    let tx = |x: f64| -> Result<f64> {
        if opts.log_x {
            if !(x > 0.0) {
                return Err(Error::InvalidArg(format!(
                    "log-x plots require positive x values, got {x}"
                )));
            }
            Ok(x.ln())
        } else {
            Ok(x)
        }
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for (x, y) in &s.points {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidArg(format!("non-finite point ({x}, {y})")));
            }
            xs.push(tx(*x)?);
            ys.push(*y);
        }
    }
    let (x_lo, x_hi) = bounds(&xs);
    let (y_lo, y_hi) = bounds(&ys);
    let w = opts.width as f64;
    let h = opts.height as f64;
    let span_x = (x_hi - x_lo).max(1e-300);
    let span_y = (y_hi - y_lo).max(1e-300);
    let px = |x: f64| MARGIN + (x - x_lo) / span_x * (w - 2.0 * MARGIN);
    let py = |y: f64| h - MARGIN - (y - y_lo) / span_y * (h - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        opts.width, opts.height, opts.width, opts.height
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        opts.width, opts.height
    ));
    out.push_str(&format!(
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"#888888\"/>\n",
        MARGIN,
        MARGIN,
        w - 2.0 * MARGIN,
        h - 2.0 * MARGIN
    ));
    if !opts.title.is_empty() {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"14\" \
             text-anchor=\"middle\">{}</text>\n",
            w / 2.0,
            MARGIN / 2.0,
            escape(&opts.title)
        ));
    }
    // axis extent labels
    let x_label = |v: f64| if opts.log_x { format!("{:.4e}", v.exp()) } else { format!("{v:.4e}") };
    for (x, anchor) in [(x_lo, "start"), (x_hi, "end")] {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"{anchor}\">{}</text>\n",
            px(x),
            h - MARGIN / 2.0,
            x_label(x)
        ));
    }
    for y in [y_lo, y_hi] {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">{y:.4e}</text>\n",
            MARGIN - 4.0,
            py(y) + 4.0,
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for (x, y) in &s.points {
            pts.push_str(&format!("{:.2},{:.2} ", px(tx(*x)?), py(*y)));
        }
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             points=\"{}\"/>\n",
            pts.trim_end()
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
             fill=\"{color}\">{}</text>\n",
            MARGIN + 6.0,
            MARGIN + 14.0 * (i as f64 + 1.0),
            escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> Vec<Series> {
        vec![Series { label: "a".into(), points: vec![(1.0, 2.0), (2.0, 3.0)] }]
    }

    #[test]
    fn renders_one_polyline_per_series() {
        let svg = render_svg(&two_points(), &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(render_svg(&[], &PlotOptions::default()).is_err());
        let empty = vec![Series { label: "a".into(), points: vec![] }];
        assert!(render_svg(&empty, &PlotOptions::default()).is_err());
    }

    #[test]
    fn byte_identical_reruns() {
        let opts = PlotOptions { title: "decay".into(), log_x: true, ..Default::default() };
        let a = render_svg(&two_points(), &opts).unwrap();
        let b = render_svg(&two_points(), &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn log_x_rejects_nonpositive() {
        let s = vec![Series { label: "a".into(), points: vec![(0.0, 1.0), (1.0, 1.0)] }];
        let opts = PlotOptions { log_x: true, ..Default::default() };
        assert!(render_svg(&s, &opts).is_err());
    }
}
