//! Bare-bones SVG plots: line charts and heatmaps.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !(hi > lo) {
        (lo - 0.5, lo + 0.5)
    } else {
        (lo, hi)
    }
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" stroke=\"black\" fill=\"none\"/>"
    );
    let label = |out: &mut String, px: f64, py: f64, anchor: &str, v: f64| {
        let _ = writeln!(
            out,
            "<text x=\"{px:.1}\" y=\"{py:.1}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"11\">{v:.4}</text>"
        );
    };
    label(out, x0, y0 + 16.0, "start", x.0);
    label(out, x1, y0 + 16.0, "end", x.1);
    label(out, x0 - 4.0, y0, "end", y.0);
    label(out, x0 - 4.0, y1 + 4.0, "end", y.1);
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        (x0 + x1) / 2.0,
        H - 20.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        "<text transform=\"translate(16 {:.1}) rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

/// Line chart of `(name, x, y)` series sharing one pair of axes.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, &[f64], &[f64])]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = range(series.iter().flat_map(|s| s.1.iter().cloned()));
    let yr = range(series.iter().flat_map(|s| s.2.iter().cloned()));
    axes(&mut out, xr, yr, xlabel, ylabel);
    let px = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (W - 1.5 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * MARGIN);
    for (k, (name, xs, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = xs
            .iter()
            .zip(ys.iter())
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" stroke=\"{color}\" fill=\"none\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            W - 2.0 * MARGIN,
            MARGIN + 16.0 * k as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn color(v: f64) -> String {
    // white → dark blue
    let t = v.clamp(0.0, 1.0);
    let r = (255.0 * (1.0 - t)) as u8;
    let g = (255.0 * (1.0 - 0.8 * t)) as u8;
    let b = (255.0 * (1.0 - 0.45 * t)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of a row-major `ny × nx` map, block-averaged to at most 128 cells a side.
pub fn heatmap(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    x: (f64, f64),
    y: (f64, f64),
    nx: usize,
    ny: usize,
    values: &[f64],
) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let bx = nx.div_ceil(128);
    let by = ny.div_ceil(128);
    let (cx, cy) = (nx.div_ceil(bx), ny.div_ceil(by));
    let mut cells = vec![0.0; cx * cy];
    for j in 0..ny {
        for i in 0..nx {
            cells[(j / by) * cx + i / bx] += values[j * nx + i];
        }
    }
    let peak = cells.iter().cloned().fold(0.0, f64::max);
    let (w, h) = ((W - 1.5 * MARGIN) / cx as f64, (H - 2.0 * MARGIN) / cy as f64);
    for j in 0..cy {
        for i in 0..cx {
            let v = if peak > 0.0 { cells[j * cx + i] / peak } else { 0.0 };
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                MARGIN + i as f64 * w,
                H - MARGIN - (j + 1) as f64 * h,
                w + 0.05,
                h + 0.05,
                color(v)
            );
        }
    }
    axes(&mut out, x, y, xlabel, ylabel);
    out.push_str("</svg>\n");
    out
}
