//! A small hand-written SVG line chart of the results.

use std::fmt::Write as _;

use crate::experiment::ExperimentResult;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

struct Series {
    label: String,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
    /// Symmetric error bars, if any.
    spread: Option<Vec<f64>>,
}

fn series_of(results: &[ExperimentResult]) -> Vec<Series> {
    let mut out = Vec::new();
    for (k, r) in results.iter().enumerate() {
        let color = PALETTE[(2 * k) % PALETTE.len()];
        out.push(Series {
            label: format!("{} mean", r.dataset),
            color,
            dashed: false,
            points: r.sizes.iter().map(|s| (s.n as f64, s.mean_expected)).collect(),
            spread: Some(r.sizes.iter().map(|s| s.std_expected).collect()),
        });
        out.push(Series {
            label: format!("{} worst sink", r.dataset),
            color: PALETTE[(2 * k + 1) % PALETTE.len()],
            dashed: true,
            points: r.sizes.iter().map(|s| (s.n as f64, s.mean_worst)).collect(),
            spread: None,
        });
    }
    let mut sizes: Vec<(f64, f64)> = results
        .iter()
        .flat_map(|r| r.sizes.iter().map(|s| (s.n as f64, s.theory)))
        .collect();
    sizes.sort_by(|a, b| a.0.total_cmp(&b.0));
    sizes.dedup_by(|a, b| a.0 == b.0);
    if !sizes.is_empty() {
        out.push(Series {
            label: "theory ⌈n/2⌉/n²".into(),
            color: "#000000",
            dashed: true,
            points: sizes,
            spread: None,
        });
    }
    out
}

/// Group size on a linear x axis, inefficiency on a log10 y axis. One
/// polyline per series: mean and worst sink per dataset, plus the
/// theoretical line. Non-positive values are drawn at the bottom edge.
pub fn chart_svg(results: &[ExperimentResult]) -> String {
    let series = series_of(results);
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|&y| y > 0.0)
        .collect();
    let (x0, x1) = match (xs.iter().cloned().reduce(f64::min), xs.iter().cloned().reduce(f64::max)) {
        (Some(a), Some(b)) if b > a => (a, b),
        (Some(a), _) => (a - 1.0, a + 1.0),
        _ => (0.0, 1.0),
    };
    let lo = ys.iter().cloned().reduce(f64::min).unwrap_or(1e-3);
    let hi = ys.iter().cloned().reduce(f64::max).unwrap_or(1.0);
    let (y0, y1) = (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0));

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| {
        let t = if y > 0.0 { (y.log10() - y0) / (y1 - y0) } else { 0.0 };
        TOP + (1.0 - t.clamp(0.0, 1.0)) * plot_h
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
    )
    .unwrap();
    for e in y0 as i32..=y1 as i32 {
        let y = py(10f64.powi(e));
        writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        )
        .unwrap();
    }
    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for x in ticks {
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#,
            px(x),
            TOP + plot_h + 18.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">group size n</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">sample inefficiency</text>"#,
        TOP + plot_h / 2.0
    )
    .unwrap();

    for (k, s) in series.iter().enumerate() {
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#,
            pts.join(" "),
            s.color
        )
        .unwrap();
        if let Some(spread) = &s.spread {
            for (&(x, y), &d) in s.points.iter().zip(spread) {
                writeln!(
                    svg,
                    r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{3}"/>"#,
                    px(x),
                    py(y + d),
                    py(y - d),
                    s.color
                )
                .unwrap();
            }
        }
        let ly = TOP + 12.0 + 18.0 * k as f64;
        let lx = LEFT + plot_w + 12.0;
        writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.8"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            s.color,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Number of polylines [`chart_svg`] draws for `results`.
pub fn series_count(results: &[ExperimentResult]) -> usize {
    series_of(results).len()
}
