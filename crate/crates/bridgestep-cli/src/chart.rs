//! Self-contained SVG line charts, one polyline per time-step series.

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 185.0;
const MARGIN_TOP: f64 = 52.0;
const MARGIN_BOTTOM: f64 = 64.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(value: f64) -> String {
    crate::table::format_sig(value, 4)
}

/// Renders a line chart; returns None when no series carries any point.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Option<String> {
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    if xs.is_empty() {
        return None;
    }
    let (mut x_min, mut x_max) = range(&xs);
    let (mut y_min, mut y_max) = range(&ys);
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let map_x = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let map_y = |y: f64| MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="Helvetica,Arial,sans-serif">"##,
    ));
    svg.push_str(&format!(
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"##
    ));
    svg.push_str(&format!(
        r##"<text x="{:.1}" y="30" text-anchor="middle" font-size="18" fill="#222">{}</text>"##,
        MARGIN_LEFT + plot_w / 2.0,
        escape_xml(title)
    ));

    // Gridlines and tick labels.
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let yv = y_min + f * (y_max - y_min);
        let y = map_y(yv);
        svg.push_str(&format!(
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e5e5e5" stroke-width="1"/>"##,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            r##"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="12" fill="#444">{}</text>"##,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            tick_label(yv)
        ));
        let xv = x_min + f * (x_max - x_min);
        let x = map_x(xv);
        svg.push_str(&format!(
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#e5e5e5" stroke-width="1"/>"##,
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        ));
        svg.push_str(&format!(
            r##"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="12" fill="#444">{}</text>"##,
            MARGIN_TOP + plot_h + 20.0,
            tick_label(xv)
        ));
    }

    // Axes.
    svg.push_str(&format!(
        r##"<line x1="{l:.1}" y1="{t:.1}" x2="{l:.1}" y2="{b:.1}" stroke="#222" stroke-width="1.5"/>"##,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    ));
    svg.push_str(&format!(
        r##"<line x1="{l:.1}" y1="{b:.1}" x2="{r:.1}" y2="{b:.1}" stroke="#222" stroke-width="1.5"/>"##,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        b = MARGIN_TOP + plot_h
    ));
    svg.push_str(&format!(
        r##"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14" fill="#222">{}</text>"##,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 16.0,
        escape_xml(x_label)
    ));
    svg.push_str(&format!(
        r##"<text x="20" y="{:.1}" text-anchor="middle" font-size="14" fill="#222" transform="rotate(-90 20 {:.1})">{}</text>"##,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape_xml(y_label)
    ));

    // Series and legend.
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", map_x(x), map_y(y)))
            .collect();
        svg.push_str(&format!(
            r##"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"##,
            points.join(" ")
        ));
        let ly = MARGIN_TOP + 14.0 + 22.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 18.0;
        svg.push_str(&format!(
            r##"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"##,
            lx + 26.0
        ));
        svg.push_str(&format!(
            r##"<text x="{:.1}" y="{:.1}" font-size="13" fill="#222">{}</text>"##,
            lx + 32.0,
            ly + 4.0,
            escape_xml(&s.label)
        ));
    }

    svg.push_str("</svg>\n");
    Some(svg)
}

fn range(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}
