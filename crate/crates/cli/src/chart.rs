//! Line chart of the index of dispersion against the disk radius,
//! rendered to SVG from a counts CSV. The chart is a pure function of the
//! CSV text, so figures are derived data and never a source of truth.

use crate::{CliError, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 624.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 372.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Row {
    radius: f64,
    iod: f64,
    ci_lo: f64,
    ci_hi: f64,
    mode: String,
}

fn bad(hint: &str) -> CliError {
    CliError::Config(format!("chart input: {hint}"))
}

/// Parses the CSV produced by the ensemble runners: an optional `# config`
/// comment, a header naming at least radius, iod, ci_lo, ci_hi, and mode,
/// then one row per (radius, mode) pair.
fn parse_rows(csv: &str) -> Result<(Option<String>, Vec<Row>)> {
    let mut config = None;
    let mut lines = csv.lines().filter(|line| {
        if let Some(rest) = line.strip_prefix("# config ") {
            config = Some(rest.to_string());
        }
        !line.starts_with('#') && !line.trim().is_empty()
    });
    let header = lines.next().ok_or_else(|| bad("missing header"))?;
    let columns: Vec<&str> = header.split(',').collect();
    let index = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| bad(&format!("missing column {name}")))
    };
    let (ir, ii) = (index("radius")?, index("iod")?);
    let (ilo, ihi, im) = (index("ci_lo")?, index("ci_hi")?, index("mode")?);
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(bad("row width does not match the header"));
        }
        let num = |i: usize| fields[i].parse::<f64>().unwrap_or(f64::NAN);
        let row = Row {
            radius: num(ir),
            iod: num(ii),
            ci_lo: num(ilo),
            ci_hi: num(ihi),
            mode: fields[im].to_string(),
        };
        if row.radius.is_finite() && row.iod.is_finite() {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(bad("no finite dispersion values"));
    }
    Ok((config, rows))
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{:.0}", v.round())
    } else {
        format!("{v:.2}")
    }
}

/// Renders the dispersion chart. Series are grouped by the mode column in
/// first-appearance order; a dashed reference line marks the Poisson
/// level, index of dispersion one.
pub fn dispersion_chart(csv: &str) -> Result<String> {
    let (config, rows) = parse_rows(csv)?;

    let mut modes: Vec<String> = Vec::new();
    for row in &rows {
        if !modes.contains(&row.mode) {
            modes.push(row.mode.clone());
        }
    }

    let r_min = rows.iter().map(|r| r.radius).fold(f64::INFINITY, f64::min);
    let r_max = rows
        .iter()
        .map(|r| r.radius)
        .fold(f64::NEG_INFINITY, f64::max);
    let (r_min, r_max) = if r_max > r_min {
        (r_min, r_max)
    } else {
        (r_min - 0.5, r_max + 0.5)
    };
    let mut y_max = rows
        .iter()
        .map(|r| if r.ci_hi.is_finite() { r.iod.max(r.ci_hi) } else { r.iod })
        .fold(0.0f64, f64::max);
    y_max = (1.08 * y_max).max(1.12);

    let x = |r: f64| LEFT + (r - r_min) / (r_max - r_min) * (RIGHT - LEFT);
    let y = |v: f64| BOTTOM - (v / y_max) * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" \
         viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" font-family=\"monospace\">\n"
    ));
    if let Some(config) = config {
        svg.push_str(&format!("<!-- config {} -->\n", config.replace("--", "- -")));
    }
    svg.push_str(&format!(
        "<rect width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-size=\"13\" fill=\"#333\">index of dispersion vs disk radius</text>\n",
        fmt(LEFT)
    ));

    // axes
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
        fmt(LEFT),
        fmt(BOTTOM),
        fmt(RIGHT),
        fmt(BOTTOM)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
        fmt(LEFT),
        fmt(TOP),
        fmt(LEFT),
        fmt(BOTTOM)
    ));

    // x ticks at each distinct radius, thinned when crowded
    let mut radii: Vec<f64> = Vec::new();
    for row in &rows {
        if !radii.iter().any(|r| (r - row.radius).abs() < 1e-9) {
            radii.push(row.radius);
        }
    }
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    let stride = radii.len().div_ceil(13);
    for r in radii.iter().step_by(stride.max(1)) {
        let px = x(*r);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333\"/>\n",
            fmt(px),
            fmt(BOTTOM),
            fmt(BOTTOM + 5.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333\" text-anchor=\"middle\">{}</text>\n",
            fmt(px),
            fmt(BOTTOM + 18.0),
            fmt_tick(*r)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#333\" text-anchor=\"middle\">R</text>\n",
        fmt((LEFT + RIGHT) / 2.0),
        fmt(BOTTOM + 36.0)
    ));

    // y ticks, six of them from zero to the top
    for k in 0..=5 {
        let v = y_max * k as f64 / 5.0;
        let py = y(v);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#333\"/>\n",
            fmt(LEFT - 5.0),
            fmt(LEFT),
            fmt(py)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333\" text-anchor=\"end\">{}</text>\n",
            fmt(LEFT - 9.0),
            fmt(py + 4.0),
            fmt_tick(v)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" fill=\"#333\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {})\">var / mean</text>\n",
        fmt((TOP + BOTTOM) / 2.0),
        fmt((TOP + BOTTOM) / 2.0)
    ));

    // Poisson reference
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{2}\" x2=\"{}\" y2=\"{2}\" stroke=\"#999\" stroke-dasharray=\"5,4\"/>\n",
        fmt(LEFT),
        fmt(RIGHT),
        fmt(y(1.0))
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"#999\" text-anchor=\"end\">poisson</text>\n",
        fmt(RIGHT),
        fmt(y(1.0) - 4.0)
    ));

    for (series, mode) in modes.iter().enumerate() {
        let color = PALETTE[series % PALETTE.len()];
        let mut points: Vec<&Row> = rows.iter().filter(|r| &r.mode == mode).collect();
        points.sort_by(|a, b| a.radius.partial_cmp(&b.radius).expect("finite radii"));

        for row in &points {
            if row.ci_lo.is_finite() && row.ci_hi.is_finite() {
                let px = x(row.radius);
                svg.push_str(&format!(
                    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\"/>\n",
                    fmt(px),
                    fmt(y(row.ci_lo)),
                    fmt(y(row.ci_hi)),
                    color
                ));
                for v in [row.ci_lo, row.ci_hi] {
                    svg.push_str(&format!(
                        "<line x1=\"{}\" y1=\"{2}\" x2=\"{}\" y2=\"{2}\" stroke=\"{3}\"/>\n",
                        fmt(px - 3.0),
                        fmt(px + 3.0),
                        fmt(y(v)),
                        color
                    ));
                }
            }
        }

        let path: Vec<String> = points
            .iter()
            .map(|r| format!("{},{}", fmt(x(r.radius)), fmt(y(r.iod))))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            path.join(" "),
            color
        ));
        for row in &points {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n",
                fmt(x(row.radius)),
                fmt(y(row.iod)),
                color
            ));
        }

        let ly = TOP + 10.0 + 16.0 * series as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{2}\" x2=\"{}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"1.5\"/>\n",
            fmt(RIGHT - 120.0),
            fmt(RIGHT - 102.0),
            fmt(ly),
            color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333\">{}</text>\n",
            fmt(RIGHT - 96.0),
            fmt(ly + 4.0),
            mode
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
