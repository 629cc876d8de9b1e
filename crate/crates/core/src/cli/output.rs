//! CSV, SVG and manifest writers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::experiments::{subspace_populations, FreezingMetrics};

/// Column choices for the population CSV.
#[derive(Clone, Copy, Debug, Default)]
pub struct CsvColumns {
    pub nuclear_marginal: bool,
    pub diagnostics: bool,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(io_err(path))
}

/// Population CSV text. 9-level series get a trailing `P_rest` column with
/// the population outside the two-qubit subspace.
pub fn populations_csv(series: &TimeSeries, cols: CsvColumns) -> Result<String> {
    let full = series.populations.first().is_some_and(|p| p.len() == 9);
    let mut out = String::from("t_us,P_gg,P_ge,P_eg,P_ee");
    if cols.nuclear_marginal {
        out.push_str(",P_gN,P_eN");
    }
    if cols.diagnostics {
        out.push_str(",trace_err,min_eig");
    }
    if full {
        out.push_str(",P_rest");
    }
    out.push('\n');
    for (k, t) in series.times.iter().enumerate() {
        let p = subspace_populations(&series.populations[k])?;
        write!(out, "{t:.16e}").unwrap();
        for v in p {
            write!(out, ",{v:.16e}").unwrap();
        }
        if cols.nuclear_marginal {
            write!(out, ",{:.16e},{:.16e}", p[0] + p[2], p[1] + p[3]).unwrap();
        }
        if cols.diagnostics {
            let d = &series.diagnostics[k];
            write!(out, ",{:.16e},{:.16e}", d.trace_error, d.min_eigenvalue).unwrap();
        }
        if full {
            let rest = series.populations[k].iter().sum::<f64>() - p.iter().sum::<f64>();
            write!(out, ",{rest:.16e}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(series: &TimeSeries, cols: CsvColumns, path: &Path) -> Result<()> {
    write_file(path, &populations_csv(series, cols)?)
}

pub fn discord_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t_us,mutual_info,classical_corr,discord\n");
    for (t, d) in series.discord.iter().flatten() {
        writeln!(
            out,
            "{t:.16e},{:.16e},{:.16e},{:.16e}",
            d.mutual_info, d.classical_corr, d.discord
        )
        .unwrap();
    }
    out
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Standalone SVG with one polyline per population (and nuclear marginal /
/// discord when present). Legend labels match the CSV column names.
pub fn render_svg(series: &TimeSeries, title: &str, nuclear_marginal: bool) -> Result<String> {
    let mut traces: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let labels = ["P_gg", "P_ge", "P_eg", "P_ee"];
    let pops: Vec<[f64; 4]> = series
        .populations
        .iter()
        .map(|p| subspace_populations(p))
        .collect::<Result<_>>()?;
    if !pops.is_empty() {
        for (k, l) in labels.iter().enumerate() {
            let pts = series.times.iter().zip(&pops).map(|(&t, p)| (t, p[k])).collect();
            traces.push((l.to_string(), pts));
        }
        if nuclear_marginal {
            let g = series.times.iter().zip(&pops).map(|(&t, p)| (t, p[0] + p[2])).collect();
            let e = series.times.iter().zip(&pops).map(|(&t, p)| (t, p[1] + p[3])).collect();
            traces.push(("P_gN".into(), g));
            traces.push(("P_eN".into(), e));
        }
    }
    if let Some(d) = &series.discord {
        traces.push(("discord".into(), d.iter().map(|(t, r)| (*t, r.discord)).collect()));
    }

    let t_max = series.times.last().copied().filter(|&t| t > 0.0).unwrap_or(1.0);
    let y_max = traces
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.1))
        .fold(1.0, f64::max);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let x = |t: f64| LEFT + pw * t / t_max;
    let y = |v: f64| TOP + ph * (1.0 - v / y_max);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    )
    .unwrap();
    // axes
    writeln!(
        s,
        r#"<path d="M{LEFT} {TOP} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    )
    .unwrap();
    for i in 0..=5 {
        let t = t_max * i as f64 / 5.0;
        let v = y_max * i as f64 / 5.0;
        writeln!(
            s,
            r#"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="black"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{4}</text>"#,
            x(t),
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            fmt_tick(t)
        )
        .unwrap();
        writeln!(
            s,
            r#"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="black"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{5}</text>"#,
            LEFT - 5.0,
            y(v),
            LEFT,
            LEFT - 8.0,
            y(v) + 4.0,
            fmt_tick(v)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">t (µs)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    let ylabel = if series.discord.is_some() {
        "population / discord"
    } else {
        "population"
    };
    writeln!(
        s,
        r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{ylabel}</text>"#,
        TOP + ph / 2.0
    )
    .unwrap();

    for (i, (label, pts)) in traces.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        for (j, (t, v)) in pts.iter().enumerate() {
            if j > 0 {
                points.push(' ');
            }
            write!(points, "{:.2},{:.2}", x(*t), y(*v)).unwrap();
        }
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{points}"><title>{label}</title></polyline>"#
        )
        .unwrap();
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{label}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn emit_svg(series: &TimeSeries, title: &str, nuclear_marginal: bool, path: &Path) -> Result<()> {
    write_file(path, &render_svg(series, title, nuclear_marginal)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub seed_override: Option<u64>,
    pub frame: String,
    pub frame_override: Option<String>,
    pub files: Vec<PathBuf>,
    pub wall_clock_s: f64,
    pub version: String,
    pub metrics: FreezingMetrics,
    pub max_discord: Option<f64>,
    pub warnings: Vec<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn write_manifest(m: &RunManifest) -> Result<PathBuf> {
    let path = m.output_dir.join(MANIFEST_NAME);
    let text = serde_json::to_string_pretty(m).expect("manifest serializes");
    write_file(&path, &(text + "\n"))?;
    Ok(path)
}
