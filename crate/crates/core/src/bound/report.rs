use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::sample::BoundSample;
use super::sweep::SweepResult;

/// Header of the sweep CSV.
pub const CSV_HEADER: &str = "axis_value,h,N,M,rho,R,lhs,rhs_base,rhs,ratio,v_integral,iterations";

/// One row per sample; reals in `{:.16e}` so the text parses back exactly.
pub fn sweep_csv(result: &SweepResult) -> String {
    samples_csv(result.samples())
}

pub fn samples_csv<'a>(samples: impl IntoIterator<Item = &'a BoundSample>) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for b in samples {
        for v in [
            b.axis_value,
            b.h,
            b.clamp_lower,
            b.clamp_upper,
            b.rho,
            b.radius,
            b.lhs,
            b.rhs_base,
            b.rhs,
            b.ratio,
            b.v_integral,
        ] {
            let _ = write!(s, "{v:.16e},");
        }
        let _ = writeln!(s, "{}", b.iterations);
    }
    s
}

pub fn report_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, sweep_csv(result)).map_err(|e| Error::io(path, e))
}

/// Inverse of [`samples_csv`].
pub fn parse_samples_csv(text: &str) -> Result<Vec<BoundSample>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Config {
                line: 1,
                msg: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Config { line: i + 1, msg };
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 12 {
            return Err(bad(format!("expected 12 columns, got {}", cols.len())));
        }
        let mut v = [0.0; 11];
        for (k, c) in cols[..11].iter().enumerate() {
            v[k] = c.parse().map_err(|_| bad(format!("column {} is not a number: `{c}`", k + 1)))?;
        }
        let iterations = cols[11].parse().map_err(|_| bad(format!("iterations is not an integer: `{}`", cols[11])))?;
        out.push(BoundSample {
            axis_value: v[0],
            h: v[1],
            clamp_lower: v[2],
            clamp_upper: v[3],
            rho: v[4],
            radius: v[5],
            lhs: v[6],
            rhs_base: v[7],
            rhs: v[8],
            ratio: v[9],
            v_integral: v[10],
            iterations,
        });
    }
    Ok(out)
}

/// Line plot of the ratio against the sweep axis (log scale).
pub fn sweep_svg(result: &SweepResult) -> String {
    let (w, h, pad) = (480.0, 320.0, 48.0);
    let pts: Vec<(f64, f64)> = result
        .samples()
        .filter(|s| s.axis_value > 0.0 && s.axis_value.is_finite())
        .map(|s| (s.axis_value.log10(), s.ratio))
        .collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <line x1=\"{pad}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <text x=\"{xm}\" y=\"{yl}\" text-anchor=\"middle\" font-size=\"12\">log10 {axis}</text>\n\
         <text x=\"12\" y=\"{ym}\" font-size=\"12\" transform=\"rotate(-90 12 {ym})\">ratio</text>\n",
        y0 = h - pad,
        x1 = w - pad,
        xm = w / 2.0,
        yl = h - 12.0,
        ym = h / 2.0,
        axis = result.axis.name(),
    );
    if !pts.is_empty() {
        let (xlo, xhi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let yhi = pts.iter().fold(0.0f64, |m, p| m.max(p.1)).max(f64::MIN_POSITIVE) * 1.1;
        let xs = if xhi > xlo { xhi - xlo } else { 1.0 };
        let map = |p: &(f64, f64)| (pad + (p.0 - xlo) / xs * (w - 2.0 * pad), h - pad - p.1 / yhi * (h - 2.0 * pad));
        let line: Vec<String> = pts.iter().map(map).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>", line.join(" "));
        for (p, (x, y)) in pts.iter().zip(pts.iter().map(map)) {
            let _ = writeln!(svg, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"steelblue\"><title>{:.6e}</title></circle>", p.1);
        }
        let _ = writeln!(
            svg,
            "<text x=\"{pad}\" y=\"{}\" font-size=\"11\">max {:.4e}</text>",
            pad - 8.0,
            yhi / 1.1
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, sweep_svg(result)).map_err(|e| Error::io(path, e))
}
