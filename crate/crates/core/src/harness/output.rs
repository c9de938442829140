use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use super::{Disturbance, HarnessError, Metric, ScoreTable};
use crate::assessment::Aspect;

/// `printf("%.6g")`: six significant digits, trailing zeros removed.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // the exponent after rounding to six digits decides the notation
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn io_err(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

/// CSV text with header `step,sensor,metric,value`.
pub fn csv_string(table: &ScoreTable) -> String {
    let mut out = String::from("step,sensor,metric,value\n");
    for (step, sensor, metric, value) in table.rows() {
        let _ = writeln!(out, "{step},{sensor},{},{}", metric.name(), format_g6(value));
    }
    out
}

pub fn write_csv(table: &ScoreTable, path: &Path) -> Result<(), HarnessError> {
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(csv_string(table).as_bytes()).map_err(|e| io_err(path, e))
}

/// Parses CSV text produced by [`csv_string`].
pub fn parse_csv(text: &str, num_steps: u64, num_sensors: usize) -> Result<ScoreTable, HarnessError> {
    let mut lines = text.lines();
    if lines.next() != Some("step,sensor,metric,value") {
        return Err(HarnessError::Config("missing CSV header".into()));
    }
    let mut t = ScoreTable::new(num_steps, num_sensors);
    for (i, line) in lines.enumerate() {
        let bad = || HarnessError::Config(format!("CSV line {}: `{line}`", i + 2));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad());
        }
        let step: u64 = f[0].parse().map_err(|_| bad())?;
        let sensor: usize = f[1].parse().map_err(|_| bad())?;
        let metric = Metric::from_name(f[2]).ok_or_else(bad)?;
        let value: f64 = f[3].parse().map_err(|_| bad())?;
        if step >= num_steps || sensor == 0 || sensor > num_sensors {
            return Err(bad());
        }
        t.set(step, sensor, metric, Some(value));
    }
    Ok(t)
}

const PANEL_W: f64 = 900.0;
const PANEL_H: f64 = 140.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_T: f64 = 24.0;
const GAP: f64 = 36.0;

struct Panel<'a> {
    title: String,
    lines: Vec<(&'a str, bool, Vec<Option<f64>>)>,
}

fn polyline(series: &[Option<f64>], x: impl Fn(usize) -> f64, y: impl Fn(f64) -> f64) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for (k, v) in series.iter().enumerate() {
        match v {
            Some(v) => {
                let _ = write!(cur, "{:.1},{:.1} ", x(k), y(*v));
            }
            None if !cur.is_empty() => out.push(std::mem::take(&mut cur)),
            None => {}
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn render(panels: &[Panel], num_steps: u64, shaded: &[(u64, u64)], heading: &str) -> String {
    let height = MARGIN_T + panels.len() as f64 * (PANEL_H + GAP) + 10.0;
    let width = MARGIN_L + PANEL_W + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{MARGIN_L}" y="14" font-size="13">{heading}</text>"#);
    let x = |k: usize| MARGIN_L + PANEL_W * k as f64 / (num_steps.max(2) - 1) as f64;
    for (i, p) in panels.iter().enumerate() {
        let top = MARGIN_T + i as f64 * (PANEL_H + GAP) + 14.0;
        // warm-up thresholds are reported as 1 and would flatten the plot
        let y_max = p
            .lines
            .iter()
            .flat_map(|(_, _, v)| v.iter().flatten())
            .filter(|v| **v < 1.0 || p.title.starts_with("nis") || p.title.starts_with("err"))
            .fold(0.0_f64, |a, b| a.max(*b))
            .max(1e-6)
            * 1.1;
        let y = |v: f64| top + PANEL_H - PANEL_H * (v / y_max).clamp(0.0, 1.0);
        for &(a, b) in shaded {
            let _ = writeln!(
                s,
                r##"<rect x="{:.1}" y="{top:.1}" width="{:.1}" height="{PANEL_H}" fill="#e06060" fill-opacity="0.25"/>"##,
                x(a as usize),
                x(b as usize) - x(a as usize)
            );
        }
        let _ = writeln!(
            s,
            r##"<rect x="{MARGIN_L}" y="{top:.1}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(s, r#"<text x="{MARGIN_L}" y="{:.1}">{}</text>"#, top - 4.0, p.title);
        let _ = writeln!(s, r#"<text x="4" y="{:.1}">{}</text>"#, top + 10.0, format_g6(y_max));
        let _ = writeln!(s, r#"<text x="4" y="{:.1}">0</text>"#, top + PANEL_H);
        let colours = ["#1f5fbf", "#d07000", "#2a8a2a", "#8a2a8a"];
        for (j, (name, dashed, series)) in p.lines.iter().enumerate() {
            let dash = if *dashed { r#" stroke-dasharray="5,3""# } else { "" };
            let colour = colours[j % colours.len()];
            for pts in polyline(series, x, y) {
                let _ =
                    writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2"{dash} points="{pts}"/>"#);
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" fill="{colour}">{name}</text>"#,
                MARGIN_L + PANEL_W - 90.0,
                top + 12.0 + 12.0 * j as f64
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Line charts of one sensor: DC against threshold per aspect, long-term
/// uncertainties, time-average NIS with its interval, and position error.
/// Disturbance windows of that sensor are shaded.
pub fn svg_string(table: &ScoreTable, sensor: usize, disturbances: &[Disturbance]) -> String {
    let mut panels: Vec<Panel> = Aspect::ALL
        .iter()
        .map(|&a| Panel {
            title: format!("{} DC vs threshold", a.short_name()),
            lines: vec![
                ("dc", false, table.series(sensor, Metric::dc(a))),
                ("threshold", true, table.series(sensor, Metric::thr(a))),
            ],
        })
        .collect();
    panels.push(Panel {
        title: "uncertainty of the long-term opinions".into(),
        lines: Aspect::ALL.iter().map(|&a| (a.short_name(), false, table.series(sensor, Metric::u(a)))).collect(),
    });
    panels.push(Panel {
        title: "nis time average and interval".into(),
        lines: vec![
            ("nis", false, table.series(sensor, Metric::NisAvg)),
            ("lower", true, table.series(sensor, Metric::NisLo)),
            ("upper", true, table.series(sensor, Metric::NisHi)),
        ],
    });
    panels.push(Panel { title: "err_m".into(), lines: vec![("error", false, table.series(sensor, Metric::ErrM))] });
    let shaded: Vec<(u64, u64)> =
        disturbances.iter().filter(|d| d.sensor == sensor).map(|d| (d.start, d.end)).collect();
    render(&panels, table.num_steps(), &shaded, &format!("sensor {sensor}"))
}

pub fn write_svg(
    table: &ScoreTable,
    sensor: usize,
    disturbances: &[Disturbance],
    path: &Path,
) -> Result<(), HarnessError> {
    std::fs::write(path, svg_string(table, sensor, disturbances)).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.1, "0.1"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.000123456789, "0.000123457"),
            (0.0000123456, "1.23456e-05"),
            (2.0 / 3.0, "0.666667"),
            (-2.5, "-2.5"),
            (999999.5, "1e+06"),
            (0.13759969452665706, "0.1376"),
            (10.596634733096073, "10.5966"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g6(x), s, "{x}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut t = ScoreTable::new(3, 2);
        t.set(0, 1, Metric::DcAssoc, Some(0.123456789));
        t.set(2, 2, Metric::ErrM, Some(1234.5678));
        t.set(1, 1, Metric::NisAvg, None);
        let text = csv_string(&t);
        assert_eq!(text.lines().count(), 3);
        let back = parse_csv(&text, 3, 2).unwrap();
        for ((_, _, _, a), (_, _, _, b)) in t.rows().zip(back.rows()) {
            assert!((a - b).abs() <= 5e-6 * a.abs());
        }
        assert_eq!(back.get(1, 1, Metric::NisAvg), None);
    }

    #[test]
    fn svg_shades_own_disturbances() {
        let mut t = ScoreTable::new(10, 2);
        for k in 0..10 {
            t.set(k, 1, Metric::DcAssoc, Some(k as f64 * 0.01));
        }
        let d = [
            Disturbance { sensor: 1, start: 2, end: 4, kind: super::super::DisturbanceKind::NoiseScale, value: 2.0 },
            Disturbance { sensor: 2, start: 5, end: 6, kind: super::super::DisturbanceKind::PdSet, value: 0.5 },
        ];
        let s1 = svg_string(&t, 1, &d);
        let s2 = svg_string(&t, 2, &d);
        assert!(s1.starts_with("<svg") && s1.trim_end().ends_with("</svg>"));
        assert_eq!(s1.matches("fill-opacity").count(), 7);
        assert_eq!(s2.matches("fill-opacity").count(), 7);
        assert!(s1.contains("<polyline"));
    }
}
