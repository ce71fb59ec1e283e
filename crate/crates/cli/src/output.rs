//! CSV and SVG writers.

use std::fmt::Write as _;

use lagsphere::integrals::AreaScan;
use lagsphere::report::FieldRow;

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

pub fn scan_csv(scan: &AreaScan) -> String {
    let mut s = String::from("t,A_closed,A_quad,rel_err\n");
    for r in &scan.rows {
        let _ = writeln!(s, "{:.6},{:.12e},{},{}", r.t, r.a_closed, opt(r.a_quad), opt(r.rel_err));
    }
    s
}

pub fn field_csv(rows: &[FieldRow]) -> String {
    let mut s = String::from("s1,s2,x,theta_coord,value\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.s1, r.s2, r.x, r.theta, r.value
        );
    }
    s
}

/// A minimal standalone SVG line plot of `A(t)`.
pub fn scan_svg(scan: &AreaScan) -> String {
    let (w, h) = (640.0, 400.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 20.0, 40.0);
    let t0 = scan.rows.first().map_or(0.0, |r| r.t);
    let t1 = scan.rows.last().map_or(1.0, |r| r.t);
    let a_max = scan.rows.iter().map(|r| r.a_closed).fold(0.0, f64::max);
    let px = |t: f64| ml + (t - t0) / (t1 - t0) * (w - ml - mr);
    let py = |a: f64| h - mb - a / a_max * (h - mt - mb);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{ml}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
        y0 = h - mb,
        x1 = w - mr
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{y0}" stroke="black"/>"#,
        y0 = h - mb
    );
    for k in 0..=4 {
        let t = t0 + (t1 - t0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{t:.2}</text>"#,
            px(t),
            h - mb + 16.0
        );
        let a = a_max * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{a:.2}</text>"#,
            ml - 6.0,
            py(a) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">t</text>"#,
        (ml + w - mr) / 2.0,
        h - 6.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.2})">A(t)</text>"#,
        h / 2.0,
        h / 2.0
    );
    let pts: Vec<String> = scan
        .rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", px(r.t), py(r.a_closed)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}
