use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::krylov::RunTrace;
use crate::linalg::C64;

use super::build::Built;
use super::scenario::Scenario;
use super::{create_dir, kind_name, mtx, write_file, CliError};

pub(crate) fn rhs_name(b: &Built) -> &'static str {
    if matches!(b, Built::Block(_)) {
        "B.mtx"
    } else {
        "b.mtx"
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: u32,
    kind: &'a str,
    n: usize,
    p: usize,
    m: usize,
    cycles: usize,
    files: Vec<String>,
    cond_du: Vec<String>,
    cond_v: Option<String>,
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

/// Writes the scenario, `A`, the right-hand side, the factors and a manifest.
pub(crate) fn write_construction(
    dir: &Path,
    sc: &Scenario,
    built: &Built,
) -> Result<Vec<String>, CliError> {
    create_dir(dir)?;
    let mut files = vec!["A.mtx".to_string(), rhs_name(built).to_string()];
    mtx::write(&dir.join("A.mtx"), built.a())?;
    mtx::write(&dir.join(rhs_name(built)), built.b())?;
    for (name, m) in built.factor_files() {
        mtx::write(&dir.join(&name), &m)?;
        files.push(name);
    }
    write_file(&dir.join("scenario.json"), &sc.to_json())?;
    files.push("scenario.json".into());
    let (m, cycles) = built.m_cycles();
    let manifest = Manifest {
        schema: super::scenario::SCHEMA,
        kind: kind_name(sc),
        n: built.a().nrows(),
        p: built.b().ncols(),
        m,
        cycles,
        files: files.clone(),
        cond_du: built.cond_du().into_iter().map(sci).collect(),
        cond_v: built.cond_v().map(sci),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&dir.join("manifest.json"), &json)?;
    files.push("manifest.json".into());
    Ok(files)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Real entries print as one number, complex ones as `re+imi`.
fn cnum(z: C64) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        format!("{:.16e}{:+.16e}i", z.re, z.im)
    }
}

/// Residual history as CSV. Scalar: `cycle,iteration,resnorm`. Block: the
/// Frobenius norm followed by `R_11..R_pp` row by row.
pub fn residual_csv(trace: &RunTrace, block: bool) -> Result<String, CliError> {
    let p = trace.p;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["cycle".to_string(), "iteration".to_string()];
    if block {
        header.push("resnorm_fro".into());
        for i in 1..=p {
            for j in 1..=p {
                header.push(format!("R_{i}{j}"));
            }
        }
    } else {
        header.push("resnorm".into());
    }
    let csv_err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for (k, c) in trace.cycles.iter().enumerate() {
        for (j, r) in c.residuals.iter().enumerate() {
            let mut rec = vec![(k + 1).to_string(), j.to_string(), num(r.frobenius())];
            if block {
                let m = r.matrix();
                for i in 0..p {
                    for jj in 0..p {
                        rec.push(cnum(m[(i, jj)]));
                    }
                }
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Convergence curve `log10 ||R||_F` against the global iteration count.
pub fn residual_svg(trace: &RunTrace) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut offset = 0usize;
    for c in &trace.cycles {
        for (j, v) in c.norms().iter().enumerate() {
            if *v > 0.0 {
                pts.push(((offset + j) as f64, v.log10()));
            }
        }
        offset += c.steps();
    }
    let xmax = (offset.max(1)) as f64;
    let (mut ymin, mut ymax) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.1), b.max(p.1))
        });
    if !ymin.is_finite() {
        (ymin, ymax) = (-1.0, 0.0);
    }
    ymin = ymin.floor();
    ymax = ymax.ceil().max(ymin + 1.0);
    let sx = |x: f64| pad + x / xmax * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - ymin) / (ymax - ymin) * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let mut y = ymin;
    while y <= ymax {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">1e{}</text>"#,
            pad - 4.0,
            sy(y) + 4.0,
            y as i64
        );
        y += 1.0;
    }
    let mut offset = 0usize;
    for c in &trace.cycles {
        offset += c.steps();
        let _ = writeln!(
            s,
            r##"<line x1="{0:.1}" y1="{pad}" x2="{0:.1}" y2="{1}" stroke="#cccccc"/>"##,
            sx(offset as f64),
            h - pad
        );
    }
    let path: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        path.join(" ")
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">iteration</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">residual norm</text>"#,
        h / 2.0,
        h / 2.0
    );
    s.push_str("</svg>\n");
    s
}
