//! Deterministic serialization: every float goes through one formatter
//! (12 significant digits, scientific), so identical configs produce
//! byte-identical JSON, CSV, and SVG.

use serde_json::Value;
use toepchan::classifier::PartitionJson;
use toepchan::PiecewiseSymbol;

/// 12 significant digits, scientific notation.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        // normalize -0.0 so the sign of a rounded zero can't flip bytes
        return "0.00000000000e0".into();
    }
    format!("{x:.11e}")
}

/// Render a JSON value with sorted keys, two-space indent, and all
/// non-integer numbers through `sig`.
pub fn render_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&sig(n.as_f64().unwrap()));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                indent(depth + 1, out);
                write_value(item, depth + 1, out);
            }
            out.push('\n');
            indent(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                indent(depth + 1, out);
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(item, depth + 1, out);
            }
            out.push('\n');
            indent(depth, out);
            out.push('}');
        }
    }
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// CSV preamble: version, one-line config, hash, seed as comment rows.
pub fn csv_preamble(config_json: &Value, hash: &str, seed: u64) -> String {
    let mut one_line = String::new();
    write_compact(config_json, &mut one_line);
    format!(
        "# version: {}\n# config: {one_line}\n# config_hash: {hash}\n# seed: {seed}\n",
        env!("CARGO_PKG_VERSION")
    )
}

fn write_compact(v: &Value, out: &mut String) {
    match v {
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_compact(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_compact(item, out);
            }
            out.push('}');
        }
        other => write_value(other, 0, out),
    }
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const ML: f64 = 64.0;
const MR: f64 = 24.0;
const MT: f64 = 40.0;
const MB: f64 = 44.0;

/// Symbol graph over one period, with optional color-coded spectral strips
/// (thin green, thick blue, mixed orange, exceptional values dashed red) and
/// an optional gray band overlay.
pub fn symbol_svg(
    symbol: &PiecewiseSymbol,
    partition: Option<&PartitionJson>,
    band: Option<(f64, f64)>,
    hash: &str,
    seed: u64,
) -> String {
    use std::f64::consts::TAU;

    let sets = symbol.spectral_sets();
    let (g1, g2) = (sets.gamma1, sets.gamma2);
    let pad = 0.08 * (g2 - g1).max(1e-6);
    let (ylo, yhi) = (g1 - pad, g2 + pad);
    let px = |x: f64| ML + (WIDTH - ML - MR) * x / TAU;
    let py = |y: f64| HEIGHT - MB - (HEIGHT - MB - MT) * (y - ylo) / (yhi - ylo);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str(&format!("<!-- config_hash: {hash} seed: {seed} -->\n"));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

    if let Some(part) = partition {
        let strips: [(&[(f64, f64)], &str, &str); 3] = [
            (&part.thin, "#2e7d32", "thin"),
            (&part.thick, "#1565c0", "thick"),
            (&part.mixed, "#ef6c00", "mixed"),
        ];
        for (intervals, color, _label) in strips {
            for &(a, b) in intervals {
                s.push_str(&format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\" \
                     opacity=\"0.14\"/>\n",
                    sig(px(0.0)),
                    sig(py(b)),
                    sig(px(TAU) - px(0.0)),
                    sig((py(a) - py(b)).max(0.5)),
                ));
                // solid tab at the left edge so thin strips stay visible
                s.push_str(&format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"8\" height=\"{}\" fill=\"{color}\"/>\n",
                    sig(px(0.0) - 12.0),
                    sig(py(b)),
                    sig((py(a) - py(b)).max(1.5)),
                ));
            }
        }
        for &lam in &part.exceptional {
            s.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#b71c1c\" \
                 stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
                sig(px(0.0)),
                sig(py(lam)),
                sig(px(TAU)),
                sig(py(lam)),
            ));
        }
        let mut lx = ML + 8.0;
        for (_, color, label) in strips {
            s.push_str(&format!(
                "<rect x=\"{}\" y=\"14\" width=\"14\" height=\"10\" fill=\"{color}\" \
                 opacity=\"0.6\"/>\n",
                sig(lx)
            ));
            s.push_str(&format!(
                "<text x=\"{}\" y=\"23\" font-size=\"12\" font-family=\"monospace\" \
                 fill=\"#333333\">{label}</text>\n",
                sig(lx + 18.0)
            ));
            lx += 90.0;
        }
    }

    if let Some((lo, hi)) = band {
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#616161\" \
             opacity=\"0.18\"/>\n",
            sig(px(0.0)),
            sig(py(hi)),
            sig(px(TAU) - px(0.0)),
            sig(py(lo) - py(hi)),
        ));
    }

    // axes
    s.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444444\"/>\n",
        sig(ML),
        sig(MT),
        sig(WIDTH - ML - MR),
        sig(HEIGHT - MT - MB),
    ));
    for k in 0..=4 {
        let x = TAU * k as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\" \
             fill=\"#333333\" text-anchor=\"middle\">{}</text>\n",
            sig(px(x)),
            sig(HEIGHT - MB + 16.0),
            ["0", "pi/2", "pi", "3pi/2", "2pi"][k],
        ));
    }
    for k in 0..=4 {
        let y = ylo + (yhi - ylo) * k as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"monospace\" \
             fill=\"#333333\" text-anchor=\"end\">{:.3}</text>\n",
            sig(ML - 16.0),
            sig(py(y) + 4.0),
            y,
        ));
    }

    // graph: one polyline per piece so jumps stay open
    for piece in symbol.pieces() {
        let k = 160;
        let mut pts = String::new();
        for j in 0..=k {
            let frac = j as f64 / k as f64;
            let x = piece.left + (piece.right - piece.left) * frac;
            let y = piece.eval(x);
            if j > 0 {
                pts.push(' ');
            }
            pts.push_str(&format!("{},{}", sig(px(x)), sig(py(y))));
        }
        s.push_str(&format!(
            "<polyline points=\"{pts}\" fill=\"none\" stroke=\"#1f3b73\" stroke-width=\"1.8\"/>\n"
        ));
    }

    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" font-family=\"monospace\" \
         fill=\"#111111\" text-anchor=\"end\">{}</text>\n",
        sig(WIDTH - MR - 4.0),
        sig(MT - 8.0),
        symbol.name(),
    ));
    s.push_str("</svg>\n");
    s
}
