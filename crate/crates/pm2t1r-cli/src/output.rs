//! Hand-built JSON rendering with deterministic key order and 9-significant-
//! digit numbers, so identical inputs always produce identical bytes.

use pm2t1r::kinematics::{EPS_REAL, KinematicSolution};
use pm2t1r::numfmt::{sig9, sig9_complex};

/// A JSON number token; non-finite values fall back to a quoted string so
/// the document stays parseable.
pub fn jnum(x: f64) -> String {
    if x.is_finite() {
        sig9(x)
    } else {
        format!("\"{}\"", sig9(x))
    }
}

/// A quoted, escaped JSON string.
pub fn jstr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn jbool(b: bool) -> &'static str {
    if b { "true" } else { "false" }
}

/// Real components render as bare numbers; anything with a notable
/// imaginary part renders as a quoted `a+bi` string.
pub fn jvalue(re: f64, im: f64) -> String {
    if re.is_nan() {
        "null".to_owned()
    } else if im.abs() <= EPS_REAL {
        jnum(re)
    } else {
        format!("\"{}\"", sig9_complex(re, im))
    }
}

/// One kinematic solution as an ordered JSON object; `labels` names the
/// three components (y/z/beta for forward, y1/y2/y3 for inverse).
pub fn solution_json(sol: &KinematicSolution, labels: [&str; 3]) -> String {
    let mut fields = vec![format!("\"branch\": \"{}\"", sol.branch)];
    for (i, label) in labels.iter().enumerate() {
        fields.push(format!(
            "\"{label}\": {}",
            jvalue(sol.values[i], sol.imag[i])
        ));
    }
    fields.push(format!("\"is_real\": {}", jbool(sol.is_real)));
    fields.push(format!("\"degenerate\": {}", jbool(sol.degenerate)));
    format!("{{{}}}", fields.join(", "))
}

/// A 3×3 matrix as a row-major JSON array of arrays.
pub fn matrix_json(m: &nalgebra::Matrix3<f64>) -> String {
    let rows: Vec<String> = (0..3)
        .map(|i| {
            let cells: Vec<String> = (0..3).map(|j| jnum(m[(i, j)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// An array of pre-rendered JSON items.
pub fn jarray<I: IntoIterator<Item = String>>(items: I) -> String {
    let items: Vec<String> = items.into_iter().collect();
    format!("[{}]", items.join(", "))
}

/// A pretty top-level object: one `"key": value` pair per line.
pub fn toplevel(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs
        .iter()
        .map(|(k, v)| format!("  \"{k}\": {v}"))
        .collect();
    format!("{{\n{}\n}}", body.join(",\n"))
}
