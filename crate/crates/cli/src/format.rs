use serde_json::{Number, Value};

/// 17 significant digits, exponent form.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number that keeps all 17 digits in the output text.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    serde_json::from_str::<Number>(&float(x)).map(Value::Number).unwrap_or(Value::Null)
}

pub fn vector<'a>(xs: impl IntoIterator<Item = &'a f64>) -> Value {
    Value::Array(xs.into_iter().map(|x| num(*x)).collect())
}

pub fn rows(n: usize, m: usize, at: impl Fn(usize, usize) -> f64) -> Value {
    Value::Array((0..n).map(|i| Value::Array((0..m).map(|j| num(at(i, j))).collect())).collect())
}

pub fn table(headers: &[String], body: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width = headers.iter().map(String::len).collect::<Vec<_>>();
    for row in body {
        for (c, cell) in row.iter().enumerate().take(cols) {
            width[c] = width[c].max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells.iter().enumerate().map(|(c, s)| format!("{s:>w$}", w = width[c])).collect::<Vec<_>>().join("  ")
    };
    let mut out = line(headers);
    out.push('\n');
    for row in body {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}
