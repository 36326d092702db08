//! Row-oriented datasets with fixed 12-significant-digit formatting.

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e−4, 1e12)`.
pub fn fmt_g12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (name, cell) in self.columns.iter().zip(row) {
                        obj.insert((*name).to_string(), json_cell(cell));
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => fmt_g12(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(b) => if *b { "1" } else { "0" }.to_string(),
        Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Cell::Text(t) => t.clone(),
    }
}

/// JSON numbers carry the same 12 digits as the CSV.
pub fn json_num(v: f64) -> Value {
    fmt_g12(v)
        .parse::<f64>()
        .ok()
        .and_then(Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(v) => json_num(*v),
        Cell::Int(v) => Value::from(*v),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(t) => Value::String(t.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (123456.789, "123456.789"),
            (1e-5, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (7.3966623271919885949e-10, "7.39666232719e-10"),
            (1e12, "1e+12"),
            (999999999999.9, "1e+12"),
            (2f64.powi(10), "1024"),
            (f64::NAN, "nan"),
        ];
        for (v, want) in cases {
            assert_eq!(fmt_g12(v), want, "{v}");
        }
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(vec!["a", "b", "c"]);
        t.push(vec![0.1.into(), 3usize.into(), "ok".into()]);
        assert_eq!(t.to_csv(), "a,b,c\n0.1,3,ok\n");
        assert_eq!(t.to_json_value().to_string(), r#"[{"a":0.1,"b":3,"c":"ok"}]"#);
    }
}
