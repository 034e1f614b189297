//! Rectangular result tables and their CSV/JSON renderings.

use std::io::Write;

use qfl_core::C64;
use serde::Serialize;
use serde_json::value::RawValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Real,
    /// Rendered as two columns, `<name>_re` and `<name>_im`.
    Complex,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Complex(C64),
    Text(String),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    columns: Vec<(String, Kind)>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl ScanTable {
    pub fn new(columns: &[(&str, Kind)]) -> Self {
        Self { columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(), rows: Vec::new() }
    }

    /// Panics if the row does not match the column layout; rows are built
    /// by this crate, so a mismatch is a bug.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        for (cell, (name, kind)) in row.iter().zip(&self.columns) {
            let ok = matches!(
                (cell, kind),
                (Cell::Empty, _) | (Cell::Real(_), Kind::Real) | (Cell::Complex(_), Kind::Complex) | (Cell::Text(_), Kind::Text)
            );
            assert!(ok, "cell {cell:?} in column {name}");
        }
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Output column names with complex columns split.
    pub fn header(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, kind) in &self.columns {
            if *kind == Kind::Complex {
                out.push(format!("{name}_re"));
                out.push(format!("{name}_im"));
            } else {
                out.push(name.clone());
            }
        }
        out
    }

    fn flat_rows(&self) -> impl Iterator<Item = Vec<Field<'_>>> {
        self.rows.iter().zip(std::iter::repeat(&self.columns)).map(|(row, cols)| {
            let mut out = Vec::new();
            for (cell, (_, kind)) in row.iter().zip(cols) {
                match (cell, kind) {
                    (Cell::Real(v), _) => out.push(Field::Num(*v)),
                    (Cell::Complex(z), _) => {
                        out.push(Field::Num(z.re));
                        out.push(Field::Num(z.im));
                    }
                    (Cell::Text(s), _) => out.push(Field::Text(s)),
                    (Cell::Empty, Kind::Complex) => out.extend([Field::Empty, Field::Empty]),
                    (Cell::Empty, _) => out.push(Field::Empty),
                }
            }
            out
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(self.header())?;
        for row in self.flat_rows() {
            w.write_record(row.iter().map(|f| match f {
                Field::Num(v) => format_g12(*v),
                Field::Text(s) => s.to_string(),
                Field::Empty => String::new(),
            }))?;
        }
        w.flush()
    }

    fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct Doc {
            columns: Vec<String>,
            rows: Vec<Vec<Box<RawValue>>>,
        }
        let raw = |f: &Field| -> Box<RawValue> {
            let text = match f {
                Field::Num(v) if v.is_finite() => format_g12(*v),
                Field::Num(_) | Field::Empty => "null".to_string(),
                Field::Text(s) => serde_json::to_string(s).expect("strings serialize"),
            };
            RawValue::from_string(text).expect("valid JSON literal")
        };
        let doc = Doc { columns: self.header(), rows: self.flat_rows().map(|r| r.iter().map(raw).collect()).collect() };
        serde_json::to_writer(&mut *out, &doc)?;
        out.write_all(b"\n")
    }
}

enum Field<'a> {
    Num(f64),
    Text(&'a str),
    Empty,
}

/// C's `%#.12g`: 12 significant digits with trailing zeros kept, scientific
/// when the decimal exponent is below −4 or at least 12.
pub fn format_g12(v: f64) -> String {
    const P: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        let fixed = format!("{v:.decimals$}");
        // `#` keeps the decimal point even with no digits after it.
        if decimals == 0 {
            fixed + "."
        } else {
            fixed
        }
    }
}
