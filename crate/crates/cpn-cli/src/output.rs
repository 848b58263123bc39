//! Table assembly, number formatting and atomic file emission.

use std::path::Path;

use serde_json::json;

use crate::RunError;

/// One table cell. Probabilities far below f64 range travel as log values
/// so they can still be printed in scientific notation.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    /// Natural log of a probability; formatted as the probability itself.
    LnProb(f64),
    Int(u64),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Float(v) => fmt_sig12(*v),
            Value::LnProb(ln) => fmt_ln_prob(*ln),
            Value::Int(v) => v.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            // numbers go through the same string rendering so CSV and JSON
            // carry identical digits
            Value::Float(_) | Value::LnProb(_) => json!(self.render()),
            Value::Int(v) => json!(v),
            Value::Text(s) => json!(s),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Value::Float(v) => v.is_finite(),
            // -inf is an exactly-zero probability, which is fine
            Value::LnProb(ln) => !ln.is_nan() && *ln != f64::INFINITY,
            Value::Int(_) | Value::Text(_) => true,
        }
    }
}

/// 12 significant digits.
pub fn fmt_sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Scientific notation for a probability given as its natural log, exact
/// down far below the f64 underflow limit.
pub fn fmt_ln_prob(ln_p: f64) -> String {
    if ln_p == f64::NEG_INFINITY {
        return fmt_sig12(0.0);
    }
    if ln_p > -690.0 {
        return fmt_sig12(ln_p.exp());
    }
    let log10 = ln_p / std::f64::consts::LN_10;
    let mut exp = log10.floor() as i64;
    let mut mantissa = 10f64.powf(log10 - exp as f64);
    if mantissa >= 10.0 {
        mantissa /= 10.0;
        exp += 1;
    }
    format!("{mantissa:.11}e{exp}")
}

/// Rows plus provenance; renders to CSV or JSON.
#[derive(Debug, Clone)]
pub struct Table {
    provenance: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(provenance: Vec<String>, columns: Vec<&'static str>) -> Self {
        Table { provenance, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn check_finite(&self) -> Result<(), RunError> {
        for row in &self.rows {
            for cell in row {
                if !cell.is_finite() {
                    return Err(RunError::Numerical(format!(
                        "non-finite value in output row {row:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for line in &self.provenance {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "provenance": self.provenance,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

/// Write via a temporary file in the destination directory and rename, so a
/// failed run never leaves a partial output file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), RunError> {
    use std::io::Write;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new_in("."),
    }?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| RunError::Numerical(format!("cannot move output into place: {e}")))?;
    Ok(())
}
