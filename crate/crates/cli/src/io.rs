use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;
use specbox::inclusion::SymbolAlphabet;
use specbox::operator::OperatorSpec;
use specbox::C64;

use crate::args::OutputArgs;

pub const CSV_TAG: &str = "# specbox-csv v1";

/// An error carrying its process exit code.
#[derive(Debug)]
pub struct Coded {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Coded {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    Coded {
        code: 2,
        message: message.into(),
    }
    .into()
}

pub fn input_file(message: impl Into<String>) -> anyhow::Error {
    Coded {
        code: 3,
        message: message.into(),
    }
    .into()
}

/// An operator file together with its optional embedded alphabet.
pub struct LoadedOperator {
    pub op: OperatorSpec,
    pub alphabet: Option<SymbolAlphabet>,
}

pub fn load_operator(path: &Path) -> Result<LoadedOperator> {
    let text = fs::read_to_string(path).map_err(|e| input_file(format!("{}: {e}", path.display())))?;
    let op = OperatorSpec::from_json_str(&text).map_err(|e| input_file(format!("{}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| input_file(format!("{}: {e}", path.display())))?;
    let alphabet = match raw.get("alphabet") {
        Some(v) => Some(
            SymbolAlphabet::from_json_str(&v.to_string())
                .map_err(|e| input_file(format!("{}: alphabet: {e}", path.display())))?,
        ),
        None => None,
    };
    Ok(LoadedOperator { op, alphabet })
}

pub fn load_alphabet(path: &Path) -> Result<SymbolAlphabet> {
    let text = fs::read_to_string(path).map_err(|e| input_file(format!("{}: {e}", path.display())))?;
    SymbolAlphabet::from_json_str(&text).map_err(|e| input_file(format!("{}: {e}", path.display())))
}

/// Integers separated by whitespace or commas; `#` starts a comment.
pub fn load_k_file(path: &Path) -> Result<Vec<i64>> {
    let text = fs::read_to_string(path).map_err(|e| input_file(format!("{}: {e}", path.display())))?;
    let mut ks = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            ks.push(
                tok.parse()
                    .map_err(|_| input_file(format!("{}: bad index `{tok}`", path.display())))?,
            );
        }
    }
    if ks.is_empty() {
        return Err(input_file(format!("{}: no indices", path.display())));
    }
    Ok(ks)
}

/// Points from a CSV with `re` and `im` columns, optionally filtered on an `n` column.
pub fn load_points(path: &Path, n: Option<usize>) -> Result<Vec<C64>> {
    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .context("point file has no header")?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (re, im) = col("re")
        .zip(col("im"))
        .context("point file needs `re` and `im` columns")?;
    let n_col = col("n");
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if let (Some(want), Some(c)) = (n, n_col) {
            if cells.get(c).and_then(|v| v.parse::<usize>().ok()) != Some(want) {
                continue;
            }
        }
        let get = |c: usize| -> Result<f64> {
            cells
                .get(c)
                .and_then(|v| v.parse().ok())
                .with_context(|| format!("row {} is malformed", i + 1))
        };
        out.push(C64::new(get(re)?, get(im)?));
    }
    Ok(out)
}

/// CSV output with the schema tag as the first line.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            buf: format!("{CSV_TAG}\n{}\n", columns.join(",")),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self, out: &OutputArgs) -> Result<()> {
        write_to(out.output.as_ref(), &self.buf, false)
    }
}

pub fn emit_summary(out: &OutputArgs, summary: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)? + "\n";
    write_to(out.summary.as_ref(), &text, true)
}

fn write_to(path: Option<&PathBuf>, text: &str, stderr_default: bool) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| p.display().to_string()),
        None if stderr_default => Ok(std::io::stderr().write_all(text.as_bytes())?),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

/// Shortest round-trip form; non-finite values print as `NaN` or `inf`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        Value::from(x).to_string()
    } else {
        format!("{x}")
    }
}

pub fn complex_json(z: C64) -> Value {
    serde_json::json!([z.re, z.im])
}
