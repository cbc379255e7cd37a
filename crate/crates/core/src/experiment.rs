//! Reading unreplicated 2^k experiments from CSV.
//!
//! The header names k single-letter factor columns `A`, `B`, ... and a response
//! column `y`. Factor levels are coded −1/+1, −/+ or 1/2 (1 is low), one coding
//! per file. Rows may come in any order but must cover every treatment
//! combination exactly once.

use std::io::Read;
use std::path::Path;

use crate::design::{build_design, FactorialDesign};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub design: FactorialDesign,
    /// Response in standard (Yates) run order.
    pub y: Vec<f64>,
    /// 1-based data row that supplied each run.
    pub source_rows: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Coding {
    Signed,
    Symbol,
    OneTwo,
}

fn classify(token: &str) -> Option<(Coding, i8)> {
    match token {
        "-1" => Some((Coding::Signed, -1)),
        "+1" => Some((Coding::Signed, 1)),
        "-" => Some((Coding::Symbol, -1)),
        "+" => Some((Coding::Symbol, 1)),
        "2" => Some((Coding::OneTwo, 1)),
        _ => None,
    }
}

/// Standard treatment-combination label: lowercase letters of the high
/// factors, `(1)` when all are low.
pub fn treatment_label(levels: &[i8]) -> String {
    let s: String = levels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0)
        .map(|(f, _)| (b'a' + f as u8) as char)
        .collect();
    if s.is_empty() {
        "(1)".into()
    } else {
        s
    }
}

pub fn read_experiment(path: &Path) -> Result<Experiment> {
    let file = std::fs::File::open(path)?;
    parse_experiment(file).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_experiment<R: Read>(input: R) -> Result<Experiment> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let y_col = header
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| Error::Parse("no response column named 'y'".into()))?;
    let mut factor_cols = Vec::new();
    for (i, h) in header.iter().enumerate() {
        if i == y_col {
            continue;
        }
        let b = h.as_bytes();
        if b.len() != 1 || !b[0].is_ascii_uppercase() {
            return Err(Error::Parse(format!("column '{h}' is neither a factor letter nor 'y'")));
        }
        factor_cols.push(((b[0] - b'A') as usize, i));
    }
    factor_cols.sort();
    let k = factor_cols.len();
    if factor_cols.iter().enumerate().any(|(f, &(letter, _))| f != letter) {
        return Err(Error::Parse(format!("factor columns must be A..{}", (b'A' + k as u8 - 1) as char)));
    }
    let design = build_design(k)?;

    let mut rows: Vec<(usize, Vec<String>, f64)> = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = r + 1;
        let codes = factor_cols.iter().map(|&(_, c)| rec[c].to_string()).collect();
        let y: f64 = rec[y_col]
            .parse()
            .map_err(|_| Error::Parse(format!("row {line}: response '{}' is not a number", &rec[y_col])))?;
        if !y.is_finite() {
            return Err(Error::Parse(format!("row {line}: response is not finite")));
        }
        rows.push((line, codes, y));
    }

    // "1" is ambiguous between −1/+1 and 1/2 codings; the rest of the file decides.
    let mut coding = None;
    for (line, codes, _) in &rows {
        for c in codes {
            if c == "1" {
                continue;
            }
            let Some((this, _)) = classify(c) else {
                return Err(Error::Parse(format!("row {line}: factor level '{c}' is not one of -1/+1, -/+, 1/2")));
            };
            match coding {
                None => coding = Some(this),
                Some(prev) if prev != this => {
                    return Err(Error::Parse(format!("row {line}: level '{c}' mixes factor codings")));
                }
                _ => {}
            }
        }
    }
    let coding = coding.unwrap_or(Coding::Signed);
    if coding == Coding::Symbol && rows.iter().any(|(_, c, _)| c.iter().any(|x| x == "1")) {
        return Err(Error::Parse("level '1' mixes factor codings".into()));
    }
    let level = |c: &str| -> i8 {
        match (c, coding) {
            ("1", Coding::OneTwo) => -1,
            ("1", _) => 1,
            _ => classify(c).expect("checked above").1,
        }
    };

    let n = design.n();
    let mut slot: Vec<Option<usize>> = vec![None; n];
    let mut y = vec![0.0; n];
    let mut duplicates = Vec::new();
    for (line, codes, value) in &rows {
        let levels: Vec<i8> = codes.iter().map(|c| level(c)).collect();
        let run = design.run_index(&levels).expect("levels are ±1");
        match slot[run] {
            Some(first) => duplicates.push(format!("row {line} repeats {} from row {first}", treatment_label(&levels))),
            None => {
                slot[run] = Some(*line);
                y[run] = *value;
            }
        }
    }
    let missing: Vec<String> = (0..n)
        .filter(|&r| slot[r].is_none())
        .map(|r| treatment_label(&design.run_levels(r)))
        .collect();
    if !duplicates.is_empty() || !missing.is_empty() {
        let mut parts = duplicates;
        if !missing.is_empty() {
            parts.push(format!("missing {}", missing.join(" ")));
        }
        return Err(Error::Validation(format!("not a complete 2^{k} design: {}", parts.join("; "))));
    }
    Ok(Experiment { design, y, source_rows: slot.into_iter().map(|s| s.expect("filled")).collect() })
}

/// Writes a complete experiment in standard order with −1/+1 codes.
pub fn write_experiment(design: &FactorialDesign, y: &[f64], path: &Path) -> Result<()> {
    if y.len() != design.n() {
        return Err(Error::Domain("response length does not match the design".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..design.k()).map(|f| ((b'A' + f as u8) as char).to_string()).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (r, v) in y.iter().enumerate() {
        let mut row: Vec<String> = design.run_levels(r).iter().map(|&l| format!("{l:+}")).collect();
        row.push(format!("{v}"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const K2: &str = "A,B,y\n-1,-1,1.0\n+1,-1,2.0\n-1,+1,3.0\n+1,+1,4.5\n";

    #[test]
    fn reads_signed_codes_in_any_order() {
        let shuffled = "B,y,A\n1,4.5,1\n-1,1.0,-1\n1,3.0,-1\n-1,2.0,1\n";
        let a = parse_experiment(K2.as_bytes()).unwrap();
        let b = parse_experiment(shuffled.as_bytes()).unwrap();
        assert_eq!(a.y, vec![1.0, 2.0, 3.0, 4.5]);
        assert_eq!(a.y, b.y);
        assert_eq!(b.source_rows, vec![2, 4, 3, 1]);
    }

    #[test]
    fn reads_symbol_and_one_two_codes() {
        let sym = "A,B,y\n-,-,1.0\n+,-,2.0\n-,+,3.0\n+,+,4.5\n";
        let ot = "A,B,y\n1,1,1.0\n2,1,2.0\n1,2,3.0\n2,2,4.5\n";
        assert_eq!(parse_experiment(sym.as_bytes()).unwrap().y, vec![1.0, 2.0, 3.0, 4.5]);
        assert_eq!(parse_experiment(ot.as_bytes()).unwrap().y, vec![1.0, 2.0, 3.0, 4.5]);
    }

    #[test]
    fn incomplete_design_lists_rows() {
        let dup = "A,B,y\n-1,-1,1\n1,-1,2\n-1,-1,3\n1,1,4\n";
        let err = parse_experiment(dup.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Validation(_)));
        assert!(msg.contains("row 3 repeats (1) from row 1"), "{msg}");
        assert!(msg.contains("missing b"), "{msg}");
    }

    #[test]
    fn bad_codes_are_parse_errors() {
        for bad in ["A,B,y\n0,-1,1\n1,-1,2\n-1,1,3\n1,1,4\n", "A,B,y\n-,-1,1\n+,-,2\n-,+,3\n+,+,4\n", "A,C,y\n1,1,1\n"] {
            assert!(matches!(parse_experiment(bad.as_bytes()), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn write_then_read() {
        let d = build_design(3).unwrap();
        let y: Vec<f64> = (0..8).map(|i| i as f64 * 0.25 - 1.0).collect();
        let dir = std::env::temp_dir().join(format!("fscreen-exp-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("e.csv");
        write_experiment(&d, &y, &p).unwrap();
        assert_eq!(read_experiment(&p).unwrap().y, y);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
