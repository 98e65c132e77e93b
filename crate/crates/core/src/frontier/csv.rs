//! CSV encoding of frontiers and deviation reports.
//!
//! Frontier files have the header `risk,return,lambda,assets,weights`.
//! `assets` holds 1-based asset numbers and `weights` the matching weights,
//! both `;`-separated. `lambda` is empty for exact-frontier rows.

use super::{DeviationReport, Frontier, FrontierPoint};
use crate::error::{Error, Result};
use crate::portfolio::Portfolio;
use crate::scalar::Scalar;

pub const FRONTIER_COLUMNS: [&str; 5] = ["risk", "return", "lambda", "assets", "weights"];
pub const REPORT_COLUMNS: [&str; 2] = ["metric", "value"];

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::CsvRow {
        line,
        column: String::new(),
        reason: e.to_string(),
    }
}

fn join<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().collect::<Vec<_>>().join(";")
}

/// Points in frontier order. Numbers use the shortest round-trip decimal
/// form, so equal frontiers always encode to identical bytes.
pub fn write_frontier_csv<T: Scalar>(frontier: &Frontier<T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FRONTIER_COLUMNS).expect("in-memory write");
    for p in frontier.points() {
        let (assets, weights) = match &p.portfolio {
            Some(pf) => {
                let pairs = pf.sorted_pairs();
                (
                    join(pairs.iter().map(|(a, _)| (a + 1).to_string())),
                    join(pairs.iter().map(|(_, w)| w.to_string())),
                )
            }
            None => (String::new(), String::new()),
        };
        let lambda = p.lambda.map(|l| l.to_string()).unwrap_or_default();
        w.write_record([p.risk.to_string(), p.ret.to_string(), lambda, assets, weights])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    for (pos, name) in expected.iter().enumerate() {
        match found.get(pos) {
            Some(f) if f.trim() == *name => {}
            Some(f) => {
                return Err(Error::SchemaMismatch(format!(
                    "expected column `{name}` at position {}, found `{f}`",
                    pos + 1
                )))
            }
            None => return Err(Error::SchemaMismatch(format!("missing column `{name}`"))),
        }
    }
    if found.len() > expected.len() {
        return Err(Error::SchemaMismatch(format!(
            "unexpected column `{}`",
            &found[expected.len()]
        )));
    }
    Ok(())
}

fn parse_number<T: Scalar>(field: &str, line: usize, column: &str) -> Result<T> {
    let bad = |reason: String| Error::CsvRow {
        line,
        column: column.to_string(),
        reason,
    };
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|e| bad(format!("`{field}` is not a number ({e})")))?;
    if !v.is_finite() {
        return Err(bad(format!("`{field}` is not finite")));
    }
    T::from_f64(v).ok_or_else(|| bad(format!("`{field}` does not fit the scalar type")))
}

fn split_list(field: &str) -> Vec<&str> {
    let field = field.trim();
    if field.is_empty() {
        Vec::new()
    } else {
        field.split(';').collect()
    }
}

/// Parses a frontier file. Input with no header at all is an empty frontier.
pub fn read_frontier_csv<T: Scalar>(text: &str) -> Result<Frontier<T>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_error)?.clone();
    if headers.is_empty() {
        return Ok(Frontier::default());
    }
    check_header(&headers, &FRONTIER_COLUMNS)?;

    let mut points = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let risk = parse_number(&record[0], line, "risk")?;
        let ret = parse_number(&record[1], line, "return")?;
        let lambda = match record[2].trim() {
            "" => None,
            s => Some(parse_number(s, line, "lambda")?),
        };
        let ids = split_list(&record[3]);
        let ws = split_list(&record[4]);
        if ids.len() != ws.len() {
            return Err(Error::CsvRow {
                line,
                column: "weights".into(),
                reason: format!("{} assets but {} weights", ids.len(), ws.len()),
            });
        }
        let portfolio = if ids.is_empty() {
            None
        } else {
            let assets = ids
                .iter()
                .map(|s| match s.trim().parse::<usize>() {
                    Ok(a) if a >= 1 => Ok(a - 1),
                    _ => Err(Error::CsvRow {
                        line,
                        column: "assets".into(),
                        reason: format!("`{s}` is not an asset number"),
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            let weights = ws
                .iter()
                .map(|s| parse_number(s, line, "weights"))
                .collect::<Result<Vec<T>>>()?;
            Some(Portfolio::new(assets, weights).map_err(|e| Error::CsvRow {
                line,
                column: "assets".into(),
                reason: e.to_string(),
            })?)
        };
        points.push(FrontierPoint {
            risk,
            ret,
            lambda,
            portfolio,
        });
    }
    Ok(Frontier::from_points(points))
}

/// `metric,value` rows for the aggregate errors, plus `time_seconds` when
/// given.
pub fn write_report_csv<T: Scalar>(report: &DeviationReport<T>, time_seconds: Option<f64>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS).expect("in-memory write");
    let rows = [
        ("median", report.median_error),
        ("mean", report.mean_error),
        ("risk_error", report.risk_error),
        ("return_error", report.return_error),
    ];
    for (name, v) in rows {
        w.write_record([name.to_string(), v.to_string()])
            .expect("in-memory write");
    }
    if let Some(t) = time_seconds {
        w.write_record(["time_seconds".to_string(), t.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Reads `metric,value` rows in file order.
pub fn read_report_csv(text: &str) -> Result<Vec<(String, f64)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_error)?.clone();
    check_header(&headers, &REPORT_COLUMNS)?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            Ok((rec[0].to_string(), parse_number::<f64>(&rec[1], line, "value")?))
        })
        .collect()
}
