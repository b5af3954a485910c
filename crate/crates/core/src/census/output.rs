//! Row writers: CSV with a header, JSON lines, and `n ln(count)` plot data.

use std::io::Write;

use super::CensusRow;
use crate::error::{Error, Result};

fn io(e: impl std::fmt::Display) -> Error {
    Error::Resource {
        cap: "output",
        needed: "write".into(),
        limit: e.to_string(),
    }
}

pub fn write_csv<W: Write>(rows: &[CensusRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    if rows.is_empty() {
        w.write_record(["n", "t", "radius", "count", "method"]).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_jsonl<W: Write>(rows: &[CensusRow], mut out: W) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row).map_err(io)?;
        writeln!(out).map_err(io)?;
    }
    Ok(())
}

/// Two whitespace-separated columns; rows with a zero count are skipped.
pub fn write_plot_data<W: Write>(rows: &[CensusRow], mut out: W) -> Result<()> {
    for row in rows.iter().filter(|r| r.count > 0) {
        writeln!(out, "{} {:.12}", row.n, (row.count as f64).ln()).map_err(io)?;
    }
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<CensusRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::Method;

    fn rows() -> Vec<CensusRow> {
        (1..=3)
            .map(|n| CensusRow {
                n,
                t: 3,
                radius: "1/100".into(),
                count: 2u64.pow(n + 1),
                method: Method::Exact,
                elapsed: Default::default(),
            })
            .collect()
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&rows(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,t,radius,count,method\n"));
        assert_eq!(read_csv(&text).unwrap(), rows());
    }

    #[test]
    fn jsonl_and_plot() {
        let mut buf = Vec::new();
        write_jsonl(&rows(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back: CensusRow = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, rows()[0]);
        let mut buf = Vec::new();
        write_plot_data(&rows(), &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("1 1.386294361"));
    }
}
