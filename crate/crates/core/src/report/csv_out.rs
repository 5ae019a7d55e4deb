//! The row CSV: `family,X,T,tau,theta,computed,reference,ratio,budget,status`.

use crate::error::{LabError, Result};

use super::{Family, GridPoint, ReportRow, Status};

pub const CSV_HEADER: &str = "family,X,T,tau,theta,computed,reference,ratio,budget,status";

// Seventeen significant digits round-trip every f64.
fn number(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn emit_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in rows {
        let p = &r.point;
        w.write_record([
            r.family.tag().to_string(),
            number(Some(p.x)),
            number(Some(p.t)),
            number(Some(p.tau)),
            number(p.theta),
            number(r.computed),
            number(r.reference),
            number(r.ratio),
            number(r.budget),
            r.status.tag().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn field(record: &csv::StringRecord, i: usize, line: usize) -> Result<Option<f64>> {
    let s = record.get(i).unwrap_or("");
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| LabError::Parse {
        line,
        message: format!("bad number {s:?}"),
    })
}

/// Read rows back; notes are not stored and come back empty.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| LabError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(LabError::Parse {
            line: 1,
            message: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| LabError::Parse {
            line,
            message: e.to_string(),
        })?;
        let bad = |m: &str| LabError::Parse {
            line,
            message: m.to_string(),
        };
        let family = Family::from_tag(&record[0]).ok_or_else(|| bad("unknown family"))?;
        let status = Status::from_tag(&record[9]).ok_or_else(|| bad("unknown status"))?;
        let need = |i| field(&record, i, line)?.ok_or_else(|| bad("missing parameter"));
        let point = GridPoint {
            x: need(1)?,
            t: need(2)?,
            tau: need(3)?,
            theta: field(&record, 4, line)?,
        };
        rows.push(ReportRow {
            family,
            point,
            computed: field(&record, 5, line)?,
            reference: field(&record, 6, line)?,
            ratio: field(&record, 7, line)?,
            budget: field(&record, 8, line)?,
            status,
            note: String::new(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_round_trips() {
        let p = GridPoint {
            x: 50.0,
            t: 2000.0,
            tau: 0.8,
            theta: None,
        };
        let row = ReportRow::new(Family::Hbg, p, 2280.4718123456789, 0.1 + 0.2, Some(1.229), Status::Pass);
        let text = emit_csv(std::slice::from_ref(&row));
        assert!(text.starts_with(CSV_HEADER));
        let back = parse_csv(&text).unwrap();
        assert_eq!(back, vec![row.clone()]);
        let r = &back[0];
        assert!((r.ratio.unwrap() - r.computed.unwrap() / r.reference.unwrap()).abs() <= 1e-15 * r.ratio.unwrap());
        assert!(text.lines().nth(1).unwrap().contains(",,"));
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }
}
