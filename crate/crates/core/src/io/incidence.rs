use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::estimation::IncidenceSeries;

enum DayColumn {
    Index,
    Date,
}

/// Reads a `day,cases` or `date,cases` file. Days become 0-based offsets
/// from the first row; days with no row get zero cases.
pub fn parse_incidence_csv(path: &Path) -> Result<IncidenceSeries> {
    read_incidence(std::fs::File::open(path)?)
}

pub fn read_incidence<R: Read>(r: R) -> Result<IncidenceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = rdr.headers()?.clone();
    let column = match (headers.get(0), headers.get(1), headers.len()) {
        (Some("day"), Some("cases"), 2) => DayColumn::Index,
        (Some("date"), Some("cases"), 2) => DayColumn::Date,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected header `day,cases` or `date,cases`, got `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            })
        }
    };

    let mut first: Option<i64> = None;
    let mut start_date = None;
    let mut counts: Vec<u64> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| Error::Parse { line, message };
        let key = &rec[0];
        let day = match column {
            DayColumn::Index => key
                .parse::<i64>()
                .map_err(|e| err(format!("bad day index `{key}`: {e}")))?,
            DayColumn::Date => {
                let date = NaiveDate::parse_from_str(key, "%Y-%m-%d")
                    .map_err(|e| err(format!("bad date `{key}`: {e}")))?;
                start_date.get_or_insert(date);
                date.num_days_from_ce() as i64
            }
        };
        let cases_raw = &rec[1];
        let cases: i64 = cases_raw
            .parse()
            .map_err(|e| err(format!("bad case count `{cases_raw}`: {e}")))?;
        if cases < 0 {
            return Err(err(format!("negative case count {cases}")));
        }

        let origin = *first.get_or_insert(day);
        let offset = day - origin;
        let expected = counts.len() as i64;
        if counts.is_empty() {
            counts.push(cases as u64);
        } else if offset == expected - 1 {
            return Err(err(format!("duplicate day `{key}`")));
        } else if offset < expected {
            return Err(err(format!("day `{key}` is out of order")));
        } else {
            counts.resize(offset as usize, 0);
            counts.push(cases as u64);
        }
    }
    if counts.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    let series = IncidenceSeries::from_incident(counts);
    Ok(match start_date {
        Some(d) => series.with_start_date(d),
        None => series,
    })
}
