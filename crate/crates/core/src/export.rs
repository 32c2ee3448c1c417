//! Line-delimited JSON export of coefficient tables: one header record
//! followed by one record per composition.
//!
//! ```text
//! {"record":"header","family":"bc","n":2,"max_level":4,"xi":[[0.1,0.2],...],...}
//! {"family":"bc","nu":[0,0],"re":"1.0000000000000000e0","im":"0.0000000000000000e0"}
//! ```
//!
//! Numbers are written with 17 significant digits.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::domain::{Composition, Couplings, Family, SpectralPoint, C64};
use crate::error::{Error, Result};
use crate::hcseries::CoeffTable;

#[derive(Serialize, Deserialize)]
struct Header {
    record: String,
    family: Family,
    n: usize,
    max_level: usize,
    xi: Vec<[String; 2]>,
    g: [[String; 2]; 3],
    a: Vec<[String; 2]>,
    regularizer: Option<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    family: Family,
    nu: Vec<i32>,
    re: String,
    im: String,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn pair(z: C64) -> [String; 2] {
    [fmt(z.re), fmt(z.im)]
}

fn parse(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Format(format!("not a number: '{s}'")))
}

fn unpair(p: &[String; 2]) -> Result<C64> {
    Ok(C64::new(parse(&p[0])?, parse(&p[1])?))
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

pub fn write_table(table: &CoeffTable, mut out: impl Write) -> Result<()> {
    let g = table.couplings();
    let header = Header {
        record: "header".into(),
        family: table.family(),
        n: table.n(),
        max_level: table.max_level(),
        xi: table.xi().iter().map(|&z| pair(z)).collect(),
        g: [pair(g.gs), pair(g.gm), pair(g.gl)],
        a: g.a.iter().map(|&z| pair(z)).collect(),
        regularizer: table.regularizer().map(pair),
    };
    writeln!(out, "{}", serde_json::to_string(&header).map_err(io)?).map_err(io)?;
    for (nu, v) in table.iter() {
        let e = Entry {
            family: table.family(),
            nu: nu.0.clone(),
            re: fmt(v.re),
            im: fmt(v.im),
        };
        writeln!(out, "{}", serde_json::to_string(&e).map_err(io)?).map_err(io)?;
    }
    Ok(())
}

pub fn read_table(input: impl BufRead) -> Result<CoeffTable> {
    let mut lines = input.lines().filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let first = lines.next().ok_or_else(|| Error::Format("empty table file".into()))?.map_err(io)?;
    let header: Header = serde_json::from_str(&first).map_err(|e| Error::Format(format!("header: {e}")))?;
    if header.record != "header" {
        return Err(Error::Format("first record must be the header".into()));
    }
    let xi = SpectralPoint(header.xi.iter().map(unpair).collect::<Result<_>>()?);
    let g = Couplings {
        gs: unpair(&header.g[0])?,
        gm: unpair(&header.g[1])?,
        gl: unpair(&header.g[2])?,
        a: header.a.iter().map(unpair).collect::<Result<_>>()?,
    };
    if xi.dim() != header.n {
        return Err(Error::Format(format!("header n = {} but xi has {} entries", header.n, xi.dim())));
    }
    let regularizer = header.regularizer.as_ref().map(unpair).transpose()?;
    let mut entries = Vec::new();
    for line in lines {
        let line = line.map_err(io)?;
        let e: Entry = serde_json::from_str(&line).map_err(|err| Error::Format(format!("entry: {err}")))?;
        if e.family != header.family {
            return Err(Error::Format(format!("entry family {} differs from header", e.family)));
        }
        entries.push((Composition(e.nu), C64::new(parse(&e.re)?, parse(&e.im)?)));
    }
    CoeffTable::from_entries(header.family, xi, g, header.max_level, regularizer, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hcseries::{build_table, series_eval};
    use crate::Settings;

    #[test]
    fn round_trip_reproduces_series() {
        let g = Couplings::new(C64::new(0.3, 0.1), C64::new(0.7, 0.0), C64::new(0.4, 0.2), 2);
        let xi = SpectralPoint(vec![C64::new(0.52, 0.01), C64::new(-0.3, 0.2)]);
        let t = build_table(Family::Bc, &xi, &g, &Settings::default().with_level(8), true).unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        let back = read_table(buf.as_slice()).unwrap();
        assert_eq!(back.regularizer(), t.regularizer());
        let x = [3.0, 1.5];
        let a = series_eval(&t, &x).unwrap().value;
        let b = series_eval(&back, &x).unwrap().value;
        assert!((a - b).norm() <= 1e-15 * a.norm());
    }

    #[test]
    fn level_zero_table_has_one_record() {
        let g = Couplings::real(0.3, 0.7, 0.4, 1);
        let xi = SpectralPoint(vec![C64::new(0.2, 0.3)]);
        let t = build_table(Family::Cs, &xi, &g, &Settings::default().with_level(0), false).unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].contains("\"nu\":[0]") && lines[1].contains("1.0000000000000000e0"));
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(read_table("".as_bytes()).is_err());
        assert!(read_table("{\"record\":\"entry\"}".as_bytes()).is_err());
    }
}
