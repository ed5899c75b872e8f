//! The `papertorus v1` text format.
//!
//! ```text
//! papertorus v1
//! precision 64
//! vertices 8
//! 0 0.755 0.65 0.98050571585977935561653820085693
//! ...
//! faces 16
//! 0 1 2
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored on input. Output is
//! canonical: numbers are plain decimals with at most `precision`
//! significant digits and no trailing zeros.

use std::path::Path;

use crate::combinatorics::Triangulation;
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::numeric::{format_decimal, parse_decimal, Precision};

pub const HEADER: &str = "papertorus v1";

pub fn read_torus(path: impl AsRef<Path>) -> Result<Configuration> {
    parse_torus(&std::fs::read_to_string(path)?)
}

pub fn write_torus(c: &Configuration, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_torus(c))?;
    Ok(())
}

pub fn format_torus(c: &Configuration) -> String {
    let digits = c.precision().digits();
    let mut out = format!(
        "{HEADER}\nprecision {digits}\nvertices {}\n",
        c.coordinates().len()
    );
    for (i, p) in c.coordinates().iter().enumerate() {
        out.push_str(&format!(
            "{i} {} {} {}\n",
            format_decimal(&p[0], digits),
            format_decimal(&p[1], digits),
            format_decimal(&p[2], digits)
        ));
    }
    out.push_str(&format!("faces {}\n", c.triangulation().faces().len()));
    for f in c.triangulation().faces() {
        out.push_str(&format!("{} {} {}\n", f[0], f[1], f[2]));
    }
    out
}

pub fn parse_torus(text: &str) -> Result<Configuration> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| {
            Error::parse(
                text.lines().count() + 1,
                format!("unexpected end of file, expected {what}"),
            )
        })
    };

    let (n, header) = next("header")?;
    if header != HEADER {
        return Err(Error::parse(n, format!("expected `{HEADER}`")));
    }
    let (n, line) = next("precision")?;
    let digits: u32 = keyword_count(n, line, "precision")? as u32;
    if digits == 0 {
        return Err(Error::parse(n, "precision must be positive"));
    }
    let precision = Precision::new(digits);

    let (n, line) = next("vertices")?;
    let vcount = keyword_count(n, line, "vertices")?;
    let mut coords = Vec::with_capacity(vcount);
    for i in 0..vcount {
        let (n, line) = next("vertex row")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(n, "vertex row needs `<idx> <x> <y> <z>`"));
        }
        if fields[0].parse::<usize>().ok() != Some(i) {
            return Err(Error::parse(n, format!("expected vertex index {i}")));
        }
        let mut p = Vec::with_capacity(3);
        for s in &fields[1..] {
            p.push(
                parse_decimal(s, precision)
                    .ok_or_else(|| Error::parse(n, format!("bad decimal `{s}`")))?,
            );
        }
        coords.push(p.try_into().expect("three coordinates"));
    }

    let (fline, line) = next("faces")?;
    let fcount = keyword_count(fline, line, "faces")?;
    if fcount != 2 * vcount {
        return Err(Error::parse(
            fline,
            format!("{fcount} faces on {vcount} vertices violates the torus Euler relation F = 2V"),
        ));
    }
    let mut faces = Vec::with_capacity(fcount);
    for _ in 0..fcount {
        let (n, line) = next("face row")?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| Error::parse(n, format!("bad vertex index `{s}`")))
            })
            .collect::<Result<_>>()?;
        if idx.len() != 3 {
            return Err(Error::parse(n, "face row needs three vertex indices"));
        }
        faces.push([idx[0], idx[1], idx[2]]);
    }
    if let Some((n, _)) = lines.next() {
        return Err(Error::parse(n, "trailing content after faces"));
    }

    let t = Triangulation::new(vcount, faces).map_err(|e| Error::parse(fline, e.to_string()))?;
    Configuration::new(t, coords, precision)
}

fn keyword_count(n: usize, line: &str, keyword: &str) -> Result<usize> {
    let mut it = line.split_whitespace();
    if it.next() != Some(keyword) {
        return Err(Error::parse(n, format!("expected `{keyword} <count>`")));
    }
    let value = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(n, format!("expected `{keyword} <count>`")))?;
    if it.next().is_some() {
        return Err(Error::parse(
            n,
            format!("trailing tokens after `{keyword}`"),
        ));
    }
    Ok(value)
}
