//! Text formats for distributions, couplings and triple systems.
//!
//! All three formats are line-based UTF-8 with `#` starting a comment and
//! rationals written exactly as `<int>` or `<int>/<int>` (never decimals),
//! so emitted files re-parse to identical values.
//!
//! - `.dist`: header `p=<int>`, then one distribution per line as `p`
//!   whitespace-separated rationals.
//! - `.cpl`: header `p=<int> s=<int>`, then one entry per line as
//!   `a b c <rat>` with unique keys, emitted in lexicographic key order.
//! - `.tri`: header `p=<int> n=<int>`, then one triple per line as
//!   `a1..an | b1..bn | c1..cn` residues.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::couple::Coupling;
use crate::dist::{Dist, DistError, Rat};
use crate::sumfree::{GroupVec, TripleSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    /// Structurally malformed input (usage error).
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    /// Well-formed numbers that do not make a valid distribution
    /// (invalid instance).
    #[error("line {line}: invalid distribution: {source}")]
    BadDist { line: usize, source: DistError },
}

fn malformed(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// Lines with comments stripped, paired with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((idx + 1, body))
    })
}

/// Parses `<int>` or `<int>/<int>` exactly.
pub fn parse_rat(token: &str) -> Option<Rat> {
    match token.split_once('/') {
        None => token.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((n, d)) => {
            let numer = n.parse::<BigInt>().ok()?;
            let denom = d.parse::<BigInt>().ok()?;
            (!denom.is_zero()).then(|| Rat::new(numer, denom))
        }
    }
}

/// Renders a rational as `<int>` or `<int>/<int>`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_header<'a>(
    line: usize,
    body: &'a str,
    keys: &[&str],
) -> Result<Vec<(&'a str, usize)>, IoError> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != keys.len() {
        return Err(malformed(
            line,
            format!("expected header `{}`", keys.join(" ")),
        ));
    }
    let mut out = Vec::new();
    for (field, key) in fields.iter().zip(keys) {
        let Some((name, value)) = field.split_once('=') else {
            return Err(malformed(line, format!("expected `{key}`")));
        };
        let expected = key.split('=').next().unwrap();
        if name != expected {
            return Err(malformed(line, format!("expected `{key}`, got `{field}`")));
        }
        let value: usize = value
            .parse()
            .map_err(|_| malformed(line, format!("bad integer in `{field}`")))?;
        out.push((name, value));
    }
    Ok(out)
}

/// Parses a `.dist` file into its (validated) distributions.
pub fn parse_dists(text: &str) -> Result<Vec<Dist>, IoError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| malformed(0, "empty file"))?;
    let p = parse_header(line, header, &["p=<int>"])?[0].1;
    if p == 0 {
        return Err(malformed(line, "p must be positive"));
    }
    let mut dists = Vec::new();
    for (line, body) in lines {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != p {
            return Err(malformed(
                line,
                format!("expected {p} masses, got {}", tokens.len()),
            ));
        }
        let mut values = Vec::with_capacity(p);
        for t in &tokens {
            values
                .push(parse_rat(t).ok_or_else(|| malformed(line, format!("bad rational `{t}`")))?);
        }
        dists.push(Dist::new(p, values).map_err(|source| IoError::BadDist { line, source })?);
    }
    Ok(dists)
}

pub fn write_dists(dists: &[Dist]) -> String {
    assert!(!dists.is_empty());
    let p = dists[0].p();
    let mut out = format!("p={p}\n");
    for d in dists {
        assert_eq!(d.p(), p, "all distributions in a file share p");
        let row: Vec<String> = d.masses().iter().map(format_rat).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

/// Parses a `.cpl` file. The result is deliberately unvalidated so that
/// verification can report exactly which invariant a bad file breaks.
pub fn parse_coupling(text: &str) -> Result<Coupling, IoError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| malformed(0, "empty file"))?;
    let header = parse_header(line, header, &["p=<int>", "s=<int>"])?;
    let (p, s) = (header[0].1, header[1].1);
    if p == 0 {
        return Err(malformed(line, "p must be positive"));
    }
    let mut entries = BTreeMap::new();
    for (line, body) in lines {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let [a, b, c, mass] = tokens.as_slice() else {
            return Err(malformed(line, "expected `a b c <rat>`"));
        };
        let key: (usize, usize, usize) = (
            a.parse().map_err(|_| malformed(line, "bad index"))?,
            b.parse().map_err(|_| malformed(line, "bad index"))?,
            c.parse().map_err(|_| malformed(line, "bad index"))?,
        );
        let mass = parse_rat(mass).ok_or_else(|| malformed(line, "bad rational"))?;
        if entries.insert(key, mass).is_some() {
            return Err(malformed(line, format!("duplicate key {key:?}")));
        }
    }
    Ok(Coupling::from_raw(p, s, entries))
}

pub fn write_coupling(c: &Coupling) -> String {
    let mut out = format!("p={} s={}\n", c.p(), c.s());
    for ((a, b, q), mass) in c.entries() {
        writeln!(out, "{a} {b} {q} {}", format_rat(mass)).unwrap();
    }
    out
}

/// Parses a `.tri` file; residues are reduced mod `p`.
pub fn parse_trisystem(text: &str) -> Result<TripleSystem, IoError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| malformed(0, "empty file"))?;
    let header = parse_header(line, header, &["p=<int>", "n=<int>"])?;
    let (p, n) = (header[0].1, header[1].1);
    if p < 2 {
        return Err(malformed(line, "p must be at least 2"));
    }
    let mut triples = Vec::new();
    for (line, body) in lines {
        let parts: Vec<&str> = body.split('|').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(malformed(line, "expected `a1..an | b1..bn | c1..cn`"));
        };
        let mut vecs = Vec::with_capacity(3);
        for part in [a, b, c] {
            let coords: Result<Vec<i64>, _> =
                part.split_whitespace().map(str::parse::<i64>).collect();
            let coords = coords.map_err(|_| malformed(line, "bad residue"))?;
            if coords.len() != n {
                return Err(malformed(
                    line,
                    format!("expected {n} residues per block, got {}", coords.len()),
                ));
            }
            vecs.push(GroupVec::new(p as u32, &coords));
        }
        triples.push([vecs[0].clone(), vecs[1].clone(), vecs[2].clone()]);
    }
    Ok(TripleSystem::new(p as u32, n, triples))
}

pub fn write_trisystem(ts: &TripleSystem) -> String {
    let mut out = format!("p={} n={}\n", ts.p(), ts.n());
    for t in ts.triples() {
        let block = |v: &GroupVec| {
            v.coords()
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(
            out,
            "{} | {} | {}",
            block(&t[0]),
            block(&t[1]),
            block(&t[2])
        )
        .unwrap();
    }
    out
}
