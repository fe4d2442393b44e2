//! Lossless CSV dump of a series.
//!
//! Metadata rides in `#` comment lines (ring, variables, order, exponents,
//! global factor); data rows carry one rational per line with columns
//! `index,zpow,monomial,num,den`. The multi-index is space separated
//! inside its field. Reading requires the ring to be one of the built-ins.

use super::{Exponent, LogSeries, SeriesError};
use crate::cohring::{parse_element, ring_by_name, Rat, ZLaurent};
use num_bigint::BigInt;
use num_traits::Zero;
use std::str::FromStr;

pub fn write_series_csv(s: &LogSeries) -> String {
    let mut out = String::new();
    out.push_str("# series v1\n");
    out.push_str(&format!("# ring {}\n", s.spec().name()));
    out.push_str(&format!("# vars {}\n", s.vars().join(" ")));
    out.push_str(&format!("# order {}\n", s.order()));
    for (v, e) in s.vars().iter().zip(s.exponents()) {
        out.push_str(&format!("# exponent {v} {} {}\n", e.scalar, e.nilpotent));
    }
    for (&zp, el) in s.global_factor().terms() {
        out.push_str(&format!("# global {zp} {el}\n"));
    }
    out.push_str("index,zpow,monomial,num,den\n");
    for (idx, zl) in s.coeffs() {
        let idx_str = idx
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        for (&zp, el) in zl.terms() {
            for (&b, c) in el.coords() {
                let mono = s.spec().mono_string(&s.spec().basis()[b]);
                out.push_str(&format!(
                    "{idx_str},{zp},{mono},{},{}\n",
                    c.numer(),
                    c.denom()
                ));
            }
        }
    }
    out
}

pub fn read_series_csv(text: &str) -> Result<LogSeries, SeriesError> {
    let mut ring = None;
    let mut vars: Vec<String> = Vec::new();
    let mut order: Option<u32> = None;
    let mut exp_lines: Vec<(String, String, String)> = Vec::new();
    let mut global_lines: Vec<(i32, String)> = Vec::new();
    let mut rows: Vec<(usize, String)> = Vec::new();
    let mut header_seen = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            let mut words = meta.split_whitespace();
            match words.next() {
                Some("series") => {}
                Some("ring") => {
                    let name = words
                        .next()
                        .ok_or_else(|| csv_err(lineno, "missing ring name"))?;
                    ring = Some(ring_by_name(name).ok_or_else(|| {
                        csv_err(lineno, &format!("unknown ring `{name}`"))
                    })?);
                }
                Some("vars") => {
                    vars = words.map(|w| w.to_string()).collect();
                }
                Some("order") => {
                    let v = words
                        .next()
                        .ok_or_else(|| csv_err(lineno, "missing order"))?;
                    order = Some(
                        v.parse()
                            .map_err(|_| csv_err(lineno, "order is not an integer"))?,
                    );
                }
                Some("exponent") => {
                    let var = words
                        .next()
                        .ok_or_else(|| csv_err(lineno, "missing exponent variable"))?
                        .to_string();
                    let scalar = words
                        .next()
                        .ok_or_else(|| csv_err(lineno, "missing exponent scalar"))?
                        .to_string();
                    let rest: Vec<&str> = words.collect();
                    exp_lines.push((var, scalar, rest.join(" ")));
                }
                Some("global") => {
                    let zp: i32 = words
                        .next()
                        .ok_or_else(|| csv_err(lineno, "missing global z power"))?
                        .parse()
                        .map_err(|_| csv_err(lineno, "bad global z power"))?;
                    let rest: Vec<&str> = words.collect();
                    global_lines.push((zp, rest.join(" ")));
                }
                Some(other) => {
                    return Err(csv_err(lineno, &format!("unknown metadata `{other}`")));
                }
                None => {}
            }
            continue;
        }
        if !header_seen {
            if line != "index,zpow,monomial,num,den" {
                return Err(csv_err(lineno, "missing column header"));
            }
            header_seen = true;
            continue;
        }
        rows.push((lineno, line.to_string()));
    }

    let ring = ring.ok_or_else(|| csv_err(0, "missing ring metadata"))?;
    let order = order.ok_or_else(|| csv_err(0, "missing order metadata"))?;

    let mut exponents = Vec::with_capacity(vars.len());
    for v in &vars {
        let (_, scalar_s, nil_s) = exp_lines
            .iter()
            .find(|(name, _, _)| name == v)
            .ok_or_else(|| csv_err(0, &format!("missing exponent line for `{v}`")))?;
        let scalar = parse_rat_str(scalar_s).ok_or_else(|| {
            csv_err(0, &format!("bad exponent scalar for `{v}`"))
        })?;
        let nil = parse_element(&ring, nil_s)
            .map_err(|e| csv_err(0, &format!("bad exponent element for `{v}`: {e}")))?;
        exponents.push(Exponent::new(scalar, nil));
    }

    let mut global = ZLaurent::zero(&ring);
    for (zp, el_s) in &global_lines {
        let el = parse_element(&ring, el_s)
            .map_err(|e| csv_err(0, &format!("bad global element: {e}")))?;
        global = &global + &ZLaurent::monomial(el, *zp);
    }

    let mut s = LogSeries::new(&ring, vars.clone(), exponents, global, order);
    let mut acc: std::collections::BTreeMap<Vec<i64>, ZLaurent> =
        std::collections::BTreeMap::new();
    for (lineno, row) in rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(csv_err(lineno, "expected 5 fields"));
        }
        let idx: Vec<i64> = fields[0]
            .split_whitespace()
            .map(|w| w.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| csv_err(lineno, "bad multi-index"))?;
        if idx.len() != vars.len() {
            return Err(csv_err(lineno, "multi-index arity mismatch"));
        }
        let zp: i32 = fields[1]
            .parse()
            .map_err(|_| csv_err(lineno, "bad z power"))?;
        let el = parse_element(&ring, fields[2])
            .map_err(|e| csv_err(lineno, &format!("bad monomial: {e}")))?;
        let num = BigInt::from_str(fields[3]).map_err(|_| csv_err(lineno, "bad numerator"))?;
        let den =
            BigInt::from_str(fields[4]).map_err(|_| csv_err(lineno, "bad denominator"))?;
        if den.is_zero() {
            return Err(csv_err(lineno, "zero denominator"));
        }
        let c = Rat::new(num, den);
        let term = ZLaurent::monomial(el.scale(&c), zp);
        let entry = acc.entry(idx).or_insert_with(|| ZLaurent::zero(&ring));
        *entry = &*entry + &term;
    }
    for (idx, zl) in acc {
        s.set_coeff(idx, zl);
    }
    Ok(s)
}

fn parse_rat_str(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n).ok()?;
            let d = BigInt::from_str(d).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => Some(Rat::from_integer(BigInt::from_str(s).ok()?)),
    }
}

fn csv_err(line: usize, msg: &str) -> SeriesError {
    SeriesError::Csv {
        line,
        msg: msg.to_string(),
    }
}
