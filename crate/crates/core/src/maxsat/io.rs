//! Plain-text instance format:
//!
//! ```text
//! c optional comments
//! p wknf <n> <m> <k>
//! <weight> <lit> ... <lit> 0
//! ```
//!
//! Literals are signed 1-based variable indices, one clause per line.

use std::io::{BufRead, Write};

use super::MaxSatInstance;
use crate::error::{Error, Result};

pub fn write_instance<W: Write>(instance: &MaxSatInstance, mut out: W) -> Result<()> {
    writeln!(out, "p wknf {} {} {}", instance.n(), instance.m(), instance.k())?;
    for c in 0..instance.m() {
        write!(out, "{}", instance.weights()[c])?;
        for lit in instance.clause_literals(c) {
            write!(out, " {lit}")?;
        }
        writeln!(out, " 0")?;
    }
    Ok(())
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn read_instance<R: BufRead>(input: R) -> Result<MaxSatInstance> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut rows = Vec::new();
    let mut weights = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        let mut fields = text.split_whitespace();
        if text.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(lineno, "second header line"));
            }
            fields.next();
            if fields.next() != Some("wknf") {
                return Err(parse_err(lineno, "expected `p wknf <n> <m> <k>`"));
            }
            let nums: Vec<usize> = fields
                .map(|f| {
                    f.parse()
                        .map_err(|_| parse_err(lineno, format!("bad header field `{f}`")))
                })
                .collect::<Result<_>>()?;
            let [n, m, k] = nums[..] else {
                return Err(parse_err(lineno, "header needs exactly n, m and k"));
            };
            header = Some((n, m, k));
            continue;
        }
        if header.is_none() {
            return Err(parse_err(lineno, "clause before header"));
        }
        let w = fields.next().expect("nonempty line");
        let weight: f64 = w.parse().map_err(|_| parse_err(lineno, format!("bad weight `{w}`")))?;
        let mut lits = Vec::new();
        let mut closed = false;
        for f in fields {
            if closed {
                return Err(parse_err(lineno, "tokens after terminating 0"));
            }
            let lit: i64 = f.parse().map_err(|_| parse_err(lineno, format!("bad literal `{f}`")))?;
            if lit == 0 {
                closed = true;
            } else {
                lits.push(lit);
            }
        }
        if !closed {
            return Err(parse_err(lineno, "clause not terminated by 0"));
        }
        rows.push(lits);
        weights.push(weight);
    }
    let (n, m, k) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    if rows.len() != m {
        return Err(parse_err(
            0,
            format!("header announces {m} clauses, found {}", rows.len()),
        ));
    }
    MaxSatInstance::from_literals(n, k, &rows, weights)
}
