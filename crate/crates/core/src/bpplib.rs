//! BPPLib text format for instances, plus a line format for solutions.
//!
//! Instance files: item-type count, capacity, then one line per item type
//! holding either `w` (demand 1) or `w d`.

use std::fmt;

use crate::instance::{Instance, Weight};
use crate::solution::{Pattern, Solution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedEof(&'static str),
    BadToken(String),
    NonPositive(&'static str),
    WeightExceedsCapacity { weight: Weight, capacity: Weight },
    MixedShapes,
    TooManyTokens,
    Overflow,
    EmptySolution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based; 0 when the problem is not tied to one line.
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedEof(what) => write!(f, "missing {what}")?,
            ParseErrorKind::BadToken(t) => write!(f, "malformed token {t:?}")?,
            ParseErrorKind::NonPositive(what) => write!(f, "{what} must be positive")?,
            ParseErrorKind::WeightExceedsCapacity { .. } => f.write_str("weight exceeds capacity")?,
            ParseErrorKind::MixedShapes => {
                f.write_str("item lines mix `w` and `w d` shapes")?
            }
            ParseErrorKind::TooManyTokens => f.write_str("too many tokens")?,
            ParseErrorKind::Overflow => f.write_str("total weight overflows")?,
            ParseErrorKind::EmptySolution => f.write_str("solution has no patterns")?,
        }
        if self.line > 0 {
            write!(f, " at line {}", self.line)?;
        }
        if let ParseErrorKind::WeightExceedsCapacity { weight, capacity } = self.kind {
            write!(f, " ({weight} > {capacity})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineShape {
    /// One weight per line.
    Bpp,
    /// `weight demand` per line.
    Csp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseReport {
    pub shape: Option<LineShape>,
    /// Non-blank lines after the declared item lines; they are ignored.
    pub trailing_lines: usize,
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    parse_instance_with_report(text).map(|(inst, _)| inst)
}

pub fn parse_instance_with_report(text: &str) -> Result<(Instance, ParseReport), ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, first) = lines
        .next()
        .ok_or(err(0, ParseErrorKind::UnexpectedEof("item count")))?;
    let n: u64 = single_number(ln, first)?;
    let (ln, second) = lines
        .next()
        .ok_or(err(0, ParseErrorKind::UnexpectedEof("capacity")))?;
    let capacity: Weight = single_number(ln, second)?;
    if capacity <= 0 {
        return Err(err(ln, ParseErrorKind::NonPositive("capacity")));
    }

    let mut shape = None;
    let mut raw = Vec::with_capacity(n.min(1 << 20) as usize);
    let mut total: Weight = 0;
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or(err(0, ParseErrorKind::UnexpectedEof("item line")))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let this = match toks.len() {
            1 => LineShape::Bpp,
            2 => LineShape::Csp,
            _ => return Err(err(ln, ParseErrorKind::TooManyTokens)),
        };
        match shape {
            None => shape = Some(this),
            Some(s) if s != this => return Err(err(ln, ParseErrorKind::MixedShapes)),
            _ => {}
        }
        let weight: Weight = number(ln, toks[0])?;
        let demand: u64 = if toks.len() == 2 { number(ln, toks[1])? } else { 1 };
        if weight <= 0 {
            return Err(err(ln, ParseErrorKind::NonPositive("weight")));
        }
        if demand == 0 {
            return Err(err(ln, ParseErrorKind::NonPositive("demand")));
        }
        if weight > capacity {
            return Err(err(ln, ParseErrorKind::WeightExceedsCapacity { weight, capacity }));
        }
        total = i64::try_from(demand)
            .ok()
            .and_then(|d| weight.checked_mul(d))
            .and_then(|x| total.checked_add(x))
            .ok_or(err(ln, ParseErrorKind::Overflow))?;
        raw.push((weight, demand));
    }
    let trailing_lines = lines.count();
    let inst = Instance::normalize(raw, capacity).map_err(|_| err(0, ParseErrorKind::Overflow))?;
    Ok((
        inst,
        ParseReport {
            shape,
            trailing_lines,
        },
    ))
}

fn single_number<T: std::str::FromStr>(ln: usize, line: &str) -> Result<T, ParseError> {
    let mut toks = line.split_whitespace();
    let t = toks.next().unwrap_or("");
    if toks.next().is_some() {
        return Err(err(ln, ParseErrorKind::TooManyTokens));
    }
    number(ln, t)
}

fn number<T: std::str::FromStr>(ln: usize, tok: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| err(ln, ParseErrorKind::BadToken(tok.to_string())))
}

/// Writes the `w d` form, one line per item type.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("{}\n{}\n", inst.num_types(), inst.capacity());
    for it in inst.items() {
        out.push_str(&format!("{} {}\n", it.weight, it.demand));
    }
    out
}

/// BPP form: item count, capacity, then one weight per unit, heaviest first.
pub fn write_instance_units(inst: &Instance) -> String {
    let mut out = format!("{}\n{}\n", inst.total_units(), inst.capacity());
    for w in inst.expand() {
        out.push_str(&format!("{w}\n"));
    }
    out
}

/// One pattern per line as `c x w, c x w`, optionally prefixed by `m *`.
/// Lines starting with `#` are comments.
pub fn parse_solution_text(text: &str) -> Result<Solution, ParseError> {
    let mut grouped = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (mult, body) = match line.split_once('*') {
            Some((m, rest)) => (number::<u64>(ln, m.trim())?, rest),
            None => (1, line),
        };
        let mut parts = Vec::new();
        for part in body.split(',') {
            let part = part.trim();
            let (c, w) = part
                .split_once(['x', 'X'])
                .ok_or(err(ln, ParseErrorKind::BadToken(part.to_string())))?;
            let c: u64 = number(ln, c.trim())?;
            let w: Weight = number(ln, w.trim())?;
            parts.push((w, c));
        }
        grouped.push((Pattern::new(parts), mult));
    }
    if grouped.is_empty() {
        return Err(err(0, ParseErrorKind::EmptySolution));
    }
    // Keep declared shape: no merging, so verification sees exactly what was written.
    let value = grouped.iter().map(|(_, m)| m).sum();
    Ok(Solution {
        patterns: grouped,
        value,
    })
}

pub fn write_solution_text(sol: &Solution) -> String {
    let mut out = String::new();
    for (p, m) in &sol.patterns {
        if *m == 1 {
            out.push_str(&format!("{p}\n"));
        } else {
            out.push_str(&format!("{m} * {p}\n"));
        }
    }
    out
}

/// Accepts either the JSON form or the line form.
pub fn parse_solution(text: &str) -> Result<Solution, ParseError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| {
            err(e.line(), ParseErrorKind::BadToken(e.to_string()))
        })
    } else {
        parse_solution_text(text)
    }
}
