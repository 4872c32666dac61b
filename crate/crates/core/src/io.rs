//! Line-oriented text formats.
//!
//! A file holds blocks separated by blank lines; `#` starts a comment. Each
//! block starts with a header:
//!
//! ```text
//! cut complete 2 2      # edge records: `<label> <value>`, e.g. `A1B2 -1/2`
//! cg 2 2                # records `A1 <v>`, `B2 <v>`, `A1B2 <v>`
//! cg-matrix 2 2         # bordered table, rows = Alice
//! ```
//!
//! followed by optional `name` and `note` lines, a `rhs` line and the
//! coefficients. Omitted coefficients are zero. The table of `cg-matrix` has
//! a first row `* b_B1 … b_Bm` and then one row `b_Ai a_AiB1 … a_AiBm` per
//! Alice observable.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind, NodeId, Party};
use crate::ineq::{parse_edge_label, CgIneq, CutIneq, Inequality};
use crate::scalar::{format_rat, parse_rat};
use crate::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Record,
    CgMatrix,
}

/// An inequality with its optional metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub ineq: Inequality,
    pub name: Option<String>,
    pub note: Option<String>,
}

impl From<Inequality> for Record {
    fn from(ineq: Inequality) -> Self {
        Self { ineq, name: None, note: None }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-empty lines of a block with their 1-based line numbers.
type Lines<'a> = Vec<(usize, &'a str)>;

fn blocks(text: &str) -> Vec<Lines<'_>> {
    let mut out = Vec::new();
    let mut cur: Lines<'_> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            // comment-only lines do not end a block
            if raw.trim().is_empty() && !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        cur.push((k + 1, line));
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn number(line: usize, token: &str) -> Result<Rat> {
    parse_rat(token).ok_or_else(|| err(line, format!("`{token}` is not a rational number")))
}

fn size(line: usize, token: Option<&str>) -> Result<usize> {
    let token = token.ok_or_else(|| err(line, "header is missing a scenario size"))?;
    token.parse().map_err(|_| err(line, format!("`{token}` is not a scenario size")))
}

/// Parses a text holding exactly one inequality.
pub fn parse_ineq(text: &str) -> Result<Inequality> {
    let mut all = parse_records(text)?;
    match all.len() {
        1 => Ok(all.remove(0).ineq),
        0 => Err(err(1, "no inequality found")),
        n => Err(err(1, format!("expected one inequality, found {n}"))),
    }
}

/// Parses every block of a file.
pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    blocks(text).iter().map(|b| parse_block(b)).collect()
}

fn parse_block(lines: &[(usize, &str)]) -> Result<Record> {
    let (hline, header) = lines[0];
    let mut words = header.split_whitespace();
    let tag = words.next().unwrap_or("");
    let shape = match tag {
        "cut" => {
            let kind = match words.next() {
                Some("complete") => GraphKind::Complete,
                Some("tripartite") => GraphKind::Tripartite,
                other => return Err(err(hline, format!("unknown graph kind {:?}", other.unwrap_or("")))),
            };
            Shape::Cut(kind)
        }
        "cg" => Shape::Cg,
        "cg-matrix" => Shape::Matrix,
        _ => return Err(err(hline, format!("unknown header `{tag}`"))),
    };
    let n_a = size(hline, words.next())?;
    let n_b = size(hline, words.next())?;
    if let Some(extra) = words.next() {
        return Err(err(hline, format!("unexpected `{extra}` in header")));
    }

    let mut name = None;
    let mut note = None;
    let mut rhs: Option<Rat> = None;
    let mut body = Vec::new();
    for &(ln, line) in &lines[1..] {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "name" => name = Some(rest.trim().to_string()),
            "note" => note = Some(rest.trim().to_string()),
            "rhs" => {
                if rhs.is_some() {
                    return Err(err(ln, "duplicate rhs"));
                }
                rhs = Some(number(ln, rest.trim())?);
            }
            _ => body.push((ln, line)),
        }
    }
    let rhs = rhs.ok_or_else(|| err(hline, "missing rhs line"))?;
    let ineq = match shape {
        Shape::Cut(kind) => Inequality::Cut(parse_cut(hline, kind, n_a, n_b, rhs, &body)?),
        Shape::Cg => Inequality::Cg(parse_cg(n_a, n_b, rhs, &body)?),
        Shape::Matrix => Inequality::Cg(parse_matrix(hline, n_a, n_b, rhs, &body)?),
    };
    Ok(Record { ineq, name, note })
}

enum Shape {
    Cut(GraphKind),
    Cg,
    Matrix,
}

fn pair(ln: usize, line: &str) -> Result<(&str, Rat)> {
    let mut it = line.split_whitespace();
    let label = it.next().expect("non-empty line");
    let value = it.next().ok_or_else(|| err(ln, format!("`{label}` has no value")))?;
    if let Some(extra) = it.next() {
        return Err(err(ln, format!("unexpected `{extra}`")));
    }
    Ok((label, number(ln, value)?))
}

fn parse_cut(hline: usize, kind: GraphKind, n_a: usize, n_b: usize, rhs: Rat, body: &[(usize, &str)]) -> Result<CutIneq> {
    let g = Graph::new(kind, n_a, n_b).map_err(|e| err(hline, e.to_string()))?;
    let mut seen = vec![false; g.edge_count()];
    let mut f = CutIneq::zero(g.clone());
    for &(ln, line) in body {
        let (label, value) = pair(ln, line)?;
        let (u, v) = parse_edge_label(label).ok_or_else(|| err(ln, format!("`{label}` is not an edge label")))?;
        let e = g.edge_index(u, v).ok_or_else(|| err(ln, format!("edge {label} is not in the graph")))?;
        if std::mem::replace(&mut seen[e], true) {
            return Err(err(ln, format!("duplicate edge {label}")));
        }
        f.set_coeff(u, v, value).map_err(|e| err(ln, e.to_string()))?;
    }
    f.set_rhs(rhs);
    Ok(f)
}

fn parse_cg(m_a: usize, m_b: usize, rhs: Rat, body: &[(usize, &str)]) -> Result<CgIneq> {
    let mut out = CgIneq::zero(m_a, m_b);
    let mut seen = std::collections::HashSet::new();
    {
        let (alice, bob, joint, r) = out.parts_mut();
        *r = rhs;
        for &(ln, line) in body {
            let (label, value) = pair(ln, line)?;
            if !seen.insert(label.to_string()) {
                return Err(err(ln, format!("duplicate coefficient {label}")));
            }
            let slot = if let Some(node) = NodeId::parse(label) {
                match node.party {
                    Party::A => alice.get_mut(node.index - 1),
                    Party::B => bob.get_mut(node.index - 1),
                    Party::X => None,
                }
            } else {
                match parse_edge_label(label) {
                    Some((u, v)) if u.party == Party::A && v.party == Party::B => {
                        joint.get_mut(u.index - 1).and_then(|row| row.get_mut(v.index - 1))
                    }
                    _ => None,
                }
            };
            *slot.ok_or_else(|| err(ln, format!("`{label}` is not a coefficient of a ({m_a}, {m_b}) scenario")))? = value;
        }
    }
    Ok(out)
}

fn parse_matrix(hline: usize, m_a: usize, m_b: usize, rhs: Rat, body: &[(usize, &str)]) -> Result<CgIneq> {
    if body.len() != m_a + 1 {
        let ln = body.last().map_or(hline, |l| l.0);
        return Err(err(ln, format!("expected {} table rows, found {}", m_a + 1, body.len())));
    }
    let mut rows = Vec::new();
    for (k, &(ln, line)) in body.iter().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != m_b + 1 {
            return Err(err(ln, format!("expected {} entries, found {}", m_b + 1, tokens.len())));
        }
        let start = if k == 0 {
            if tokens[0] != "*" {
                return Err(err(ln, "first table row must start with `*`"));
            }
            1
        } else {
            0
        };
        let mut row = vec![Rat::zero(); start];
        for t in &tokens[start..] {
            row.push(number(ln, t)?);
        }
        rows.push(row);
    }
    let bob = rows[0][1..].to_vec();
    let alice = rows[1..].iter().map(|r| r[0].clone()).collect();
    let joint = rows[1..].iter().map(|r| r[1..].to_vec()).collect();
    CgIneq::new(alice, bob, joint, rhs)
}

/// Writes one inequality; `cg-matrix` needs a Collins–Gisin inequality.
pub fn emit_ineq(ineq: &Inequality, format: Format) -> Result<String> {
    emit_record(&Record::from(ineq.clone()), format)
}

pub fn emit_record(record: &Record, format: Format) -> Result<String> {
    let mut s = String::new();
    match (&record.ineq, format) {
        (Inequality::Cut(f), Format::Record) => {
            let g = f.graph();
            let kind = match g.kind() {
                GraphKind::Complete => "complete",
                GraphKind::Tripartite => "tripartite",
            };
            writeln!(s, "cut {kind} {} {}", g.n_a(), g.n_b()).expect("string");
            meta(&mut s, record);
            writeln!(s, "rhs {}", format_rat(f.rhs())).expect("string");
            for (e, c) in f.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    writeln!(s, "{} {}", g.edge_label(e), format_rat(c)).expect("string");
                }
            }
        }
        (Inequality::Cg(c), Format::Record) => {
            writeln!(s, "cg {} {}", c.m_a(), c.m_b()).expect("string");
            meta(&mut s, record);
            writeln!(s, "rhs {}", format_rat(c.rhs())).expect("string");
            let mut put = |label: String, v: &Rat| {
                if !v.is_zero() {
                    writeln!(s, "{label} {}", format_rat(v)).expect("string");
                }
            };
            for (i, v) in c.alice().iter().enumerate() {
                put(format!("A{}", i + 1), v);
            }
            for (j, v) in c.bob().iter().enumerate() {
                put(format!("B{}", j + 1), v);
            }
            for (i, row) in c.joint().iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    put(format!("A{}B{}", i + 1, j + 1), v);
                }
            }
        }
        (Inequality::Cg(c), Format::CgMatrix) => {
            writeln!(s, "cg-matrix {} {}", c.m_a(), c.m_b()).expect("string");
            meta(&mut s, record);
            writeln!(s, "rhs {}", format_rat(c.rhs())).expect("string");
            let mut table: Vec<Vec<String>> = Vec::new();
            table.push(std::iter::once("*".to_string()).chain(c.bob().iter().map(format_rat)).collect());
            for (i, row) in c.joint().iter().enumerate() {
                table.push(std::iter::once(format_rat(&c.alice()[i])).chain(row.iter().map(format_rat)).collect());
            }
            let width = table.iter().flatten().map(String::len).max().unwrap_or(1);
            for row in table {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
                writeln!(s, "{}", cells.join(" ")).expect("string");
            }
        }
        (Inequality::Cut(_), Format::CgMatrix) => return Err(Error::FormatMismatch("cg-matrix")),
    }
    Ok(s)
}

fn meta(s: &mut String, record: &Record) {
    if let Some(name) = &record.name {
        writeln!(s, "name {name}").expect("string");
    }
    if let Some(note) = &record.note {
        writeln!(s, "note {note}").expect("string");
    }
}

/// Writes several records separated by blank lines.
pub fn emit_records(records: &[Record], format: Format) -> Result<String> {
    let parts: Vec<String> = records.iter().map(|r| emit_record(r, format)).collect::<Result<_>>()?;
    Ok(parts.join("\n"))
}

/// Points for hull enumeration: one point per line, coordinates separated by
/// whitespace.
pub fn parse_points(text: &str) -> Result<Vec<Vec<Rat>>> {
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let point = line.split_whitespace().map(|t| number(k + 1, t)).collect::<Result<Vec<_>>>()?;
        if let Some(first) = out.first() {
            if first.len() != point.len() {
                return Err(err(k + 1, format!("point has {} coordinates, expected {}", point.len(), first.len())));
            }
        }
        out.push(point);
    }
    Ok(out)
}
