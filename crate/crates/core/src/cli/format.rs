//! Line-oriented text formats.
//!
//! ```text
//! rel 2          pm              part              clopen     tower clopen 1    tower graph
//! 0 1            0 -> 1          block: 0 10       01         0 1               0 -> 1
//! 1 0            1 -> 0          block: 11         1          1 0               1 -> 0
//! ```
//!
//! `e` is the empty word. A relation set is a sequence of relation documents
//! separated by blank lines. Output is canonical: items sorted, one per line, with a
//! trailing newline.

use std::fmt::Write;

use crate::cantor::{BinaryWord, ClopenSet, Partition};
use crate::error::{Error, Result};
use crate::finrel::IndexRelation;
use crate::homeo::{PrefixMap, Rule};
use crate::towers::RelationTower;

#[derive(Debug, Clone)]
pub enum Document {
    Relation(IndexRelation),
    Partition(Partition),
    PrefixMap(PrefixMap),
    Clopen(ClopenSet),
    /// Only clopen and graph towers have a text form.
    Tower(RelationTower),
    RelationSet(Vec<IndexRelation>),
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        use Document::*;
        match (self, other) {
            (Relation(a), Relation(b)) => a == b,
            (Partition(a), Partition(b)) => a == b,
            (PrefixMap(a), PrefixMap(b)) => a == b,
            (Clopen(a), Clopen(b)) => a == b,
            (Tower(a), Tower(b)) => {
                (a.as_graph().is_some() || a.as_clopen().is_some())
                    && a.as_graph() == b.as_graph()
                    && a.as_clopen() == b.as_clopen()
            }
            (RelationSet(a), RelationSet(b)) => a == b,
            _ => false,
        }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Attaches a line number to errors from the value validators.
fn at_line(line: usize, err: Error) -> Error {
    match err {
        Error::Validation(msg) => Error::Validation(format!("line {line}: {msg}")),
        Error::Budget(msg) => Error::Budget(format!("line {line}: {msg}")),
        other => other,
    }
}

fn word(line: usize, token: &str) -> Result<BinaryWord> {
    token.parse().map_err(|e| at_line(line, e))
}

fn index(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| syntax(line, format!("expected an index, found `{token}`")))
}

/// Numbered non-blank body lines following a header at `header_line`.
type Body<'a> = [(usize, &'a str)];

fn relation_body(size: usize, body: &Body) -> Result<IndexRelation> {
    let mut rel =
        IndexRelation::empty(size).map_err(|e| at_line(body.first().map_or(1, |l| l.0), e))?;
    for &(n, text) in body {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let [a, b] = tokens[..] else {
            return Err(syntax(n, "expected `<a> <b>`"));
        };
        let (a, b) = (index(n, a)?, index(n, b)?);
        if a >= size || b >= size {
            return Err(Error::Validation(format!(
                "line {n}: pair ({a}, {b}) outside 0..{size}"
            )));
        }
        rel.insert(a, b);
    }
    Ok(rel)
}

fn rules_body(header_line: usize, body: &Body) -> Result<PrefixMap> {
    let mut rules: Vec<Rule> = Vec::new();
    for &(n, text) in body {
        let Some((d, r)) = text.split_once("->") else {
            return Err(syntax(n, "expected `<word> -> <word>`"));
        };
        rules.push((word(n, d.trim())?, word(n, r.trim())?));
    }
    PrefixMap::from_rules(&rules).map_err(|e| at_line(header_line, e))
}

fn parse_one(header_line: usize, header: &str, body: &Body) -> Result<Document> {
    let head: Vec<&str> = header.split_whitespace().collect();
    match head[..] {
        ["rel", k] => {
            let k = index(header_line, k)?;
            if k == 0 {
                return Err(Error::Validation(format!(
                    "line {header_line}: relation size must be positive"
                )));
            }
            Ok(Document::Relation(relation_body(k, body)?))
        }
        ["pm"] => Ok(Document::PrefixMap(rules_body(header_line, body)?)),
        ["clopen"] => {
            let words = body
                .iter()
                .map(|&(n, t)| word(n, t.trim()))
                .collect::<Result<Vec<_>>>()?;
            Ok(Document::Clopen(
                ClopenSet::from_antichain(&words).map_err(|e| at_line(header_line, e))?,
            ))
        }
        ["part"] => {
            let mut blocks = Vec::new();
            for &(n, text) in body {
                let Some(rest) = text.strip_prefix("block:") else {
                    return Err(syntax(n, "expected `block: <word> ...`"));
                };
                let words = rest
                    .split_whitespace()
                    .map(|t| word(n, t))
                    .collect::<Result<Vec<_>>>()?;
                blocks.push(ClopenSet::from_antichain(&words).map_err(|e| at_line(n, e))?);
            }
            Ok(Document::Partition(
                Partition::new(blocks).map_err(|e| at_line(header_line, e))?,
            ))
        }
        ["tower", "clopen", level] => {
            let level = index(header_line, level)?;
            if level > crate::towers::MAX_LEVEL {
                return Err(Error::Budget(format!(
                    "line {header_line}: seed level {level} too large"
                )));
            }
            let seed = relation_body(1 << level, body)?;
            let tower = RelationTower::clopen(level, seed).map_err(|e| at_line(header_line, e))?;
            Ok(Document::Tower(tower))
        }
        ["tower", "graph"] => Ok(Document::Tower(RelationTower::graph(rules_body(
            header_line,
            body,
        )?))),
        _ => Err(syntax(
            header_line,
            format!("unknown document header `{header}`"),
        )),
    }
}

/// Splits text into blank-line separated chunks of numbered lines.
fn chunks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out: Vec<Vec<(usize, &str)>> = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            current.push((i + 1, line));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Parses one document. Several `rel` documents separated by blank lines (or empty
/// input) form a relation set.
pub fn parse(text: &str) -> Result<Document> {
    let parts = chunks(text);
    match parts.len() {
        0 => Ok(Document::RelationSet(Vec::new())),
        1 => {
            let (first, body) = parts[0].split_first().expect("non-empty chunk");
            parse_one(first.0, first.1, body)
        }
        _ => Ok(Document::RelationSet(parse_relation_set(text)?)),
    }
}

pub fn parse_relation_set(text: &str) -> Result<Vec<IndexRelation>> {
    chunks(text)
        .iter()
        .map(|chunk| {
            let (first, body) = chunk.split_first().expect("non-empty chunk");
            match parse_one(first.0, first.1, body)? {
                Document::Relation(r) => Ok(r),
                _ => Err(syntax(
                    first.0,
                    "relation sets contain only `rel` documents",
                )),
            }
        })
        .collect()
}

pub fn parse_relation(text: &str) -> Result<IndexRelation> {
    match parse(text)? {
        Document::Relation(r) => Ok(r),
        _ => Err(syntax(1, "expected a `rel` document")),
    }
}

pub fn parse_prefix_map(text: &str) -> Result<PrefixMap> {
    match parse(text)? {
        Document::PrefixMap(f) => Ok(f),
        _ => Err(syntax(1, "expected a `pm` document")),
    }
}

pub fn parse_partition(text: &str) -> Result<Partition> {
    match parse(text)? {
        Document::Partition(p) => Ok(p),
        _ => Err(syntax(1, "expected a `part` document")),
    }
}

pub fn parse_clopen(text: &str) -> Result<ClopenSet> {
    match parse(text)? {
        Document::Clopen(c) => Ok(c),
        _ => Err(syntax(1, "expected a `clopen` document")),
    }
}

pub fn parse_tower(text: &str) -> Result<RelationTower> {
    match parse(text)? {
        Document::Tower(t) => Ok(t),
        _ => Err(syntax(1, "expected a `tower` document")),
    }
}

fn write_pairs(out: &mut String, r: &IndexRelation) {
    for (a, b) in r.pairs() {
        writeln!(out, "{a} {b}").unwrap();
    }
}

fn write_rules(out: &mut String, f: &PrefixMap) {
    for (d, r) in f.rules() {
        writeln!(out, "{d} -> {r}").unwrap();
    }
}

pub fn format_relation(r: &IndexRelation) -> String {
    let mut out = format!("rel {}\n", r.size());
    write_pairs(&mut out, r);
    out
}

pub fn format_prefix_map(f: &PrefixMap) -> String {
    let mut out = String::from("pm\n");
    write_rules(&mut out, f);
    out
}

pub fn format_partition(p: &Partition) -> String {
    let mut out = String::from("part\n");
    for block in p.blocks() {
        out.push_str("block:");
        for w in block.cylinders() {
            write!(out, " {w}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn format_clopen(c: &ClopenSet) -> String {
    let mut out = String::from("clopen\n");
    for w in c.cylinders() {
        writeln!(out, "{w}").unwrap();
    }
    out
}

/// Text form of a clopen or graph tower; `None` for the other kinds.
pub fn format_tower(t: &RelationTower) -> Option<String> {
    if let Some(f) = t.as_graph() {
        let mut out = String::from("tower graph\n");
        write_rules(&mut out, f);
        return Some(out);
    }
    let (level, seed) = t.as_clopen()?;
    let mut out = format!("tower clopen {level}\n");
    write_pairs(&mut out, seed);
    Some(out)
}

pub fn format_relation_set(set: &[IndexRelation]) -> String {
    set.iter()
        .map(format_relation)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Canonical serialization. Towers without a text form are rendered by their level-0
/// trace header only, which `parse` rejects; callers convert towers first.
pub fn format(doc: &Document) -> String {
    match doc {
        Document::Relation(r) => format_relation(r),
        Document::Partition(p) => format_partition(p),
        Document::PrefixMap(f) => format_prefix_map(f),
        Document::Clopen(c) => format_clopen(c),
        Document::Tower(t) => format_tower(t).unwrap_or_else(|| "tower ?\n".to_string()),
        Document::RelationSet(s) => format_relation_set(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let r = parse_relation("rel 2\n0 1\n1 0\n").unwrap();
        assert_eq!(r, IndexRelation::from_pairs(2, [(0, 1), (1, 0)]).unwrap());
        let swap = parse_prefix_map("pm\n0 -> 1\n1 -> 0\n").unwrap();
        assert_eq!(swap.rules().len(), 2);
        assert!(parse_prefix_map("pm\ne -> e\n").unwrap().is_identity());
    }

    #[test]
    fn format_examples() {
        assert_eq!(
            format_relation(&IndexRelation::diagonal(2).unwrap()),
            "rel 2\n0 0\n1 1\n"
        );
        assert_eq!(format_prefix_map(&PrefixMap::identity()), "pm\ne -> e\n");
        assert_eq!(
            format_partition(&Partition::level(1).unwrap()),
            "part\nblock: 0\nblock: 1\n"
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse("rel 2\n0 1\n0 x\n").unwrap_err(),
            Error::Syntax {
                line: 3,
                msg: "expected an index, found `x`".into()
            }
        );
        match parse("rel 2\n0 1\n0 5\n").unwrap_err() {
            Error::Validation(m) => assert!(m.starts_with("line 3:"), "{m}"),
            e => panic!("{e:?}"),
        }
        match parse("pm\n0 -> 1\n1 -> 1\n").unwrap_err() {
            Error::Validation(m) => assert!(m.starts_with("line 1:"), "{m}"),
            e => panic!("{e:?}"),
        }
        assert!(matches!(
            parse("pm\n0 => 1\n"),
            Err(Error::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse("bogus\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse("part\nblock: 0\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse("tower clopen 1\n0 0\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn towers_and_sets() {
        let t = parse_tower("tower clopen 2\n0 0\n0 1\n1 0\n1 1\n2 2\n2 3\n3 2\n3 3\n").unwrap();
        assert_eq!(format_tower(&t).unwrap(), "tower clopen 1\n0 0\n1 1\n");
        let g = parse_tower("tower graph\n0 -> 1\n1 -> 0\n").unwrap();
        assert_eq!(format_tower(&g).unwrap(), "tower graph\n0 -> 1\n1 -> 0\n");
        let text = "rel 1\n0 0\n\nrel 2\n0 0\n1 1\n";
        let set = parse_relation_set(text).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(format_relation_set(&set), text);
        assert_eq!(parse(text).unwrap(), Document::RelationSet(set));
        assert!(parse_relation_set("rel 1\n0 0\n\npm\ne -> e\n").is_err());
    }
}
