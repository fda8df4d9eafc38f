//! Textual word syntax and the presentation / splitting file formats.
//!
//! Words are whitespace-separated tokens `name`, `name_k` or `name^k` (and
//! `name_k^e`), where `k`/`e` are possibly negative integers; `1` is the
//! identity. Presentation files:
//!
//! ```text
//! # Klein bottle
//! gens: a b
//! rel: a b a b^-1
//! ```
//!
//! Splitting files carry one `[amalgam]` or `[hnn]` section with keys
//! `A.gens`, `A.rel`, `B.gens`, `B.rel`, `H.inA`, `H.inB` (amalgams) or
//! `A.gens`, `A.rel`, `stable`, `map: h' -> h` (HNN, meaning t·h′·t⁻¹ = h).
//! Keys listing words (`rel`, `H.inA`, `map`, …) may repeat.

use std::fmt;

use thiserror::Error;

use crate::presentations::{Presentation, PresentationError};
use crate::splittings::{AmalgamData, HnnData, SplittingData, SplittingError};
use crate::words::{free_reduce, is_identifier, Generator, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }

    fn shifted(mut self, line: usize, column_offset: usize) -> Self {
        self.line = line;
        self.column += column_offset;
        self
    }
}

fn parse_generator(tok: &str, column: usize) -> Result<Generator, ParseError> {
    let (name, sub) = match tok.split_once('_') {
        Some((n, s)) => {
            let s: i32 = s
                .parse()
                .map_err(|_| ParseError::new(1, column, format!("bad subscript in {tok:?}")))?;
            (n, Some(s))
        }
        None => (tok, None),
    };
    if !is_identifier(name) {
        return Err(ParseError::new(1, column, format!("bad generator name {name:?}")));
    }
    Ok(match sub {
        Some(s) => Generator::subscripted(name, s),
        None => Generator::new(name),
    })
}

/// Parse a word without reducing it.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in s.split_whitespace() {
        let column = s[offset..].find(tok).map_or(offset, |p| p + offset) + 1;
        offset = column - 1 + tok.len();
        if tok == "1" {
            continue;
        }
        let (base, exp) = match tok.split_once('^') {
            Some((b, e)) => {
                let e: i64 = e.parse().map_err(|_| {
                    ParseError::new(1, column, format!("bad exponent in {tok:?}"))
                })?;
                (b, e)
            }
            None => (tok, 1),
        };
        let g = parse_generator(base, column)?;
        let l = if exp < 0 { g.neg() } else { g.pos() };
        out.extend(std::iter::repeat(l).take(exp.unsigned_abs() as usize));
    }
    Ok(out)
}

pub fn parse_word(s: &str) -> Result<Word, ParseError> {
    parse_letters(s).map(free_reduce)
}

fn parse_generators(s: &str) -> Result<Vec<Generator>, ParseError> {
    let mut offset = 0;
    s.split_whitespace()
        .map(|tok| {
            let column = s[offset..].find(tok).map_or(offset, |p| p + offset) + 1;
            offset = column - 1 + tok.len();
            parse_generator(tok, column)
        })
        .collect()
}

/// One `key: value` line with its position.
struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
    value_column: usize,
}

enum Item<'a> {
    Section(usize, &'a str),
    Entry(Entry<'a>),
}

fn lex(text: &str) -> Result<Vec<Item<'_>>, ParseError> {
    let mut items = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| {
                ParseError::new(line, raw.find('[').unwrap_or(0) + 1, "unterminated section header")
            })?;
            items.push(Item::Section(line, name.trim()));
            continue;
        }
        let colon = content.find(':').ok_or_else(|| {
            ParseError::new(line, content.len() - content.trim_start().len() + 1, "expected `key: value`")
        })?;
        items.push(Item::Entry(Entry {
            line,
            key: content[..colon].trim(),
            value: &content[colon + 1..],
            value_column: colon + 2,
        }));
    }
    Ok(items)
}

fn entry_word(e: &Entry<'_>) -> Result<Word, ParseError> {
    parse_word(e.value).map_err(|err| err.shifted(e.line, e.value_column - 1))
}

fn entry_gens(e: &Entry<'_>) -> Result<Vec<Generator>, ParseError> {
    parse_generators(e.value).map_err(|err| err.shifted(e.line, e.value_column - 1))
}

fn semantic(line: usize, err: impl fmt::Display) -> ParseError {
    ParseError::new(line, 1, err.to_string())
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Splitting(#[from] SplittingError),
}

fn check_letters(gens: &[Generator], w: &Word, line: usize) -> Result<(), ParseError> {
    for l in w.letters() {
        if !gens.contains(&l.gen) {
            return Err(ParseError::new(line, 1, format!("unknown generator {} in relator", l.gen)));
        }
    }
    Ok(())
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut gens: Option<(usize, Vec<Generator>)> = None;
    let mut rels: Vec<(usize, Word)> = Vec::new();
    for item in lex(text)? {
        match item {
            Item::Section(line, _) => {
                return Err(ParseError::new(line, 1, "sections are only allowed in splitting files"))
            }
            Item::Entry(e) => match e.key {
                "gens" => {
                    if gens.is_some() {
                        return Err(ParseError::new(e.line, 1, "duplicate `gens`"));
                    }
                    gens = Some((e.line, entry_gens(&e)?));
                }
                "rel" => rels.push((e.line, entry_word(&e)?)),
                other => {
                    return Err(ParseError::new(e.line, 1, format!("unknown key {other:?}")))
                }
            },
        }
    }
    let (gline, gens) = gens.unwrap_or((1, Vec::new()));
    for (line, r) in &rels {
        check_letters(&gens, r, *line)?;
    }
    Presentation::new(gens, rels.into_iter().map(|(_, r)| r).collect()).map_err(|e| semantic(gline, e))
}

pub fn parse_splitting(text: &str) -> Result<SplittingData, ParseError> {
    let items = lex(text)?;
    let mut section: Option<(usize, &str)> = None;
    let mut a_gens = None;
    let mut b_gens = None;
    let mut a_rels = Vec::new();
    let mut b_rels = Vec::new();
    let mut h_in_a = Vec::new();
    let mut h_in_b = Vec::new();
    let mut stable = None;
    let mut maps: Vec<(usize, Word, Word)> = Vec::new();
    for item in items {
        match item {
            Item::Section(line, name) => {
                if section.is_some() {
                    return Err(ParseError::new(line, 1, "only one section per file"));
                }
                if name != "amalgam" && name != "hnn" {
                    return Err(ParseError::new(line, 2, format!("unknown section {name:?}")));
                }
                section = Some((line, name));
            }
            Item::Entry(e) => {
                let Some((_, kind)) = section else {
                    return Err(ParseError::new(e.line, 1, "entry before `[amalgam]`/`[hnn]` header"));
                };
                match (kind, e.key) {
                    (_, "A.gens") => a_gens = Some((e.line, entry_gens(&e)?)),
                    (_, "A.rel") => a_rels.push((e.line, entry_word(&e)?)),
                    ("amalgam", "B.gens") => b_gens = Some((e.line, entry_gens(&e)?)),
                    ("amalgam", "B.rel") => b_rels.push((e.line, entry_word(&e)?)),
                    ("amalgam", "H.inA") => h_in_a.push((e.line, entry_word(&e)?)),
                    ("amalgam", "H.inB") => h_in_b.push((e.line, entry_word(&e)?)),
                    ("hnn", "stable") => {
                        let g = entry_gens(&e)?;
                        if g.len() != 1 {
                            return Err(ParseError::new(e.line, e.value_column, "expected one stable letter"));
                        }
                        stable = Some((e.line, g[0].clone()));
                    }
                    ("hnn", "map") => {
                        let (lhs, rhs) = e.value.split_once("->").ok_or_else(|| {
                            ParseError::new(e.line, e.value_column, "expected `h' -> h`")
                        })?;
                        let arrow = e.value.find("->").unwrap_or(0);
                        let hp = parse_word(lhs).map_err(|err| err.shifted(e.line, e.value_column - 1))?;
                        let h = parse_word(rhs)
                            .map_err(|err| err.shifted(e.line, e.value_column + arrow + 1))?;
                        maps.push((e.line, hp, h));
                    }
                    (_, other) => {
                        return Err(ParseError::new(e.line, 1, format!("unknown key {other:?} in [{kind}]")))
                    }
                }
            }
        }
    }
    let Some((sline, kind)) = section else {
        return Err(ParseError::new(1, 1, "missing `[amalgam]` or `[hnn]` section"));
    };
    let (aline, a_gens) = a_gens.ok_or_else(|| ParseError::new(sline, 1, "missing `A.gens`"))?;
    for (line, w) in a_rels.iter().chain(&h_in_a) {
        check_letters(&a_gens, w, *line)?;
    }
    let pa = Presentation::new(a_gens.clone(), a_rels.into_iter().map(|(_, r)| r).collect())
        .map_err(|e| semantic(aline, e))?;
    if kind == "amalgam" {
        let (bline, b_gens) = b_gens.ok_or_else(|| ParseError::new(sline, 1, "missing `B.gens`"))?;
        for (line, w) in b_rels.iter().chain(&h_in_b) {
            check_letters(&b_gens, w, *line)?;
        }
        let pb = Presentation::new(b_gens, b_rels.into_iter().map(|(_, r)| r).collect())
            .map_err(|e| semantic(bline, e))?;
        let am = AmalgamData::new(
            pa,
            pb,
            h_in_a.into_iter().map(|(_, w)| w).collect(),
            h_in_b.into_iter().map(|(_, w)| w).collect(),
        )
        .map_err(|e| semantic(sline, e))?;
        Ok(SplittingData::Amalgam(am))
    } else {
        let (tline, t) = stable.ok_or_else(|| ParseError::new(sline, 1, "missing `stable`"))?;
        for (line, hp, h) in &maps {
            check_letters(&a_gens, hp, *line)?;
            check_letters(&a_gens, h, *line)?;
        }
        let (hp, h): (Vec<Word>, Vec<Word>) = maps.into_iter().map(|(_, hp, h)| (hp, h)).unzip();
        let hnn = HnnData::new(pa, t, h, hp).map_err(|e| semantic(tline, e))?;
        Ok(SplittingData::Hnn(hnn))
    }
}

/// True when the text looks like a splitting file (has a section header).
pub fn is_splitting_text(text: &str) -> bool {
    text.lines().any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with('['))
}

fn join_gens(gens: &[Generator]) -> String {
    gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn print_presentation(p: &Presentation) -> String {
    let mut s = format!("gens: {}\n", join_gens(p.alphabet()));
    for r in p.relators() {
        s.push_str(&format!("rel: {r}\n"));
    }
    s
}

pub fn print_splitting(s: &SplittingData) -> String {
    let mut out = String::new();
    match s {
        SplittingData::Amalgam(am) => {
            out.push_str("[amalgam]\n");
            out.push_str(&format!("A.gens: {}\n", join_gens(am.a.alphabet())));
            for r in am.a.relators() {
                out.push_str(&format!("A.rel: {r}\n"));
            }
            out.push_str(&format!("B.gens: {}\n", join_gens(am.b.alphabet())));
            for r in am.b.relators() {
                out.push_str(&format!("B.rel: {r}\n"));
            }
            for w in &am.h_in_a {
                out.push_str(&format!("H.inA: {w}\n"));
            }
            for w in &am.h_in_b {
                out.push_str(&format!("H.inB: {w}\n"));
            }
        }
        SplittingData::Hnn(h) => {
            out.push_str("[hnn]\n");
            out.push_str(&format!("A.gens: {}\n", join_gens(h.base.alphabet())));
            for r in h.base.relators() {
                out.push_str(&format!("A.rel: {r}\n"));
            }
            out.push_str(&format!("stable: {}\n", h.stable));
            for (hp, hh) in h.h_prime_gens.iter().zip(&h.h_gens) {
                out.push_str(&format!("map: {hp} -> {hh}\n"));
            }
        }
    }
    out
}
