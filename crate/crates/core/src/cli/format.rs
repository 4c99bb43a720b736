//! Text formats for spaces and multivector fields.
//!
//! Poset format: `cell <name> [dim]` and `cover <lower> <upper>` lines.
//! Simplicial format: one simplex per line as whitespace-separated vertices.
//! Field format: one multivector per line as whitespace-separated cell names.
//! In all formats `#` starts a comment and blank lines are ignored.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::mvf::{FieldError, MultivectorField};
use crate::space::{Cell, FiniteSpace, SpaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Space { line: usize, source: SpaceError },
    #[error(transparent)]
    Structure(#[from] SpaceError),
}

/// Nonblank, comment-stripped lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

pub fn parse_poset(text: &str) -> Result<FiniteSpace, ParseError> {
    let mut cells: Vec<Cell> = Vec::new();
    let mut names = BTreeSet::new();
    let mut covers: Vec<(usize, String, String)> = Vec::new();
    for (line, words) in content_lines(text) {
        let syntax = |message: String| ParseError::Syntax { line, message };
        match words[0] {
            "cell" => {
                let (name, dim) = match &words[1..] {
                    [name] => (*name, None),
                    [name, dim] => {
                        let d = dim.parse::<usize>().map_err(|_| syntax(format!("invalid dimension `{dim}`")))?;
                        (*name, Some(d))
                    }
                    _ => return Err(syntax("expected `cell <name> [dim]`".into())),
                };
                if !names.insert(name.to_string()) {
                    return Err(ParseError::Space { line, source: SpaceError::DuplicateName(name.into()) });
                }
                cells.push(Cell { name: name.into(), dim, vertices: None });
            }
            "cover" => match &words[1..] {
                [lo, hi] => covers.push((line, lo.to_string(), hi.to_string())),
                _ => return Err(syntax("expected `cover <lower> <upper>`".into())),
            },
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    for (line, lo, hi) in &covers {
        for name in [lo, hi] {
            if !names.contains(name) {
                return Err(ParseError::Space { line: *line, source: SpaceError::UnknownName(name.clone()) });
            }
        }
    }
    let pairs: Vec<(String, String)> = covers.into_iter().map(|(_, lo, hi)| (lo, hi)).collect();
    Ok(FiniteSpace::from_named_relations(cells, &pairs)?)
}

pub fn parse_simplicial(text: &str) -> Result<FiniteSpace, ParseError> {
    let simplices: Vec<Vec<&str>> = content_lines(text).map(|(_, words)| words).collect();
    Ok(FiniteSpace::from_simplicial_complex(&simplices)?)
}

/// Multivectors as name lists, checked against the space's cell names.
pub fn parse_field_parts(space: &FiniteSpace, text: &str) -> Result<Vec<Vec<String>>, ParseError> {
    let mut parts = Vec::new();
    for (line, words) in content_lines(text) {
        for w in &words {
            if space.id(w).is_none() {
                return Err(ParseError::Space { line, source: SpaceError::UnknownName(w.to_string()) });
            }
        }
        parts.push(words.into_iter().map(String::from).collect());
    }
    Ok(parts)
}

pub fn parse_field(space: Arc<FiniteSpace>, text: &str) -> Result<Result<MultivectorField, FieldError>, ParseError> {
    let parts = parse_field_parts(&space, text)?;
    let sets = parts.iter().map(|p| space.set_from_names(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(MultivectorField::new(space, sets))
}

pub fn emit_poset(space: &FiniteSpace) -> String {
    let mut out = String::new();
    for c in space.cells() {
        match c.dim {
            Some(d) => out.push_str(&format!("cell {} {}\n", c.name, d)),
            None => out.push_str(&format!("cell {}\n", c.name)),
        }
    }
    for (lo, hi) in space.cover_pairs() {
        out.push_str(&format!("cover {} {}\n", space.name(lo), space.name(hi)));
    }
    out
}

/// Maximal simplices, one per line. `None` unless the space is simplicial.
pub fn emit_simplicial(space: &FiniteSpace) -> Option<String> {
    if !space.is_simplicial() {
        return None;
    }
    let mut out = String::new();
    for id in space.ids() {
        if space.upper_covers(id).next().is_none() {
            out.push_str(&space.cell(id).vertices.as_ref()?.join(" "));
            out.push('\n');
        }
    }
    Some(out)
}

pub fn emit_field(field: &MultivectorField) -> String {
    let space = field.space();
    field.multivectors().iter().map(|m| space.names(m).join(" ") + "\n").collect()
}
