//! Plain-text files for switch specs and subspace bases.
//!
//! A switch spec file:
//!
//! ```text
//! polar-srg-switchspec 1
//! space <kind> <q> <d>
//! source identity | complement | custom | random <seed> | swap <i> <class> <a> <b>
//! l <e_1> ... <e_n>                 one line per basis row of L
//! sigma <i> <class> <s_0> ... <s_{q-1}>
//! end
//! ```
//!
//! Field elements are written as their indices (`c0 + c1·p + …`). Lines
//! starting with `#` and blank lines are ignored. `sigma` lines may appear
//! in any order but each `(i, class)` at most once. If there are none, the
//! permutations are regenerated from the `source` line; otherwise every
//! class must be listed. The writer emits every class, in order.
//!
//! A basis file has one vector per line, entries as element indices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gf::{Field, FieldError};
use crate::linalg::{LinalgError, Subspace};
use crate::polar::{PolarError, PolarKind, PolarSpace};
use crate::switching::{SigmaSource, SwitchContext, SwitchError, SwitchSpec};

pub const SPEC_HEADER: &str = "polar-srg-switchspec 1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecFileError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Switch(#[from] SwitchError),
}

/// A parsed but not yet validated switch spec file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecSyntax {
    pub kind: PolarKind,
    pub q: u64,
    pub d: usize,
    pub source: SigmaSource,
    pub l_rows: Vec<Vec<u32>>,
    pub sigmas: BTreeMap<(usize, usize), Vec<usize>>,
}

fn syntax(line: usize, reason: impl Into<String>) -> SpecFileError {
    SpecFileError::Syntax {
        line,
        reason: reason.into(),
    }
}

fn numbers<T: std::str::FromStr>(line: usize, words: &[&str]) -> Result<Vec<T>, SpecFileError> {
    words
        .iter()
        .map(|w| w.parse().map_err(|_| syntax(line, format!("bad number {w:?}"))))
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let words: Vec<&str> = raw.split_whitespace().collect();
        match words.first() {
            None => None,
            Some(w) if w.starts_with('#') => None,
            Some(_) => Some((i + 1, words)),
        }
    })
}

fn parse_source(line: usize, args: &[&str]) -> Result<SigmaSource, SpecFileError> {
    let (name, rest) = args.split_first().ok_or_else(|| syntax(line, "empty source"))?;
    let arity = |n: usize| {
        if rest.len() == n {
            Ok(())
        } else {
            Err(syntax(line, format!("source {name} takes {n} arguments")))
        }
    };
    match *name {
        "identity" => arity(0).map(|_| SigmaSource::Identity),
        "complement" => arity(0).map(|_| SigmaSource::Complement),
        "custom" => arity(0).map(|_| SigmaSource::Custom),
        "random" => {
            arity(1)?;
            let seed = numbers::<u64>(line, rest)?[0];
            Ok(SigmaSource::Random { seed })
        }
        "swap" => {
            arity(4)?;
            let v = numbers::<usize>(line, rest)?;
            Ok(SigmaSource::Swap {
                generator: v[0],
                class: v[1],
                slots: (v[2], v[3]),
            })
        }
        other => Err(syntax(line, format!("unknown source {other:?}"))),
    }
}

pub fn parse_spec(text: &str) -> Result<SpecSyntax, SpecFileError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, words)) if words.join(" ") == SPEC_HEADER => {}
        Some((line, _)) => return Err(syntax(line, format!("expected {SPEC_HEADER:?}"))),
        None => return Err(SpecFileError::Missing("header")),
    }
    let mut space = None;
    let mut source = None;
    let mut l_rows = Vec::new();
    let mut sigmas = BTreeMap::new();
    let mut ended = false;
    for (line, words) in lines {
        if ended {
            return Err(syntax(line, "content after end"));
        }
        let (key, args) = words.split_first().expect("content lines are non-empty");
        match *key {
            "space" => {
                if space.is_some() {
                    return Err(syntax(line, "duplicate space line"));
                }
                if args.len() != 3 {
                    return Err(syntax(line, "space takes <kind> <q> <d>"));
                }
                let kind: PolarKind = args[0]
                    .parse()
                    .map_err(|_| syntax(line, format!("unknown kind {:?}", args[0])))?;
                let q = numbers::<u64>(line, &args[1..2])?[0];
                let d = numbers::<usize>(line, &args[2..3])?[0];
                space = Some((kind, q, d));
            }
            "source" => {
                if source.is_some() {
                    return Err(syntax(line, "duplicate source line"));
                }
                source = Some(parse_source(line, args)?);
            }
            "l" => {
                if !sigmas.is_empty() {
                    return Err(syntax(line, "l rows must precede sigma lines"));
                }
                l_rows.push(numbers::<u32>(line, args)?);
            }
            "sigma" => {
                if args.len() < 2 {
                    return Err(syntax(line, "sigma takes <i> <class> <perm...>"));
                }
                let v = numbers::<usize>(line, args)?;
                if sigmas.insert((v[0], v[1]), v[2..].to_vec()).is_some() {
                    return Err(syntax(line, format!("duplicate sigma {} {}", v[0], v[1])));
                }
            }
            "end" => {
                if !args.is_empty() {
                    return Err(syntax(line, "end takes no arguments"));
                }
                ended = true;
            }
            other => return Err(syntax(line, format!("unknown directive {other:?}"))),
        }
    }
    if !ended {
        return Err(SpecFileError::Missing("end"));
    }
    let (kind, q, d) = space.ok_or(SpecFileError::Missing("space line"))?;
    Ok(SpecSyntax {
        kind,
        q,
        d,
        source: source.ok_or(SpecFileError::Missing("source line"))?,
        l_rows,
        sigmas,
    })
}

/// Parses a basis file into rows of element indices.
pub fn parse_basis(text: &str) -> Result<Vec<Vec<u32>>, SpecFileError> {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (line, words) in content_lines(text) {
        let row: Vec<u32> = numbers(line, &words)?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(syntax(
                    line,
                    format!("{} entries, first row has {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// The span of `rows` in `GF(q)^n`.
pub fn rows_to_subspace(field: &Field, n: usize, rows: &[Vec<u32>]) -> Result<Subspace, SpecFileError> {
    let mut vectors = Vec::with_capacity(rows.len());
    for row in rows {
        if row.len() != n {
            return Err(LinalgError::LengthMismatch {
                expected: n,
                found: row.len(),
            }
            .into());
        }
        vectors.push(
            row.iter()
                .map(|&i| field.from_index(i))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(Subspace::span(field, n, vectors)?)
}

pub fn subspace_rows(s: &Subspace) -> Vec<Vec<u32>> {
    s.basis()
        .iter()
        .map(|row| row.iter().map(|e| e.index()).collect())
        .collect()
}

impl SpecSyntax {
    pub fn space(&self) -> Result<PolarSpace, SpecFileError> {
        Ok(PolarSpace::new(self.kind, self.q, self.d)?)
    }

    pub fn l(&self, space: &PolarSpace) -> Result<Subspace, SpecFileError> {
        rows_to_subspace(space.field(), space.ambient_dim(), &self.l_rows)
    }

    /// Builds the context named by the file.
    pub fn context(&self) -> Result<SwitchContext, SpecFileError> {
        let space = self.space()?;
        let l = self.l(&space)?;
        Ok(SwitchContext::new(space, l)?)
    }

    /// Resolves the permutations against `ctx`.
    pub fn to_spec(&self, ctx: &SwitchContext) -> Result<SwitchSpec, SpecFileError> {
        if self.sigmas.is_empty() {
            return Ok(ctx.sigma_from_source(&self.source)?);
        }
        let mut spec = ctx.sigma_identity();
        spec.source = self.source.clone();
        let expected: usize = spec.sigmas.iter().map(Vec::len).sum();
        if self.sigmas.len() != expected {
            return Err(SwitchError::SpecMismatch(format!(
                "{} sigma lines, expected {expected}",
                self.sigmas.len()
            ))
            .into());
        }
        for (&(i, c), perm) in &self.sigmas {
            let slot = spec
                .sigmas
                .get_mut(i)
                .and_then(|g| g.get_mut(c))
                .ok_or_else(|| SwitchError::SpecMismatch(format!("no class {c} on generator {i}")))?;
            *slot = perm.clone();
        }
        ctx.validate(&spec)?;
        Ok(spec)
    }
}

pub fn write_spec(spec: &SwitchSpec) -> String {
    let mut out = String::new();
    writeln!(out, "{SPEC_HEADER}").unwrap();
    writeln!(out, "space {} {} {}", spec.kind.slug(), spec.q, spec.d).unwrap();
    writeln!(out, "source {}", spec.source).unwrap();
    for row in subspace_rows(&spec.l) {
        writeln!(out, "l {}", join(&row)).unwrap();
    }
    for (i, perms) in spec.sigmas.iter().enumerate() {
        for (c, perm) in perms.iter().enumerate() {
            writeln!(out, "sigma {i} {c} {}", join(perm)).unwrap();
        }
    }
    out.push_str("end\n");
    out
}

pub fn write_basis(s: &Subspace) -> String {
    subspace_rows(s)
        .iter()
        .map(|r| format!("{}\n", join(r)))
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}
