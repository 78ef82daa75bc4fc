//! Structured text formats: predicates, sequence families, homomorphism
//! lists, truncation configs, matrices, C-set structures, colorings, and
//! bounds files. Everything is plain UTF-8; parse errors carry line
//! numbers.
//!
//! Expression-shaped inputs use a tiny s-expression syntax with `;`
//! comments and double-quoted word literals, e.g.
//! `(and (length-mod 2 0) (starts-with "a"))`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hj::Coloring;
use crate::jset::{Elem, PredicateSpec, PsgSequenceSpec, SequenceSpec};
use crate::lift::{CSetStructure, ShiftRule};
use crate::psg::PsgTruncation;
use crate::words::{Alphabet, HomSpec, Word};
use crate::Bounds;

/// One parsed s-expression node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn line(&self) -> usize {
        match self {
            Sexp::Atom(_, l) | Sexp::Str(_, l) | Sexp::List(_, l) => *l,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug)]
enum Token {
    Open(usize),
    Close(usize),
    Atom(String, usize),
    Str(String, usize),
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            ';' => {
                for d in chars.by_ref() {
                    if d == '\n' {
                        line += 1;
                        break;
                    }
                }
            }
            '(' => tokens.push(Token::Open(line)),
            ')' => tokens.push(Token::Close(line)),
            '"' => {
                let mut s = String::new();
                let mut closed = false;
                for d in chars.by_ref() {
                    if d == '"' {
                        closed = true;
                        break;
                    }
                    if d == '\n' {
                        return Err(err(line, "unterminated string"));
                    }
                    s.push(d);
                }
                if !closed {
                    return Err(err(line, "unterminated string"));
                }
                tokens.push(Token::Str(s, line));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::new();
                s.push(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' || d == ';' || d == '"' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                tokens.push(Token::Atom(s, line));
            }
        }
    }
    Ok(tokens)
}

/// Parse every top-level s-expression in the input.
pub fn parse_sexps(input: &str) -> Result<Vec<Sexp>> {
    let tokens = tokenize(input)?;
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut top = Vec::new();
    for token in tokens {
        match token {
            Token::Open(l) => stack.push((Vec::new(), l)),
            Token::Close(l) => {
                let (items, open_line) =
                    stack.pop().ok_or_else(|| err(l, "unmatched ')'"))?;
                let node = Sexp::List(items, open_line);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            Token::Atom(s, l) => {
                let node = Sexp::Atom(s, l);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            Token::Str(s, l) => {
                let node = Sexp::Str(s, l);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
        }
    }
    if let Some((_, l)) = stack.last() {
        return Err(err(*l, "unmatched '('"));
    }
    Ok(top)
}

/// Parse exactly one s-expression.
pub fn parse_single_sexp(input: &str) -> Result<Sexp> {
    let mut all = parse_sexps(input)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(err(1, "expected an expression")),
        _ => Err(err(all[1].line(), "expected a single expression")),
    }
}

fn atom_u64(node: &Sexp) -> Result<u64> {
    match node {
        Sexp::Atom(s, l) => s
            .parse()
            .map_err(|_| err(*l, format!("expected a number, got {s:?}"))),
        other => Err(err(other.line(), "expected a number")),
    }
}

fn atom_usize(node: &Sexp) -> Result<usize> {
    Ok(atom_u64(node)? as usize)
}

fn str_word(node: &Sexp, alphabet: Option<&Alphabet>) -> Result<Word> {
    let (s, l) = match node {
        Sexp::Str(s, l) => (s, *l),
        other => return Err(err(other.line(), "expected a quoted word")),
    };
    let alphabet =
        alphabet.ok_or_else(|| err(l, "word literal used without an alphabet in scope"))?;
    alphabet
        .parse_word(s)
        .map_err(|e| err(l, format!("bad word {s:?}: {e}")))
}

fn head<'a>(node: &'a Sexp) -> Result<(&'a str, &'a [Sexp], usize)> {
    match node {
        Sexp::List(items, l) => match items.first() {
            Some(Sexp::Atom(h, _)) => Ok((h.as_str(), &items[1..], *l)),
            _ => Err(err(*l, "expected a named form")),
        },
        Sexp::Atom(s, l) => Ok((s.as_str(), &[], *l)),
        Sexp::Str(_, l) => Err(err(*l, "expected a form, got a string")),
    }
}

fn parse_predicate_node(node: &Sexp, alphabet: Option<&Alphabet>) -> Result<PredicateSpec> {
    let (name, args, line) = head(node)?;
    let expect_args = |n: usize| -> Result<()> {
        if args.len() != n {
            Err(err(line, format!("{name} expects {n} argument(s), got {}", args.len())))
        } else {
            Ok(())
        }
    };
    match name {
        "true" => {
            expect_args(0)?;
            Ok(PredicateSpec::True)
        }
        "false" => {
            expect_args(0)?;
            Ok(PredicateSpec::False)
        }
        "length-mod" => {
            expect_args(2)?;
            let q = atom_u64(&args[0])?;
            let r = atom_u64(&args[1])?;
            if q == 0 || r >= q {
                return Err(err(line, "length-mod needs q >= 1 and r < q"));
            }
            Ok(PredicateSpec::LengthMod { q, r })
        }
        "letter-count" => {
            expect_args(3)?;
            let w = str_word(&args[0], alphabet)?;
            if w.len() != 1 {
                return Err(err(line, "letter-count expects a single letter"));
            }
            let q = atom_u64(&args[1])?;
            let r = atom_u64(&args[2])?;
            if q == 0 || r >= q {
                return Err(err(line, "letter-count needs q >= 1 and r < q"));
            }
            Ok(PredicateSpec::LetterCountMod {
                sym: w.syms()[0],
                q,
                r,
            })
        }
        "starts-with" => {
            expect_args(1)?;
            Ok(PredicateSpec::StartsWith(str_word(&args[0], alphabet)?))
        }
        "ends-with" => {
            expect_args(1)?;
            Ok(PredicateSpec::EndsWith(str_word(&args[0], alphabet)?))
        }
        "member-of" => {
            if args.is_empty() {
                return Err(err(line, "member-of needs at least one element"));
            }
            match &args[0] {
                Sexp::Str(..) => {
                    let mut words = BTreeSet::new();
                    for a in args {
                        words.insert(str_word(a, alphabet)?);
                    }
                    Ok(PredicateSpec::MemberOfWords(words))
                }
                Sexp::Atom(..) => {
                    let mut nats = BTreeSet::new();
                    for a in args {
                        nats.insert(atom_u64(a)?);
                    }
                    Ok(PredicateSpec::MemberOfNats(nats))
                }
                other => Err(err(other.line(), "member-of takes words or numbers")),
            }
        }
        "member-of-labels" => {
            let mut labels = BTreeSet::new();
            for a in args {
                match a {
                    Sexp::Str(s, _) => {
                        labels.insert(s.clone());
                    }
                    other => return Err(err(other.line(), "expected a quoted label")),
                }
            }
            Ok(PredicateSpec::MemberOfLabels(labels))
        }
        "value-mod" => {
            expect_args(2)?;
            let q = atom_u64(&args[0])?;
            let r = atom_u64(&args[1])?;
            if q == 0 || r >= q {
                return Err(err(line, "value-mod needs q >= 1 and r < q"));
            }
            Ok(PredicateSpec::ValueMod { q, r })
        }
        "in-fs-prefix" => {
            if args.is_empty() {
                return Err(err(line, "in-fs-prefix needs at least one generator"));
            }
            let gens: Result<Vec<u64>> = args.iter().map(atom_u64).collect();
            PredicateSpec::in_fs_prefix(&gens?)
                .map_err(|e| err(line, format!("bad FS prefix: {e}")))
        }
        "and" | "or" => {
            if args.is_empty() {
                return Err(err(line, format!("{name} needs at least one operand")));
            }
            let parts: Result<Vec<PredicateSpec>> = args
                .iter()
                .map(|a| parse_predicate_node(a, alphabet))
                .collect();
            Ok(if name == "and" {
                PredicateSpec::And(parts?)
            } else {
                PredicateSpec::Or(parts?)
            })
        }
        "not" => {
            expect_args(1)?;
            Ok(PredicateSpec::Not(Box::new(parse_predicate_node(
                &args[0], alphabet,
            )?)))
        }
        other => Err(err(line, format!("unknown predicate form {other:?}"))),
    }
}

/// Parse a predicate document (one expression).
pub fn parse_predicate(input: &str, alphabet: Option<&Alphabet>) -> Result<PredicateSpec> {
    parse_predicate_node(&parse_single_sexp(input)?, alphabet)
}

fn parse_sequence_node(node: &Sexp, alphabet: Option<&Alphabet>) -> Result<SequenceSpec> {
    let (name, args, line) = head(node)?;
    match name {
        "explicit" => {
            if args.is_empty() {
                return Err(err(line, "explicit sequence needs at least one element"));
            }
            let mut items = Vec::new();
            for a in args {
                match a {
                    Sexp::Str(..) => items.push(Elem::Word(str_word(a, alphabet)?)),
                    Sexp::Atom(..) => items.push(Elem::Nat(atom_u64(a)?)),
                    other => return Err(err(other.line(), "expected a word or number")),
                }
            }
            Ok(SequenceSpec::Explicit(items))
        }
        "word-power" => {
            if args.len() != 1 {
                return Err(err(line, "word-power expects one word"));
            }
            let w = str_word(&args[0], alphabet)?;
            if w.is_empty() {
                return Err(err(line, "word-power needs a nonempty word"));
            }
            Ok(SequenceSpec::WordPower(w))
        }
        "var-power" => {
            if args.len() != 1 {
                return Err(err(line, "var-power expects a variable index"));
            }
            let i = atom_usize(&args[0])?;
            if i == 0 {
                return Err(err(line, "variable indices are 1-based"));
            }
            Ok(SequenceSpec::VarPower(i))
        }
        "block-power" => {
            if args.len() != 1 {
                return Err(err(line, "block-power expects a variable count"));
            }
            let n = atom_usize(&args[0])?;
            if n == 0 {
                return Err(err(line, "block-power needs n >= 1"));
            }
            Ok(SequenceSpec::BlockPower(n))
        }
        "nat-id" => Ok(SequenceSpec::NatId),
        "nat-scale" => {
            if args.len() != 1 {
                return Err(err(line, "nat-scale expects a factor"));
            }
            Ok(SequenceSpec::NatScale(atom_u64(&args[0])?))
        }
        other => Err(err(line, format!("unknown sequence form {other:?}"))),
    }
}

/// Parse a sequence-family document: one sequence expression per line.
pub fn parse_sequences(input: &str, alphabet: Option<&Alphabet>) -> Result<Vec<SequenceSpec>> {
    parse_sexps(input)?
        .iter()
        .map(|node| parse_sequence_node(node, alphabet))
        .collect()
}

/// Parse a family of truncation sequences.
pub fn parse_psg_sequences(input: &str) -> Result<Vec<PsgSequenceSpec>> {
    parse_sexps(input)?
        .iter()
        .map(|node| {
            let (name, args, line) = head(node)?;
            match name {
                "fs-singleton" => Ok(PsgSequenceSpec::FsSingleton),
                "fs-pair" => Ok(PsgSequenceSpec::FsPair),
                "fs-explicit" => {
                    let mut sets = Vec::new();
                    for a in args {
                        let Sexp::List(items, l) = a else {
                            return Err(err(a.line(), "expected an index list"));
                        };
                        let indices: Result<Vec<u64>> = items.iter().map(atom_u64).collect();
                        let indices: Vec<u32> = indices?.into_iter().map(|i| i as u32).collect();
                        if indices.is_empty() {
                            return Err(err(*l, "index sets must be nonempty"));
                        }
                        sets.push(indices);
                    }
                    if sets.is_empty() {
                        return Err(err(line, "fs-explicit needs at least one index set"));
                    }
                    Ok(PsgSequenceSpec::ExplicitIndices(sets))
                }
                "labels" => {
                    let mut labels = Vec::new();
                    for a in args {
                        match a {
                            Sexp::Str(s, _) => labels.push(s.clone()),
                            other => return Err(err(other.line(), "expected a quoted label")),
                        }
                    }
                    if labels.is_empty() {
                        return Err(err(line, "labels needs at least one element"));
                    }
                    Ok(PsgSequenceSpec::ExplicitLabels(labels))
                }
                other => Err(err(line, format!("unknown truncation sequence form {other:?}"))),
            }
        })
        .collect()
}

/// Parse a homomorphism-list document: one expression per line.
pub fn parse_homs(input: &str, alphabet: &Alphabet) -> Result<Vec<HomSpec>> {
    parse_sexps(input)?
        .iter()
        .map(|node| {
            let (name, args, line) = head(node)?;
            match name {
                "subst" => {
                    if args.len() != 1 {
                        return Err(err(line, "subst expects a letter tuple as a word"));
                    }
                    let w = str_word(&args[0], Some(alphabet))?;
                    if !w.in_s0() {
                        return Err(err(line, "subst tuple must be nonempty letters"));
                    }
                    Ok(HomSpec::Substitution(w.syms().to_vec()))
                }
                "subst-word" => {
                    if args.len() != 1 {
                        return Err(err(line, "subst-word expects a word"));
                    }
                    let w = str_word(&args[0], Some(alphabet))?;
                    if !w.in_s0() {
                        return Err(err(line, "substitution word must be in S0"));
                    }
                    Ok(HomSpec::SubstitutionByWord(w))
                }
                "var-count" => {
                    if args.len() != 1 {
                        return Err(err(line, "var-count expects a variable index"));
                    }
                    let i = atom_usize(&args[0])?;
                    if i == 0 || i > alphabet.nvars() {
                        return Err(err(line, format!(
                            "variable index must lie in 1..={}",
                            alphabet.nvars()
                        )));
                    }
                    Ok(HomSpec::VarCount(i))
                }
                "pattern-extract" => {
                    if args.len() != 1 {
                        return Err(err(line, "pattern-extract expects a count"));
                    }
                    let k = atom_usize(&args[0])?;
                    if k == 0 {
                        return Err(err(line, "pattern-extract needs k >= 1"));
                    }
                    Ok(HomSpec::PatternExtract(k))
                }
                "table" => {
                    let mut map = BTreeMap::new();
                    for a in args {
                        let Sexp::List(pair, l) = a else {
                            return Err(err(a.line(), "expected (symbol image) pairs"));
                        };
                        if pair.len() != 2 {
                            return Err(err(*l, "table entries are (symbol image) pairs"));
                        }
                        let key = str_word(&pair[0], Some(alphabet))?;
                        if key.len() != 1 {
                            return Err(err(*l, "table keys are single symbols"));
                        }
                        let image = str_word(&pair[1], Some(alphabet))?;
                        map.insert(key.syms()[0], image);
                    }
                    if map.is_empty() {
                        return Err(err(line, "table needs at least one entry"));
                    }
                    Ok(HomSpec::UserTable(map))
                }
                other => Err(err(line, format!("unknown homomorphism form {other:?}"))),
            }
        })
        .collect()
}

/// Parse a truncation config.
///
/// ```text
/// mode fs            ; fs | fp-nat | fp-word | table
/// generators 1 2 4
/// ```
///
/// Word mode carries its own alphabet:
///
/// ```text
/// mode fp-word
/// alphabet-k 2
/// nvars 1
/// generators "#1" "#1#1"
/// ```
///
/// Table mode lists elements and defined products; missing entries and the
/// reserved marker `_` mean undefined:
///
/// ```text
/// mode table
/// elements x y
/// op x x = y
/// op x y = _
/// ```
pub fn parse_psg_config(input: &str) -> Result<(PsgTruncation, Option<Alphabet>)> {
    let mut mode: Option<String> = None;
    let mut alphabet_k: Option<usize> = None;
    let mut nvars: usize = 1;
    let mut generators_line: Option<(String, usize)> = None;
    let mut elements: Vec<String> = Vec::new();
    let mut ops: Vec<(String, String, String, usize)> = Vec::new();

    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        match key {
            "mode" => {
                mode = Some(
                    parts
                        .next()
                        .ok_or_else(|| err(lineno, "mode needs a value"))?
                        .to_string(),
                );
            }
            "alphabet-k" => {
                alphabet_k = Some(
                    parts
                        .next()
                        .ok_or_else(|| err(lineno, "alphabet-k needs a value"))?
                        .parse()
                        .map_err(|_| err(lineno, "alphabet-k must be a number"))?,
                );
            }
            "nvars" => {
                nvars = parts
                    .next()
                    .ok_or_else(|| err(lineno, "nvars needs a value"))?
                    .parse()
                    .map_err(|_| err(lineno, "nvars must be a number"))?;
            }
            "generators" => {
                let rest = line["generators".len()..].trim().to_string();
                generators_line = Some((rest, lineno));
            }
            "elements" => {
                elements = parts.map(String::from).collect();
                if elements.is_empty() {
                    return Err(err(lineno, "elements needs at least one label"));
                }
            }
            "op" => {
                let rest: Vec<&str> = parts.collect();
                if rest.len() != 4 || rest[2] != "=" {
                    return Err(err(lineno, "op lines read: op X Y = Z"));
                }
                ops.push((
                    rest[0].to_string(),
                    rest[1].to_string(),
                    rest[3].to_string(),
                    lineno,
                ));
            }
            other => return Err(err(lineno, format!("unknown config key {other:?}"))),
        }
    }

    let mode = mode.ok_or_else(|| err(1, "config needs a mode line"))?;
    match mode.as_str() {
        "fs" | "fp-nat" => {
            let (gens_str, lineno) =
                generators_line.ok_or_else(|| err(1, "config needs a generators line"))?;
            let gens: Result<Vec<u64>> = gens_str
                .split_whitespace()
                .map(|s| {
                    s.parse()
                        .map_err(|_| err(lineno, format!("bad generator {s:?}")))
                })
                .collect();
            let gens = gens?;
            let trunc = if mode == "fs" {
                PsgTruncation::fs_prefix_nat(&gens)?
            } else {
                PsgTruncation::fp_prefix_nat(&gens)?
            };
            Ok((trunc, None))
        }
        "fp-word" => {
            let k = alphabet_k.ok_or_else(|| err(1, "fp-word needs an alphabet-k line"))?;
            let alphabet = Alphabet::new(k, nvars)?;
            let (gens_str, lineno) =
                generators_line.ok_or_else(|| err(1, "config needs a generators line"))?;
            let nodes = parse_sexps(&gens_str)?;
            let mut gens = Vec::new();
            for node in &nodes {
                match node {
                    Sexp::Str(s, _) => gens.push(
                        alphabet
                            .parse_word(s)
                            .map_err(|e| err(lineno, format!("bad word {s:?}: {e}")))?,
                    ),
                    other => return Err(err(other.line(), "fp-word generators are quoted words")),
                }
            }
            if gens.iter().any(|w| w.is_empty()) {
                return Err(err(lineno, "generators must be nonempty words"));
            }
            let trunc = PsgTruncation::fp_prefix_word(&gens)?;
            Ok((trunc, Some(alphabet)))
        }
        "table" => {
            if elements.is_empty() {
                return Err(err(1, "table mode needs an elements line"));
            }
            let index_of = |label: &str, lineno: usize| -> Result<usize> {
                elements
                    .iter()
                    .position(|e| e == label)
                    .ok_or_else(|| err(lineno, format!("unknown element {label:?}")))
            };
            let n = elements.len();
            let mut table = vec![vec![None; n]; n];
            for (x, y, z, lineno) in ops {
                let xi = index_of(&x, lineno)?;
                let yi = index_of(&y, lineno)?;
                table[xi][yi] = if z == "_" {
                    None
                } else {
                    Some(index_of(&z, lineno)?)
                };
            }
            let trunc = PsgTruncation::from_table(elements, table)?;
            Ok((trunc, None))
        }
        other => Err(err(1, format!("unknown mode {other:?}"))),
    }
}

/// Parse an element list such as `H=[1,3]; H=[2]` (or labels for table
/// truncations) against a truncation.
pub fn parse_elem_list(input: &str, trunc: &PsgTruncation) -> Result<Vec<crate::psg::ElemId>> {
    let mut out = Vec::new();
    for (i, part) in input
        .split([';', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
    {
        let lineno = i + 1;
        if let Some(rest) = part.strip_prefix("H=[") {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| err(lineno, format!("missing ']' in {part:?}")))?;
            let indices: Result<Vec<u32>> = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| err(lineno, format!("bad index {s:?}")))
                })
                .collect();
            let indices = indices?;
            let id = trunc
                .elem_by_indices(&indices)
                .ok_or_else(|| err(lineno, format!("no element with indices {indices:?}")))?;
            out.push(id);
        } else {
            let id = trunc
                .elem_by_label(part)
                .ok_or_else(|| err(lineno, format!("no element labeled {part:?}")))?;
            out.push(id);
        }
    }
    Ok(out)
}

/// Parse a matrix document:
///
/// ```text
/// rows 2
/// cols 2
/// row 1 0
/// row 0 1
/// ```
pub fn parse_matrix(input: &str) -> Result<(usize, usize, Vec<Vec<u64>>)> {
    let mut rows: Option<usize> = None;
    let mut cols: Option<usize> = None;
    let mut entries: Vec<Vec<u64>> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next().unwrap() {
            "rows" => {
                rows = Some(
                    parts
                        .next()
                        .ok_or_else(|| err(lineno, "rows needs a value"))?
                        .parse()
                        .map_err(|_| err(lineno, "rows must be a number"))?,
                )
            }
            "cols" => {
                cols = Some(
                    parts
                        .next()
                        .ok_or_else(|| err(lineno, "cols needs a value"))?
                        .parse()
                        .map_err(|_| err(lineno, "cols must be a number"))?,
                )
            }
            "row" => {
                let row: Result<Vec<u64>> = parts
                    .map(|s| {
                        s.parse()
                            .map_err(|_| err(lineno, format!("bad entry {s:?}")))
                    })
                    .collect();
                entries.push(row?);
            }
            other => return Err(err(lineno, format!("unknown matrix key {other:?}"))),
        }
    }
    let rows = rows.ok_or_else(|| err(1, "matrix needs a rows line"))?;
    let cols = cols.ok_or_else(|| err(1, "matrix needs a cols line"))?;
    if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
        return Err(err(1, format!("matrix body does not match {rows}x{cols}")));
    }
    Ok((rows, cols, entries))
}

/// Parse FS prefixes, one per line: `fs 1 3 9`.
pub fn parse_fs_prefixes(input: &str) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        if parts.next() != Some("fs") {
            return Err(err(lineno, "FS prefix lines start with 'fs'"));
        }
        let gens: Result<Vec<u64>> = parts
            .map(|s| {
                s.parse()
                    .map_err(|_| err(lineno, format!("bad generator {s:?}")))
            })
            .collect();
        let gens = gens?;
        if gens.is_empty() {
            return Err(err(lineno, "FS prefix needs at least one generator"));
        }
        out.push(gens);
    }
    if out.is_empty() {
        return Err(err(1, "expected at least one FS prefix"));
    }
    Ok(out)
}

/// Parse a C-set structure document:
///
/// ```text
/// depth 2
/// d (length-mod 2 0)
/// d (length-mod 2 0)
/// shift same        ; or: shift const 1
/// ```
pub fn parse_cset_structure(input: &str, alphabet: &Alphabet) -> Result<CSetStructure> {
    let mut depth: Option<usize> = None;
    let mut shift: Option<ShiftRule> = None;
    let mut levels: Vec<PredicateSpec> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("depth") {
            depth = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| err(lineno, "depth must be a number"))?,
            );
        } else if let Some(rest) = line.strip_prefix("d ") {
            levels.push(
                parse_predicate(rest.trim(), Some(alphabet))
                    .map_err(|e| err(lineno, format!("bad level predicate: {e}")))?,
            );
        } else if let Some(rest) = line.strip_prefix("shift") {
            let mut parts = rest.trim().split_whitespace();
            shift = Some(match parts.next() {
                Some("same") => ShiftRule::Same,
                Some("const") => {
                    let m: usize = parts
                        .next()
                        .ok_or_else(|| err(lineno, "shift const needs a depth"))?
                        .parse()
                        .map_err(|_| err(lineno, "shift const needs a number"))?;
                    ShiftRule::Const(m)
                }
                _ => return Err(err(lineno, "shift is 'same' or 'const <m>'")),
            });
        } else {
            return Err(err(lineno, format!("unknown structure line {line:?}")));
        }
    }
    let depth = depth.ok_or_else(|| err(1, "structure needs a depth line"))?;
    let shift = shift.ok_or_else(|| err(1, "structure needs a shift line"))?;
    if levels.len() != depth {
        return Err(err(
            1,
            format!("expected {depth} level predicates, got {}", levels.len()),
        ));
    }
    CSetStructure::new(levels, shift)
}

/// Parse a coloring document: one `word<TAB>color` pair per line. The
/// domain shape (fixed length vs cumulative) is inferred and must be total.
pub fn parse_coloring(input: &str, alphabet: &Alphabet) -> Result<Coloring> {
    let mut pairs: Vec<(Word, u32, usize)> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with(';') {
            continue;
        }
        let (word_str, color_str) = line.split_once(['\t', ' ']).ok_or_else(|| {
            err(lineno, "expected 'word<TAB>color'")
        })?;
        let word = alphabet
            .parse_word(word_str.trim())
            .map_err(|e| err(lineno, format!("bad word: {e}")))?;
        if !word.in_s0() {
            return Err(err(lineno, "coloring domain words are variable-free"));
        }
        let color: u32 = color_str
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad color {color_str:?}")))?;
        if color == 0 {
            return Err(err(lineno, "colors are 1-based"));
        }
        pairs.push((word, color, lineno));
    }
    if pairs.is_empty() {
        return Err(err(1, "coloring file is empty"));
    }
    let max_len = pairs.iter().map(|(w, _, _)| w.len()).max().unwrap();
    let min_len = pairs.iter().map(|(w, _, _)| w.len()).min().unwrap();
    let cumulative = min_len != max_len;
    let k = alphabet.k();
    let rank = |w: &Word| -> usize {
        w.syms().iter().fold(0usize, |acc, &s| acc * k + s as usize)
    };
    let offset = |l: usize| -> usize {
        if cumulative {
            (1..l).map(|j| k.pow(j as u32)).sum()
        } else {
            0
        }
    };
    let total: usize = if cumulative {
        (1..=max_len).map(|l| k.pow(l as u32)).sum()
    } else {
        k.pow(max_len as u32)
    };
    let mut colors: Vec<Option<u32>> = vec![None; total];
    for (w, color, lineno) in &pairs {
        if cumulative && w.len() > max_len {
            unreachable!();
        }
        if !cumulative && w.len() != max_len {
            return Err(err(*lineno, "mixed word lengths in a fixed-length coloring"));
        }
        let idx = offset(w.len()) + rank(w);
        if colors[idx].replace(*color).is_some() {
            return Err(err(*lineno, format!(
                "duplicate entry for {}",
                alphabet.display_word(w)
            )));
        }
    }
    let colors: Option<Vec<u32>> = colors.into_iter().collect();
    let colors = colors.ok_or_else(|| err(1, "coloring is not total on its domain"))?;
    if cumulative {
        Coloring::new_cumulative(k, max_len, colors)
    } else {
        Coloring::new_fixed(k, max_len, colors)
    }
}

/// Render a coloring in the file format.
pub fn render_coloring(coloring: &Coloring, alphabet: &Alphabet) -> String {
    let mut out = String::new();
    for (w, c) in coloring.entries(alphabet) {
        out.push_str(&alphabet.display_word(&w));
        out.push('\t');
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

/// Parse a bounds file: `key value` lines with keys `m-max`, `horizon`,
/// `pool-len`, `word-len`, `threads`. Missing keys keep their defaults.
pub fn parse_bounds(input: &str, base: Bounds) -> Result<Bounds> {
    let mut bounds = base;
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(lineno, "expected 'key value'"))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad value {value:?}")))?;
        match key {
            "m-max" => bounds.m_max = value,
            "horizon" => bounds.t_horizon = value,
            "pool-len" => bounds.pool_len = value,
            "word-len" => bounds.word_len = value,
            "threads" => bounds.threads = value,
            other => return Err(err(lineno, format!("unknown bounds key {other:?}"))),
        }
    }
    Ok(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_parsing_roundtrip() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let text = "(and (length-mod 2 0) (not (starts-with \"b\")))";
        let pred = parse_predicate(text, Some(&alphabet)).unwrap();
        assert_eq!(pred.describe(Some(&alphabet)), text);
        let reparsed = parse_predicate(&pred.describe(Some(&alphabet)), Some(&alphabet)).unwrap();
        assert_eq!(pred, reparsed);
    }

    #[test]
    fn predicate_errors_carry_line_numbers() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let text = "(and (length-mod 2 0)\n  (bogus 1))";
        let e = parse_predicate(text, Some(&alphabet)).unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn sequences_parse_one_per_expression() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let text = "; family\n(word-power \"a\")\n(explicit \"a\" \"aa\")\n(nat-id)";
        let seqs = parse_sequences(text, Some(&alphabet)).unwrap();
        assert_eq!(seqs.len(), 3);
        assert_eq!(
            seqs[0],
            SequenceSpec::WordPower(alphabet.parse_word("a").unwrap())
        );
    }

    #[test]
    fn homs_parse() {
        let alphabet = Alphabet::new(2, 2).unwrap();
        let text = "(subst \"ab\")\n(var-count 1)\n(table (\"a\" \"ab\") (\"b\" \"b\"))";
        let homs = parse_homs(text, &alphabet).unwrap();
        assert_eq!(homs.len(), 3);
        assert_eq!(homs[0], HomSpec::Substitution(vec![0, 1]));
        assert_eq!(homs[1], HomSpec::VarCount(1));
    }

    #[test]
    fn psg_config_fs_mode() {
        let (trunc, _) = parse_psg_config("mode fs\ngenerators 1 2 4\n").unwrap();
        assert_eq!(trunc.len(), 7);
    }

    #[test]
    fn psg_config_table_mode() {
        let text = "mode table\nelements x y\nop x x = y\nop y x = _\n";
        let (trunc, _) = parse_psg_config(text).unwrap();
        assert_eq!(trunc.len(), 2);
        let x = trunc.elem_by_label("x").unwrap();
        let y = trunc.elem_by_label("y").unwrap();
        assert_eq!(trunc.op(x, x), Some(y));
        assert_eq!(trunc.op(y, x), None);
    }

    #[test]
    fn elem_list_parses_index_sets() {
        let (trunc, _) = parse_psg_config("mode fs\ngenerators 1 2 4\n").unwrap();
        let elems = parse_elem_list("H=[1]; H=[2,3]", &trunc).unwrap();
        assert_eq!(elems.len(), 2);
        assert_eq!(trunc.indices_of(elems[1]).unwrap(), vec![2, 3]);
    }

    #[test]
    fn matrix_parses() {
        let (r, c, m) = parse_matrix("rows 2\ncols 2\nrow 1 0\nrow 0 1\n").unwrap();
        assert_eq!((r, c), (2, 2));
        assert_eq!(m, vec![vec![1, 0], vec![0, 1]]);
        assert!(parse_matrix("rows 2\ncols 2\nrow 1\nrow 0 1\n").is_err());
    }

    #[test]
    fn coloring_roundtrip_fixed() {
        let alphabet = Alphabet::new(2, 0).unwrap();
        let text = "aa\t1\nab\t2\nba\t2\nbb\t1\n";
        let coloring = parse_coloring(text, &alphabet).unwrap();
        assert!(!coloring.is_cumulative());
        assert_eq!(render_coloring(&coloring, &alphabet), text);
        // missing cell
        assert!(parse_coloring("aa\t1\nab\t2\nba\t2\n", &alphabet).is_err());
    }

    #[test]
    fn coloring_cumulative_inferred() {
        let alphabet = Alphabet::new(2, 0).unwrap();
        let text = "a\t1\nb\t2\naa\t1\nab\t2\nba\t2\nbb\t1\n";
        let coloring = parse_coloring(text, &alphabet).unwrap();
        assert!(coloring.is_cumulative());
        assert_eq!(coloring.len(), 2);
    }

    #[test]
    fn bounds_file_overrides() {
        let b = parse_bounds("m-max 3\nhorizon 12\n", Bounds::default()).unwrap();
        assert_eq!(b.m_max, 3);
        assert_eq!(b.t_horizon, 12);
        assert_eq!(b.pool_len, Bounds::default().pool_len);
    }
}
