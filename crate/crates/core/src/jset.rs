//! Bounded J-set verification and witness search.
//!
//! A witness is a triple `(m, a, t)` with `a` an `(m+1)`-tuple of semigroup
//! elements and `t` a strictly increasing index tuple; it certifies that the
//! alternating products `a1 f(t1) a2 f(t2) ... am f(tm) a(m+1)` land in the
//! target set for every sequence `f` of the supplied family. Searches are
//! bounded and canonical-least under `(m, t, a)` lexicographic order; an
//! `exhausted` outcome is a bounded negative, never a proof that the target
//! is not a J-set.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::psg::{ElemId, PsgTruncation, PsgValue};
use crate::util::{Combinations, TupleOdometer};
use crate::words::{apply_hom, var_sym, Alphabet, HomSpec, HomValue, Sym, Word};
use crate::Bounds;

/// An element of the ambient semigroup: a word, a natural number under
/// addition, or a label from an explicit table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Nat(u64),
    Word(Word),
    Label(String),
}

impl Elem {
    /// Semigroup operation: addition for numbers, concatenation for words.
    pub fn combine(&self, other: &Elem) -> Result<Elem> {
        match (self, other) {
            (Elem::Nat(a), Elem::Nat(b)) => Ok(Elem::Nat(a + b)),
            (Elem::Word(a), Elem::Word(b)) => Ok(Elem::Word(a.concat(b))),
            _ => Err(Error::Domain("cannot combine elements of different kinds".into())),
        }
    }

    pub fn display(&self, alphabet: Option<&Alphabet>) -> String {
        match self {
            Elem::Nat(v) => v.to_string(),
            Elem::Word(w) => match alphabet {
                Some(a) => a.display_word(w),
                None => w.to_string(),
            },
            Elem::Label(l) => l.clone(),
        }
    }
}

impl Ord for Elem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        fn rank(e: &Elem) -> u8 {
            match e {
                Elem::Nat(_) => 0,
                Elem::Word(_) => 1,
                Elem::Label(_) => 2,
            }
        }
        match (self, other) {
            (Elem::Nat(a), Elem::Nat(b)) => a.cmp(b),
            (Elem::Word(a), Elem::Word(b)) => a.cmp(b),
            (Elem::Label(a), Elem::Label(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for Elem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Decidable membership description of a target set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredicateSpec {
    True,
    False,
    /// `|w| ≡ r (mod q)`
    LengthMod { q: u64, r: u64 },
    /// `|w|_sym ≡ r (mod q)`
    LetterCountMod { sym: Sym, q: u64, r: u64 },
    StartsWith(Word),
    EndsWith(Word),
    MemberOfWords(BTreeSet<Word>),
    MemberOfNats(BTreeSet<u64>),
    MemberOfLabels(BTreeSet<String>),
    /// `v ≡ r (mod q)` for numeric elements
    ValueMod { q: u64, r: u64 },
    /// `v` is a finite sum of distinct generators from the prefix
    InFsPrefix { gens: Vec<u64>, values: BTreeSet<u64> },
    And(Vec<PredicateSpec>),
    Or(Vec<PredicateSpec>),
    Not(Box<PredicateSpec>),
}

/// All nonempty-subset sums of a generator prefix.
pub fn fs_prefix_values(gens: &[u64]) -> Result<BTreeSet<u64>> {
    if gens.is_empty() {
        return Err(Error::InvalidInput("FS prefix needs at least one generator".into()));
    }
    if gens.len() > crate::psg::MAX_HORIZON {
        return Err(Error::SizeBound(format!(
            "FS prefix of length {} exceeds the cap of {}",
            gens.len(),
            crate::psg::MAX_HORIZON
        )));
    }
    let mut values = BTreeSet::new();
    for mask in 1u32..(1 << gens.len()) {
        let sum = gens
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &g)| g)
            .sum();
        values.insert(sum);
    }
    Ok(values)
}

impl PredicateSpec {
    /// FS-prefix predicate with precomputed value set.
    pub fn in_fs_prefix(gens: &[u64]) -> Result<Self> {
        Ok(PredicateSpec::InFsPrefix {
            gens: gens.to_vec(),
            values: fs_prefix_values(gens)?,
        })
    }

    pub fn eval(&self, e: &Elem) -> Result<bool> {
        match self {
            PredicateSpec::True => Ok(true),
            PredicateSpec::False => Ok(false),
            PredicateSpec::LengthMod { q, r } => match e {
                Elem::Word(w) => Ok((w.len() as u64) % q == *r),
                _ => Err(Error::Domain("length atom applied to a non-word".into())),
            },
            PredicateSpec::LetterCountMod { sym, q, r } => match e {
                Elem::Word(w) => Ok((w.sym_count(*sym) as u64) % q == *r),
                _ => Err(Error::Domain("letter-count atom applied to a non-word".into())),
            },
            PredicateSpec::StartsWith(u) => match e {
                Elem::Word(w) => Ok(w.syms().starts_with(u.syms())),
                _ => Err(Error::Domain("starts-with atom applied to a non-word".into())),
            },
            PredicateSpec::EndsWith(u) => match e {
                Elem::Word(w) => Ok(w.syms().ends_with(u.syms())),
                _ => Err(Error::Domain("ends-with atom applied to a non-word".into())),
            },
            PredicateSpec::MemberOfWords(set) => match e {
                Elem::Word(w) => Ok(set.contains(w)),
                _ => Err(Error::Domain("word membership applied to a non-word".into())),
            },
            PredicateSpec::MemberOfNats(set) => match e {
                Elem::Nat(v) => Ok(set.contains(v)),
                _ => Err(Error::Domain("numeric membership applied to a non-number".into())),
            },
            PredicateSpec::MemberOfLabels(set) => match e {
                Elem::Label(l) => Ok(set.contains(l)),
                _ => Err(Error::Domain("label membership applied to a non-label".into())),
            },
            PredicateSpec::ValueMod { q, r } => match e {
                Elem::Nat(v) => Ok(v % q == *r),
                _ => Err(Error::Domain("value atom applied to a non-number".into())),
            },
            PredicateSpec::InFsPrefix { values, .. } => match e {
                Elem::Nat(v) => Ok(values.contains(v)),
                _ => Err(Error::Domain("FS-prefix atom applied to a non-number".into())),
            },
            PredicateSpec::And(ps) => {
                for p in ps {
                    if !p.eval(e)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            PredicateSpec::Or(ps) => {
                for p in ps {
                    if p.eval(e)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            PredicateSpec::Not(p) => Ok(!p.eval(e)?),
        }
    }

    /// Canonical textual rendering (the format `textio::parse_predicate`
    /// accepts).
    pub fn describe(&self, alphabet: Option<&Alphabet>) -> String {
        let word = |w: &Word| match alphabet {
            Some(a) => a.display_word(w),
            None => w.to_string(),
        };
        match self {
            PredicateSpec::True => "(true)".into(),
            PredicateSpec::False => "(false)".into(),
            PredicateSpec::LengthMod { q, r } => format!("(length-mod {q} {r})"),
            PredicateSpec::LetterCountMod { sym, q, r } => {
                let c = alphabet
                    .and_then(|a| a.letter_char(*sym))
                    .unwrap_or('?');
                format!("(letter-count \"{c}\" {q} {r})")
            }
            PredicateSpec::StartsWith(u) => format!("(starts-with \"{}\")", word(u)),
            PredicateSpec::EndsWith(u) => format!("(ends-with \"{}\")", word(u)),
            PredicateSpec::MemberOfWords(set) => {
                let items: Vec<String> =
                    set.iter().map(|w| format!("\"{}\"", word(w))).collect();
                format!("(member-of {})", items.join(" "))
            }
            PredicateSpec::MemberOfNats(set) => {
                let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
                format!("(member-of {})", items.join(" "))
            }
            PredicateSpec::MemberOfLabels(set) => {
                let items: Vec<String> = set.iter().map(|l| format!("\"{l}\"")).collect();
                format!("(member-of {})", items.join(" "))
            }
            PredicateSpec::ValueMod { q, r } => format!("(value-mod {q} {r})"),
            PredicateSpec::InFsPrefix { gens, .. } => {
                let items: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
                format!("(in-fs-prefix {})", items.join(" "))
            }
            PredicateSpec::And(ps) => {
                let items: Vec<String> = ps.iter().map(|p| p.describe(alphabet)).collect();
                format!("(and {})", items.join(" "))
            }
            PredicateSpec::Or(ps) => {
                let items: Vec<String> = ps.iter().map(|p| p.describe(alphabet)).collect();
                format!("(or {})", items.join(" "))
            }
            PredicateSpec::Not(p) => format!("(not {})", p.describe(alphabet)),
        }
    }
}

/// A sequence in the ambient structure: an explicit finite prefix or a
/// closed-form generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    Explicit(Vec<Elem>),
    /// `f(t) = w^t`
    WordPower(Word),
    /// `f(t) = v_i^t`
    VarPower(usize),
    /// `f(t) = (v1 v2 .. vn)^t`
    BlockPower(usize),
    /// `f(t) = t` in `(ℕ, +)`
    NatId,
    /// `f(t) = c·t` in `(ℕ, +)`
    NatScale(u64),
    /// `ν ∘ f`, used when lifting witnesses through homomorphisms
    Composed {
        base: Box<SequenceSpec>,
        hom: HomSpec,
    },
}

impl SequenceSpec {
    /// Largest index this sequence can serve, or `None` when unbounded.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            SequenceSpec::Explicit(items) => Some(items.len()),
            SequenceSpec::Composed { base, .. } => base.horizon(),
            _ => None,
        }
    }

    pub fn eval(&self, alphabet: Option<&Alphabet>, t: usize) -> Result<Elem> {
        if t == 0 {
            return Err(Error::InvalidInput("sequence indices are 1-based".into()));
        }
        match self {
            SequenceSpec::Explicit(items) => {
                items.get(t - 1).cloned().ok_or(Error::HorizonExceeded {
                    needed: t,
                    available: items.len(),
                })
            }
            SequenceSpec::WordPower(w) => {
                let mut acc = Word::empty();
                for _ in 0..t {
                    acc = acc.concat(w);
                }
                Ok(Elem::Word(acc))
            }
            SequenceSpec::VarPower(i) => {
                Ok(Elem::Word(Word::from_syms(vec![var_sym(*i); t])))
            }
            SequenceSpec::BlockPower(n) => {
                let block: Vec<Sym> = (1..=*n).map(var_sym).collect();
                let mut syms = Vec::with_capacity(n * t);
                for _ in 0..t {
                    syms.extend_from_slice(&block);
                }
                Ok(Elem::Word(Word::from_syms(syms)))
            }
            SequenceSpec::NatId => Ok(Elem::Nat(t as u64)),
            SequenceSpec::NatScale(c) => Ok(Elem::Nat(c * t as u64)),
            SequenceSpec::Composed { base, hom } => {
                let alphabet = alphabet.ok_or_else(|| {
                    Error::InvalidInput("composed sequence needs an alphabet".into())
                })?;
                match base.eval(Some(alphabet), t)? {
                    Elem::Word(w) => match apply_hom(hom, alphabet, &w)? {
                        HomValue::Word(img) => Ok(Elem::Word(img)),
                        HomValue::Count(c) => Ok(Elem::Nat(c)),
                    },
                    _ => Err(Error::Domain("composed sequence over a non-word base".into())),
                }
            }
        }
    }

    pub fn describe(&self, alphabet: Option<&Alphabet>) -> String {
        match self {
            SequenceSpec::Explicit(items) => {
                let rendered: Vec<String> = items
                    .iter()
                    .map(|e| match e {
                        Elem::Nat(v) => v.to_string(),
                        other => format!("\"{}\"", other.display(alphabet)),
                    })
                    .collect();
                format!("(explicit {})", rendered.join(" "))
            }
            SequenceSpec::WordPower(w) => {
                let s = match alphabet {
                    Some(a) => a.display_word(w),
                    None => w.to_string(),
                };
                format!("(word-power \"{s}\")")
            }
            SequenceSpec::VarPower(i) => format!("(var-power {i})"),
            SequenceSpec::BlockPower(n) => format!("(block-power {n})"),
            SequenceSpec::NatId => "(nat-id)".into(),
            SequenceSpec::NatScale(c) => format!("(nat-scale {c})"),
            SequenceSpec::Composed { base, hom } => {
                let hom_desc = match alphabet {
                    Some(a) => hom.describe(a),
                    None => format!("{hom:?}"),
                };
                format!("(composed {} {})", hom_desc, base.describe(alphabet))
            }
        }
    }
}

/// Sequence in a partial-semigroup truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsgSequenceSpec {
    /// `f(t)` is the element with index set `{t}`
    FsSingleton,
    /// `f(t)` is the element with index set `{2t-1, 2t}`
    FsPair,
    /// explicit index sets per position
    ExplicitIndices(Vec<Vec<u32>>),
    /// explicit element labels per position (table truncations)
    ExplicitLabels(Vec<String>),
}

impl PsgSequenceSpec {
    pub fn eval(&self, trunc: &PsgTruncation, t: usize) -> Result<ElemId> {
        if let PsgSequenceSpec::ExplicitLabels(labels) = self {
            let label = labels.get(t - 1).ok_or(Error::HorizonExceeded {
                needed: t,
                available: labels.len(),
            })?;
            return trunc
                .elem_by_label(label)
                .ok_or_else(|| Error::InvalidInput(format!("no element labeled {label:?}")));
        }
        let horizon = trunc.horizon().ok_or_else(|| {
            Error::InvalidInput("index-set sequences need an index-set truncation".into())
        })?;
        let indices: Vec<u32> = match self {
            PsgSequenceSpec::FsSingleton => vec![t as u32],
            PsgSequenceSpec::FsPair => vec![2 * t as u32 - 1, 2 * t as u32],
            PsgSequenceSpec::ExplicitIndices(sets) => {
                sets.get(t - 1).cloned().ok_or(Error::HorizonExceeded {
                    needed: t,
                    available: sets.len(),
                })?
            }
            PsgSequenceSpec::ExplicitLabels(_) => unreachable!(),
        };
        if let Some(&max) = indices.iter().max() {
            if max as usize > horizon {
                return Err(Error::HorizonExceeded {
                    needed: max as usize,
                    available: horizon,
                });
            }
        }
        trunc
            .elem_by_indices(&indices)
            .ok_or_else(|| Error::InvalidInput(format!("no element with indices {indices:?}")))
    }

    pub fn describe(&self) -> String {
        match self {
            PsgSequenceSpec::FsSingleton => "(fs-singleton)".into(),
            PsgSequenceSpec::FsPair => "(fs-pair)".into(),
            PsgSequenceSpec::ExplicitIndices(sets) => {
                let rendered: Vec<String> = sets
                    .iter()
                    .map(|s| {
                        let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                        format!("({})", items.join(" "))
                    })
                    .collect();
                format!("(fs-explicit {})", rendered.join(" "))
            }
            PsgSequenceSpec::ExplicitLabels(labels) => {
                let rendered: Vec<String> =
                    labels.iter().map(|l| format!("\"{l}\"")).collect();
                format!("(labels {})", rendered.join(" "))
            }
        }
    }
}

/// A J-set witness record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub m: usize,
    /// strictly increasing 1-based indices, length `m`
    pub t: Vec<usize>,
    /// elements `a1..a(m+1)`
    pub a: Vec<Elem>,
}

impl Witness {
    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidInput("witness needs m >= 1".into()));
        }
        if self.t.len() != self.m || self.a.len() != self.m + 1 {
            return Err(Error::InvalidInput(format!(
                "witness shape mismatch: m={}, |t|={}, |a|={}",
                self.m,
                self.t.len(),
                self.a.len()
            )));
        }
        if self.t[0] == 0 || !self.t.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "witness t-tuple must be strictly increasing and positive".into(),
            ));
        }
        Ok(())
    }
}

/// Independent witness verifier. Recomputes every alternating product from
/// the sequence specs and evaluates the predicate; shares no code with the
/// search loop.
pub fn verify_witness(
    pred: &PredicateSpec,
    seqs: &[SequenceSpec],
    alphabet: Option<&Alphabet>,
    w: &Witness,
) -> Result<bool> {
    w.validate()?;
    for f in seqs {
        if let Some(h) = f.horizon() {
            if let Some(&needed) = w.t.iter().max() {
                if needed > h {
                    return Err(Error::HorizonExceeded {
                        needed,
                        available: h,
                    });
                }
            }
        }
        let mut acc = w.a[0].clone();
        for j in 0..w.m {
            acc = acc.combine(&f.eval(alphabet, w.t[j])?)?;
            acc = acc.combine(&w.a[j + 1])?;
        }
        if !pred.eval(&acc)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Product table attached to a found witness: one row per sequence.
#[derive(Debug, Clone)]
pub struct SeqProduct {
    pub seq: String,
    pub product: Elem,
    pub verdict: bool,
}

#[derive(Debug, Clone)]
pub struct FoundWitness {
    pub witness: Witness,
    pub per_seq: Vec<SeqProduct>,
    /// Canonical position: number of candidates preceding this one.
    pub candidates_preceding: u64,
}

#[derive(Debug, Clone)]
pub enum JsetOutcome {
    Found(Box<FoundWitness>),
    Exhausted { candidates_checked: u64 },
}

fn pool_tuple_count(pool: usize, m: usize) -> u64 {
    (pool as u64).saturating_pow(m as u32 + 1)
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Canonical-least bounded witness search over an explicit element pool.
///
/// Candidates are scanned in `(m, t, a)` lexicographic order with the pool
/// sorted into canonical element order first, so the result is independent
/// of pool permutation and of internal parallelism.
pub fn find_witness(
    pred: &PredicateSpec,
    seqs: &[SequenceSpec],
    alphabet: Option<&Alphabet>,
    pool: &[Elem],
    bounds: &Bounds,
) -> Result<JsetOutcome> {
    if bounds.m_max == 0 {
        return Err(Error::InvalidInput("m_max must be >= 1".into()));
    }
    let horizon = bounds.t_horizon;
    for f in seqs {
        if let Some(h) = f.horizon() {
            if h < horizon {
                return Err(Error::HorizonExceeded {
                    needed: horizon,
                    available: h,
                });
            }
        }
    }
    let mut pool: Vec<Elem> = pool.to_vec();
    pool.sort();
    pool.dedup();

    let total: u64 = (1..=bounds.m_max)
        .map(|m| binom(horizon as u64, m as u64).saturating_mul(pool_tuple_count(pool.len(), m)))
        .sum();
    if pool.is_empty() {
        return Ok(JsetOutcome::Exhausted {
            candidates_checked: 0,
        });
    }

    // precompute f(t) for every sequence and index
    let mut seq_vals: Vec<Vec<Elem>> = Vec::with_capacity(seqs.len());
    for f in seqs {
        let vals: Result<Vec<Elem>> = (1..=horizon).map(|t| f.eval(alphabet, t)).collect();
        seq_vals.push(vals?);
    }

    let mut preceding: u64 = 0;
    for m in 1..=bounds.m_max {
        let t_tuples = Combinations::collect_all(horizon, m);
        let per_tuple = pool_tuple_count(pool.len(), m);
        let hit = t_tuples
            .par_iter()
            .enumerate()
            .find_map_first(|(t_idx, picks)| {
                scan_a_tuples(pred, &seq_vals, &pool, picks, m)
                    .map(|(a_idx, a, products)| (t_idx, a_idx, a, products))
            });
        if let Some((t_idx, a_idx, a, per_seq)) = hit {
            let witness = Witness {
                m,
                t: t_tuples[t_idx].iter().map(|&i| i + 1).collect(),
                a,
            };
            let per_seq = per_seq
                .into_iter()
                .zip(seqs)
                .map(|((product, verdict), f)| SeqProduct {
                    seq: f.describe(alphabet),
                    product,
                    verdict,
                })
                .collect();
            return Ok(JsetOutcome::Found(Box::new(FoundWitness {
                witness,
                per_seq,
                candidates_preceding: preceding
                    + (t_idx as u64).saturating_mul(per_tuple)
                    + a_idx,
            })));
        }
        preceding += binom(horizon as u64, m as u64).saturating_mul(per_tuple);
    }
    let _ = preceding;
    Ok(JsetOutcome::Exhausted {
        candidates_checked: total,
    })
}

/// Scan all `(m+1)`-tuples over the pool in lexicographic order for the
/// given `t` picks; first passing tuple wins.
#[allow(clippy::type_complexity)]
fn scan_a_tuples(
    pred: &PredicateSpec,
    seq_vals: &[Vec<Elem>],
    pool: &[Elem],
    t_picks: &[usize],
    m: usize,
) -> Option<(u64, Vec<Elem>, Vec<(Elem, bool)>)> {
    let mut odo = TupleOdometer::new(pool.len(), m + 1);
    let mut a_idx: u64 = 0;
    while let Some(digits) = odo.next() {
        let mut per_seq: Vec<(Elem, bool)> = Vec::with_capacity(seq_vals.len().max(1));
        let mut all_ok = true;
        if seq_vals.is_empty() {
            // vacuous family: every candidate qualifies
        } else {
            for vals in seq_vals {
                let mut acc = pool[digits[0]].clone();
                let mut ok = true;
                for j in 0..m {
                    acc = match acc.combine(&vals[t_picks[j]]) {
                        Ok(v) => v,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    };
                    acc = match acc.combine(&pool[digits[j + 1]]) {
                        Ok(v) => v,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    };
                }
                let verdict = ok && pred.eval(&acc).unwrap_or(false);
                if ok {
                    per_seq.push((acc, verdict));
                } else {
                    per_seq.push((pool[digits[0]].clone(), false));
                }
                if !verdict {
                    all_ok = false;
                    break;
                }
            }
        }
        if all_ok {
            let a: Vec<Elem> = digits.iter().map(|&d| pool[d].clone()).collect();
            return Some((a_idx, a, per_seq));
        }
        a_idx += 1;
    }
    None
}

/// Witness search result inside a partial-semigroup truncation.
#[derive(Debug, Clone)]
pub struct FoundAdequateWitness {
    pub m: usize,
    pub t: Vec<usize>,
    pub a: Vec<ElemId>,
    /// per-sequence product element and verdict
    pub per_seq: Vec<(String, ElemId, bool)>,
    pub candidates_preceding: u64,
}

#[derive(Debug, Clone)]
pub enum AdequateOutcome {
    Found(FoundAdequateWitness),
    Exhausted { candidates_checked: u64 },
}

/// Canonical-least witness search in an adequate partial-semigroup
/// truncation: the alternating product must be defined at every step, land
/// in the predicate's set, and lie in `sigma(L)`. Candidates with undefined
/// partial products are skipped, not errors. An empty `L` imposes no sigma
/// constraint.
pub fn find_witness_adequate(
    pred: &PredicateSpec,
    seqs: &[PsgSequenceSpec],
    l_set: &[ElemId],
    trunc: &PsgTruncation,
    pool: &[ElemId],
    bounds: &Bounds,
) -> Result<AdequateOutcome> {
    if bounds.m_max == 0 {
        return Err(Error::InvalidInput("m_max must be >= 1".into()));
    }
    let horizon = bounds.t_horizon;

    // precompute sequence values; horizon violations surface here
    let mut seq_vals: Vec<Vec<ElemId>> = Vec::with_capacity(seqs.len());
    for f in seqs {
        let vals: Result<Vec<ElemId>> = (1..=horizon).map(|t| f.eval(trunc, t)).collect();
        seq_vals.push(vals?);
    }

    // precondition: supplied sequences are adequate at the working horizon
    if horizon >= 2 {
        for (f, vals) in seqs.iter().zip(&seq_vals) {
            let rep = trunc.check_adequate_sequence(vals, l_set)?;
            if !rep.products_defined {
                return Err(Error::InvalidInput(format!(
                    "sequence {} is not adequate at horizon {horizon}: product undefined at H={:?}",
                    f.describe(),
                    rep.failing_h
                )));
            }
        }
    }

    let sigma_l: Option<Vec<bool>> = if l_set.is_empty() {
        None
    } else {
        let sigma = trunc.sigma(l_set)?;
        let mut mem = vec![false; trunc.len()];
        for e in sigma {
            mem[e] = true;
        }
        Some(mem)
    };

    let mut pool: Vec<ElemId> = pool.to_vec();
    pool.sort_unstable();
    pool.dedup();
    let total: u64 = (1..=bounds.m_max)
        .map(|m| binom(horizon as u64, m as u64).saturating_mul(pool_tuple_count(pool.len(), m)))
        .sum();
    if pool.is_empty() {
        return Ok(AdequateOutcome::Exhausted {
            candidates_checked: 0,
        });
    }

    let eval_ok = |e: ElemId| -> bool {
        if let Some(mem) = &sigma_l {
            if !mem[e] {
                return false;
            }
        }
        let elem = match trunc.value(e) {
            PsgValue::Nat(v) => Elem::Nat(v),
            PsgValue::Word(w) => Elem::Word(w),
            PsgValue::Label(l) => Elem::Label(l),
        };
        pred.eval(&elem).unwrap_or(false)
    };

    let mut preceding: u64 = 0;
    for m in 1..=bounds.m_max {
        let t_tuples = Combinations::collect_all(horizon, m);
        let per_tuple = pool_tuple_count(pool.len(), m);
        let hit = t_tuples
            .par_iter()
            .enumerate()
            .find_map_first(|(t_idx, picks)| {
                let mut odo = TupleOdometer::new(pool.len(), m + 1);
                let mut a_idx: u64 = 0;
                while let Some(digits) = odo.next() {
                    let mut per_seq = Vec::with_capacity(seq_vals.len());
                    let mut all_ok = true;
                    for vals in &seq_vals {
                        let mut acc = Some(pool[digits[0]]);
                        for j in 0..m {
                            acc = acc.and_then(|p| trunc.op(p, vals[picks[j]]));
                            acc = acc.and_then(|p| trunc.op(p, pool[digits[j + 1]]));
                        }
                        match acc {
                            Some(p) if eval_ok(p) => per_seq.push(p),
                            _ => {
                                all_ok = false;
                                break;
                            }
                        }
                    }
                    if all_ok {
                        // an empty family is vacuous: least candidate wins
                        return Some((t_idx, a_idx, digits.to_vec(), per_seq));
                    }
                    a_idx += 1;
                }
                None
            });
        if let Some((t_idx, a_idx, digits, per_seq)) = hit {
            let per_seq = per_seq
                .into_iter()
                .zip(seqs)
                .map(|(p, f)| (f.describe(), p, true))
                .collect();
            return Ok(AdequateOutcome::Found(FoundAdequateWitness {
                m,
                t: t_tuples[t_idx].iter().map(|&i| i + 1).collect(),
                a: digits.iter().map(|&d| pool[d]).collect(),
                per_seq,
                candidates_preceding: preceding
                    + (t_idx as u64).saturating_mul(per_tuple)
                    + a_idx,
            }));
        }
        preceding += binom(horizon as u64, m as u64).saturating_mul(per_tuple);
    }
    Ok(AdequateOutcome::Exhausted {
        candidates_checked: total,
    })
}

/// Certificate that `S0` fails the bounded J-set condition in `Sn ∪ S0`
/// against the probe sequence `f(t) = v1^t`.
#[derive(Debug, Clone)]
pub struct Refutation {
    pub n: usize,
    pub pool_size: usize,
    pub candidates_checked: u64,
    pub passing: u64,
    pub structural_tag: &'static str,
}

/// Exhaustively confirm that no bounded candidate lands the alternating
/// product in `S0`: every product absorbs at least one `v1` from the probe
/// sequence, and variable occurrence is concatenation-monotone.
pub fn refute_s0_jset(alphabet: &Alphabet, n: usize, bounds: &Bounds) -> Result<Refutation> {
    if n == 0 || n > alphabet.nvars() {
        return Err(Error::InvalidInput(format!(
            "refutation needs 1 <= n <= {}",
            alphabet.nvars()
        )));
    }
    let pool = alphabet.t_words_upto(n, bounds.pool_len);
    let probe = SequenceSpec::VarPower(1);
    let horizon = bounds.t_horizon;
    let mut checked: u64 = 0;
    let mut passing: u64 = 0;
    for m in 1..=bounds.m_max {
        let mut combo = Combinations::new(horizon, m);
        while let Some(picks) = combo.next() {
            let t: Vec<usize> = picks.iter().map(|&i| i + 1).collect();
            let mut odo = TupleOdometer::new(pool.len(), m + 1);
            while let Some(digits) = odo.next() {
                checked += 1;
                let mut acc = pool[digits[0]].clone();
                for j in 0..m {
                    let Elem::Word(ft) = probe.eval(Some(alphabet), t[j])? else {
                        unreachable!()
                    };
                    acc = acc.concat(&ft);
                    acc = acc.concat(&pool[digits[j + 1]]);
                }
                if acc.in_s0() {
                    passing += 1;
                }
            }
        }
    }
    Ok(Refutation {
        n,
        pool_size: pool.len(),
        candidates_checked: checked,
        passing,
        structural_tag: "variable-occurrence is concatenation-monotone",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even_value() -> PredicateSpec {
        PredicateSpec::ValueMod { q: 2, r: 0 }
    }

    fn even_length() -> PredicateSpec {
        PredicateSpec::LengthMod { q: 2, r: 0 }
    }

    fn bounds(m_max: usize, horizon: usize) -> Bounds {
        Bounds {
            m_max,
            t_horizon: horizon,
            ..Bounds::default()
        }
    }

    #[test]
    fn verify_witness_examples() {
        let nat_id = vec![SequenceSpec::NatId];
        let w = Witness {
            m: 1,
            t: vec![2],
            a: vec![Elem::Nat(1), Elem::Nat(1)],
        };
        assert!(verify_witness(&even_value(), &nat_id, None, &w).unwrap());
        let w = Witness {
            m: 1,
            t: vec![1],
            a: vec![Elem::Nat(1), Elem::Nat(1)],
        };
        assert!(!verify_witness(&even_value(), &nat_id, None, &w).unwrap());
        assert!(verify_witness(&PredicateSpec::True, &nat_id, None, &w).unwrap());
    }

    #[test]
    fn verify_witness_rejects_malformed() {
        let seqs = vec![SequenceSpec::NatId];
        // non-increasing t
        let w = Witness {
            m: 2,
            t: vec![2, 2],
            a: vec![Elem::Nat(1), Elem::Nat(1), Elem::Nat(1)],
        };
        assert!(verify_witness(&even_value(), &seqs, None, &w).is_err());
        // horizon violation on an explicit sequence
        let seqs = vec![SequenceSpec::Explicit(vec![Elem::Nat(1)])];
        let w = Witness {
            m: 1,
            t: vec![3],
            a: vec![Elem::Nat(1), Elem::Nat(1)],
        };
        assert!(verify_witness(&even_value(), &seqs, None, &w).is_err());
    }

    #[test]
    fn find_witness_word_example() {
        // oracle-derived canonical least: at t=(1) the pair ("a","aa")
        // yields "a"+"a"+"aa" of length 4
        let alphabet = Alphabet::new(2, 0).unwrap();
        let pool: Vec<Elem> = alphabet
            .s0_words_upto(2)
            .into_iter()
            .map(Elem::Word)
            .collect();
        let seqs = vec![SequenceSpec::WordPower(alphabet.parse_word("a").unwrap())];
        let out = find_witness(&even_length(), &seqs, Some(&alphabet), &pool, &bounds(2, 4))
            .unwrap();
        let JsetOutcome::Found(found) = out else {
            panic!("expected a witness");
        };
        assert_eq!(found.witness.m, 1);
        assert_eq!(found.witness.t, vec![1]);
        assert_eq!(
            found.witness.a,
            vec![
                Elem::Word(alphabet.parse_word("a").unwrap()),
                Elem::Word(alphabet.parse_word("aa").unwrap())
            ]
        );
        assert!(verify_witness(&even_length(), &seqs, Some(&alphabet), &found.witness).unwrap());
    }

    #[test]
    fn find_witness_nat_two_sequences() {
        // oracle-derived: t=(1) forces contradictory parities, t=(2) works
        // with a=(1,1)
        let pool: Vec<Elem> = (1..=4).map(Elem::Nat).collect();
        let seqs = vec![SequenceSpec::NatId, SequenceSpec::NatScale(2)];
        let out = find_witness(&even_value(), &seqs, None, &pool, &bounds(2, 4)).unwrap();
        let JsetOutcome::Found(found) = out else {
            panic!("expected a witness");
        };
        assert_eq!(found.witness.m, 1);
        assert_eq!(found.witness.t, vec![2]);
        assert_eq!(found.witness.a, vec![Elem::Nat(1), Elem::Nat(1)]);
        for row in &found.per_seq {
            assert!(row.verdict);
        }
    }

    #[test]
    fn find_witness_false_predicate_exhausts() {
        let pool: Vec<Elem> = (1..=3).map(Elem::Nat).collect();
        let seqs = vec![SequenceSpec::NatId];
        let out =
            find_witness(&PredicateSpec::False, &seqs, None, &pool, &bounds(2, 3)).unwrap();
        let JsetOutcome::Exhausted { candidates_checked } = out else {
            panic!("expected exhaustion");
        };
        // m=1: C(3,1)*3^2 = 27; m=2: C(3,2)*3^3 = 81
        assert_eq!(candidates_checked, 108);
    }

    #[test]
    fn find_witness_empty_family_returns_least_candidate() {
        let pool = vec![Elem::Nat(2), Elem::Nat(1)];
        let out = find_witness(&even_value(), &[], None, &pool, &bounds(2, 3)).unwrap();
        let JsetOutcome::Found(found) = out else {
            panic!("expected a witness");
        };
        assert_eq!(found.witness.m, 1);
        assert_eq!(found.witness.t, vec![1]);
        assert_eq!(found.witness.a, vec![Elem::Nat(1), Elem::Nat(1)]);
        assert_eq!(found.candidates_preceding, 0);
    }

    #[test]
    fn find_witness_is_pool_order_independent() {
        let alphabet = Alphabet::new(2, 0).unwrap();
        let mut pool: Vec<Elem> = alphabet
            .s0_words_upto(2)
            .into_iter()
            .map(Elem::Word)
            .collect();
        let seqs = vec![SequenceSpec::WordPower(alphabet.parse_word("ab").unwrap())];
        let b = bounds(2, 4);
        let first = find_witness(&even_length(), &seqs, Some(&alphabet), &pool, &b).unwrap();
        pool.reverse();
        let second = find_witness(&even_length(), &seqs, Some(&alphabet), &pool, &b).unwrap();
        match (first, second) {
            (JsetOutcome::Found(x), JsetOutcome::Found(y)) => {
                assert_eq!(x.witness, y.witness);
                assert_eq!(x.candidates_preceding, y.candidates_preceding);
            }
            _ => panic!("both runs should find a witness"),
        }
    }

    #[test]
    fn adequate_witness_example() {
        let trunc = PsgTruncation::fs_prefix_nat(&[1, 2, 4, 8, 16, 32]).unwrap();
        let l = vec![trunc.elem_by_indices(&[1]).unwrap()];
        let pool: Vec<ElemId> = (0..trunc.len()).collect();
        let out = find_witness_adequate(
            &PredicateSpec::True,
            &[PsgSequenceSpec::FsSingleton],
            &l,
            &trunc,
            &pool,
            &bounds(1, 6),
        )
        .unwrap();
        let AdequateOutcome::Found(found) = out else {
            panic!("expected a witness");
        };
        assert_eq!(found.m, 1);
        assert_eq!(found.t, vec![2]);
        assert_eq!(
            found.a,
            vec![
                trunc.elem_by_indices(&[3]).unwrap(),
                trunc.elem_by_indices(&[4]).unwrap()
            ]
        );
        let product = found.per_seq[0].1;
        assert_eq!(trunc.indices_of(product).unwrap(), vec![2, 3, 4]);
    }

    #[test]
    fn adequate_witness_empty_sigma_exhausts() {
        let trunc = PsgTruncation::fs_prefix_nat(&[1, 2, 4, 8, 16, 32]).unwrap();
        let l = vec![trunc.elem_by_indices(&[1, 2, 3, 4, 5, 6]).unwrap()];
        let pool: Vec<ElemId> = (0..trunc.len()).collect();
        let out = find_witness_adequate(
            &PredicateSpec::True,
            &[PsgSequenceSpec::FsSingleton],
            &l,
            &trunc,
            &pool,
            &bounds(1, 4),
        )
        .unwrap();
        assert!(matches!(out, AdequateOutcome::Exhausted { .. }));
    }

    #[test]
    fn adequate_witness_even_sum() {
        let trunc = PsgTruncation::fs_prefix_nat(&[1, 2, 4, 8, 16, 32]).unwrap();
        let l = vec![trunc.elem_by_indices(&[1]).unwrap()];
        let pool: Vec<ElemId> = (0..trunc.len()).collect();
        let out = find_witness_adequate(
            &even_value(),
            &[PsgSequenceSpec::FsSingleton],
            &l,
            &trunc,
            &pool,
            &bounds(2, 6),
        )
        .unwrap();
        let AdequateOutcome::Found(found) = out else {
            panic!("expected a witness");
        };
        let product = found.per_seq[0].1;
        let PsgValue::Nat(v) = trunc.value(product) else {
            panic!()
        };
        assert_eq!(v % 2, 0);
        assert!(!trunc.indices_of(product).unwrap().contains(&1));
    }

    #[test]
    fn refutation_finds_no_passing_candidate() {
        let alphabet = Alphabet::new(2, 2).unwrap();
        let r = refute_s0_jset(&alphabet, 1, &bounds(2, 3)).unwrap();
        assert_eq!(r.passing, 0);
        assert!(r.candidates_checked > 0);
        let r2 = refute_s0_jset(&alphabet, 2, &bounds(2, 3)).unwrap();
        assert_eq!(r2.passing, 0);
        // empty pool: degenerate refutation
        let tiny = Alphabet::new(2, 2).unwrap();
        let b = Bounds {
            pool_len: 0,
            ..bounds(2, 3)
        };
        let r3 = refute_s0_jset(&tiny, 1, &b).unwrap();
        assert_eq!(r3.candidates_checked, 0);
        assert_eq!(r3.passing, 0);
    }

    #[test]
    fn fs_prefix_values_enumerates_sums() {
        let vals = fs_prefix_values(&[1, 3, 9]).unwrap();
        assert_eq!(
            vals.into_iter().collect::<Vec<_>>(),
            vec![1, 3, 4, 9, 10, 12, 13]
        );
    }

    #[test]
    fn predicate_eval_and_describe() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let p = PredicateSpec::And(vec![
            PredicateSpec::LengthMod { q: 2, r: 0 },
            PredicateSpec::StartsWith(alphabet.parse_word("a").unwrap()),
        ]);
        let w = |s: &str| Elem::Word(alphabet.parse_word(s).unwrap());
        assert!(p.eval(&w("ab")).unwrap());
        assert!(!p.eval(&w("ba")).unwrap());
        assert!(!p.eval(&w("a")).unwrap());
        assert_eq!(
            p.describe(Some(&alphabet)),
            "(and (length-mod 2 0) (starts-with \"a\"))"
        );
        // kind mismatch errors
        assert!(p.eval(&Elem::Nat(4)).is_err());
    }
}
