//! Witness-producing procedures built on the J-set machinery: lifting
//! witnesses through identity-on-`S0` homomorphisms, constrained
//! variable-word existence searches, and the inductive C-set product
//! sequence construction.
//!
//! All searches return the canonically least result under length-then-lex
//! word order, and every found object carries the verification rows a
//! certificate needs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jset::{
    find_witness, Elem, FoundWitness, JsetOutcome, PredicateSpec, SequenceSpec,
    Witness,
};
use crate::psg::{PsgTruncation, PsgValue};
use crate::util::{Combinations, TupleOdometer};
use crate::words::{
    apply_hom, check_hom_properties, var_sym, Alphabet, HomSpec, HomValue, Sym, Word,
};
use crate::Bounds;

/// Shift rule of a C-set structure: for `x ∈ D_n`, the depth `m` with
/// `D_m ⊆ x^{-1} D_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRule {
    /// `m = n`: the level absorbs its own elements (e.g. even-length words).
    Same,
    /// constant target depth
    Const(usize),
}

/// Combinatorial C-set description: a decreasing chain `D_1 ⊇ .. ⊇ D_depth`
/// of J-set candidates plus a shift rule. Nesting and shift containment are
/// verified lazily on the elements a construction actually touches.
#[derive(Debug, Clone)]
pub struct CSetStructure {
    levels: Vec<PredicateSpec>,
    shift: ShiftRule,
}

impl CSetStructure {
    pub fn new(levels: Vec<PredicateSpec>, shift: ShiftRule) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("C-set structure needs depth >= 1".into()));
        }
        Ok(CSetStructure { levels, shift })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// 1-based level predicate.
    pub fn level(&self, n: usize) -> Result<&PredicateSpec> {
        self.levels
            .get(n - 1)
            .ok_or_else(|| Error::InvalidInput(format!("no level {n}")))
    }

    pub fn shift_rule(&self) -> ShiftRule {
        self.shift
    }

    /// Shift target for `x ∈ D_n`; errors on rule gaps, naming the pair.
    pub fn shift(&self, n: usize, x: &Elem, alphabet: Option<&Alphabet>) -> Result<usize> {
        if !self.level(n)?.eval(x)? {
            return Err(Error::InvalidInput(format!(
                "shift queried outside D_{n} at {}",
                x.display(alphabet)
            )));
        }
        let target = match self.shift {
            ShiftRule::Same => n,
            ShiftRule::Const(m) => m,
        };
        if target == 0 || target > self.depth() {
            return Err(Error::ShiftGap {
                depth: n,
                element: x.display(alphabet),
            });
        }
        Ok(target)
    }

    /// Verify the decreasing-chain property on one touched element: if it
    /// lies in a level, it must lie in every shallower level.
    pub fn check_nesting(&self, x: &Elem, alphabet: Option<&Alphabet>) -> Result<()> {
        for j in (2..=self.depth()).rev() {
            if self.level(j)?.eval(x)? && !self.level(j - 1)?.eval(x)? {
                return Err(Error::Certificate(format!(
                    "nesting violated: {} lies in D_{j} but not D_{}",
                    x.display(alphabet),
                    j - 1
                )));
            }
        }
        Ok(())
    }
}

/// A `k x m` matrix over the naturals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSpec {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u64>>,
}

impl MatrixSpec {
    pub fn new(rows: usize, cols: usize, entries: Vec<Vec<u64>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix needs positive dimensions".into()));
        }
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput(format!(
                "matrix body does not match {rows}x{cols}"
            )));
        }
        Ok(MatrixSpec {
            rows,
            cols,
            entries,
        })
    }

    /// Route one: matrix-vector product via iterator zips.
    pub fn mat_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::InvalidInput("vector arity mismatch".into()));
        }
        Ok(self
            .entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    /// Route two: per-row dot products with explicit index accumulation.
    pub fn row_dot(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::InvalidInput("vector arity mismatch".into()));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc += self.entries[i][j] * v[j];
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Reject predicates that cannot evaluate on word elements, so search loops
/// can treat evaluation as infallible.
fn validate_word_predicate(pred: &PredicateSpec) -> Result<()> {
    match pred {
        PredicateSpec::ValueMod { .. }
        | PredicateSpec::InFsPrefix { .. }
        | PredicateSpec::MemberOfNats(_)
        | PredicateSpec::MemberOfLabels(_) => Err(Error::InvalidInput(
            "numeric predicate atom in a word-semigroup search".into(),
        )),
        PredicateSpec::And(ps) | PredicateSpec::Or(ps) => {
            ps.iter().try_for_each(validate_word_predicate)
        }
        PredicateSpec::Not(p) => validate_word_predicate(p),
        _ => Ok(()),
    }
}

fn word_elem(w: &Word) -> Elem {
    Elem::Word(w.clone())
}

// Scan Sn words of one length by base-(k+n) rank; digit < k is a letter,
// digit k+j encodes v_{j+1}. Rank order equals canonical lex order.
fn rank_to_word(mut rank: u64, base: u64, len: usize, k: usize) -> Word {
    let mut syms = vec![0 as Sym; len];
    for slot in (0..len).rev() {
        let d = (rank % base) as usize;
        rank /= base;
        syms[slot] = if d < k {
            d as Sym
        } else {
            var_sym(d - k + 1)
        };
    }
    Word::from_syms(syms)
}

/// Canonically least `Sn` word up to `max_len` accepted by the filter,
/// together with the count of `Sn` words scanned up to and including the
/// hit (or all of them when exhausted).
fn find_least_sn_word<F>(
    alphabet: &Alphabet,
    n: usize,
    max_len: usize,
    accept: F,
) -> Result<(Option<Word>, u64)>
where
    F: Fn(&Word) -> bool + Sync,
{
    let k = alphabet.k();
    let base = (k + n) as u64;
    let mut scanned: u64 = 0;
    for len in 1..=max_len {
        let total: u64 = base.pow(len as u32);
        let hit = (0..total).into_par_iter().find_first(|&rank| {
            let w = rank_to_word(rank, base, len, k);
            w.in_sn(n) && accept(&w)
        });
        match hit {
            Some(rank) => {
                let preceding: u64 = (0..=rank)
                    .into_par_iter()
                    .filter(|&r| rank_to_word(r, base, len, k).in_sn(n))
                    .count() as u64;
                return Ok((Some(rank_to_word(rank, base, len, k)), scanned + preceding));
            }
            None => {
                scanned += (0..total)
                    .into_par_iter()
                    .filter(|&r| rank_to_word(r, base, len, k).in_sn(n))
                    .count() as u64;
            }
        }
    }
    Ok((None, scanned))
}

/// Hom validation shared by the lifting operations: homomorphism law plus
/// identity on `S0`, exhaustively at the given bound.
fn require_identity_homs(
    homs: &[HomSpec],
    alphabet: &Alphabet,
    check_bound: usize,
) -> Result<()> {
    if homs.is_empty() {
        return Err(Error::InvalidInput("need at least one homomorphism".into()));
    }
    for h in homs {
        if !h.is_word_valued() {
            return Err(Error::InvalidInput(format!(
                "{} does not map into the word semigroup",
                h.describe(alphabet)
            )));
        }
        let report = check_hom_properties(h, alphabet, check_bound);
        if !report.is_homomorphism
            || report.identity_on_s0 != Some(true)
            || report.s0_preserving != Some(true)
        {
            return Err(Error::InvalidInput(format!(
                "{} fails the lifting preconditions: {}",
                h.describe(alphabet),
                report
                    .counterexample
                    .unwrap_or_else(|| "see hom report".into())
            )));
        }
    }
    Ok(())
}

/// One `(sequence, homomorphism)` verification row of a lifted witness.
#[derive(Debug, Clone)]
pub struct PairCheck {
    pub seq: String,
    pub hom: String,
    /// alternating product assembled in `T`
    pub product: Word,
    /// its image under the homomorphism
    pub image: Word,
    pub verdict: bool,
}

#[derive(Debug, Clone)]
pub struct Lemma1Found {
    /// witness tuple, valid in `T` and equal to the inner `S0` witness
    pub witness: Witness,
    /// the inner search result over the composed family `G`
    pub inner: FoundWitness,
    pub pair_checks: Vec<PairCheck>,
}

#[derive(Debug, Clone)]
pub enum Lemma1Outcome {
    Found(Box<Lemma1Found>),
    Exhausted {
        g_family: Vec<String>,
        candidates_checked: u64,
    },
}

/// Lift a J-set witness through a family of identity-on-`S0` homomorphisms:
/// build the composed family `G = {ν ∘ f}`, search for an `S0` witness of
/// `D` against `G`, and return the same `(m, a, t)` as a witness for
/// `⋂ ν^{-1}[D]` in `T = Sn ∪ S0`. Every `(f, ν)` pair is re-verified by
/// assembling the product in `T` first and applying `ν` to the whole word.
pub fn lemma1_lift(
    alphabet: &Alphabet,
    n: usize,
    family_e: &[SequenceSpec],
    homs_f: &[HomSpec],
    pred_d: &PredicateSpec,
    bounds: &Bounds,
    hom_check_bound: usize,
) -> Result<Lemma1Outcome> {
    if family_e.is_empty() {
        return Err(Error::InvalidInput("the family E must be nonempty".into()));
    }
    validate_word_predicate(pred_d)?;
    require_identity_homs(homs_f, alphabet, hom_check_bound)?;
    for h in homs_f {
        if h.substitution_arity().is_some_and(|a| a != n) {
            return Err(Error::InvalidInput(format!(
                "{} has arity incompatible with n={n}",
                h.describe(alphabet)
            )));
        }
    }

    let g_family: Vec<SequenceSpec> = family_e
        .iter()
        .flat_map(|f| {
            homs_f.iter().map(move |nu| SequenceSpec::Composed {
                base: Box::new(f.clone()),
                hom: nu.clone(),
            })
        })
        .collect();
    let pool: Vec<Elem> = alphabet
        .s0_words_upto(bounds.pool_len)
        .into_iter()
        .map(Elem::Word)
        .collect();

    match find_witness(pred_d, &g_family, Some(alphabet), &pool, bounds)? {
        JsetOutcome::Exhausted { candidates_checked } => Ok(Lemma1Outcome::Exhausted {
            g_family: g_family
                .iter()
                .map(|g| g.describe(Some(alphabet)))
                .collect(),
            candidates_checked,
        }),
        JsetOutcome::Found(inner) => {
            let witness = inner.witness.clone();
            let mut pair_checks = Vec::new();
            for f in family_e {
                for nu in homs_f {
                    // assemble the product in T, then map once
                    let mut product = match &witness.a[0] {
                        Elem::Word(w) => w.clone(),
                        _ => unreachable!("word pool"),
                    };
                    for j in 0..witness.m {
                        let Elem::Word(ft) = f.eval(Some(alphabet), witness.t[j])? else {
                            return Err(Error::Domain(
                                "lifting family must produce words".into(),
                            ));
                        };
                        product = product.concat(&ft);
                        let Elem::Word(aj) = &witness.a[j + 1] else {
                            unreachable!("word pool")
                        };
                        product = product.concat(aj);
                    }
                    let HomValue::Word(image) = apply_hom(nu, alphabet, &product)? else {
                        unreachable!("word-valued hom")
                    };
                    let verdict = pred_d.eval(&word_elem(&image))?;
                    pair_checks.push(PairCheck {
                        seq: f.describe(Some(alphabet)),
                        hom: nu.describe(alphabet),
                        product,
                        image,
                        verdict,
                    });
                }
            }
            if pair_checks.iter().any(|p| !p.verdict) {
                return Err(Error::Certificate(
                    "lifted witness failed post-verification".into(),
                ));
            }
            Ok(Lemma1Outcome::Found(Box::new(Lemma1Found {
                witness,
                inner: *inner,
                pair_checks,
            })))
        }
    }
}

/// Instance verification row for variable-word searches.
#[derive(Debug, Clone)]
pub struct InstanceCheck {
    /// substitution tuple rendered as a length-`n` word
    pub tuple: Word,
    pub instance: Word,
    pub verdict: bool,
}

fn instance_rows(
    alphabet: &Alphabet,
    w: &Word,
    n: usize,
    pred: &PredicateSpec,
) -> Result<Vec<InstanceCheck>> {
    let letters = alphabet.letter_syms();
    let mut rows = Vec::new();
    let mut odo = TupleOdometer::new(letters.len(), n);
    while let Some(digits) = odo.next() {
        let x: Vec<Sym> = digits.iter().map(|&d| letters[d]).collect();
        let instance = w.substitute(alphabet, &x)?;
        let verdict = pred.eval(&word_elem(&instance))?;
        rows.push(InstanceCheck {
            tuple: Word::from_syms(x),
            instance,
            verdict,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct Thm3Found {
    pub word: Word,
    pub instances: Vec<InstanceCheck>,
    pub words_scanned: u64,
    /// canonical word found by the lifting route, when it was run
    pub lift_word: Option<Word>,
    pub routes_agree: Option<bool>,
}

#[derive(Debug, Clone)]
pub enum Thm3Outcome {
    Found(Box<Thm3Found>),
    Exhausted { words_scanned: u64 },
}

/// Direct-enumeration route: canonically least `w ∈ Sn` whose `k^n`
/// substitution instances all satisfy the predicate.
pub fn theorem3_direct(
    pred: &PredicateSpec,
    n: usize,
    alphabet: &Alphabet,
    bounds: &Bounds,
) -> Result<(Option<Word>, u64)> {
    validate_word_predicate(pred)?;
    if n == 0 || n > alphabet.nvars() {
        return Err(Error::InvalidInput(format!(
            "need 1 <= n <= {}",
            alphabet.nvars()
        )));
    }
    let letters = alphabet.letter_syms();
    find_least_sn_word(alphabet, n, bounds.word_len, |w| {
        let mut odo = TupleOdometer::new(letters.len(), n);
        while let Some(digits) = odo.next() {
            let x: Vec<Sym> = digits.iter().map(|&d| letters[d]).collect();
            let instance = w.substitute(alphabet, &x).expect("w is in Sn");
            if !pred.eval(&word_elem(&instance)).expect("validated predicate") {
                return false;
            }
        }
        true
    })
}

/// Lifting route: enumerate every bounded witness against the block-probe
/// family `E = {t -> (v1..vn)^t}` and the full substitution family
/// `{h_x : x ∈ A^n}`, assemble each passing witness's product in `T`, and
/// return the canonically least product within the word-length budget.
///
/// The pool is `S0` extended by the empty word, realizing padding-free
/// products; candidates are scanned exhaustively since product order and
/// witness order disagree.
pub fn theorem3_via_lift(
    pred: &PredicateSpec,
    n: usize,
    alphabet: &Alphabet,
    bounds: &Bounds,
) -> Result<Option<Word>> {
    validate_word_predicate(pred)?;
    let probe = SequenceSpec::BlockPower(n);
    let letters = alphabet.letter_syms();
    let mut subst_tuples: Vec<Vec<Sym>> = Vec::new();
    let mut odo = TupleOdometer::new(letters.len(), n);
    while let Some(digits) = odo.next() {
        subst_tuples.push(digits.iter().map(|&d| letters[d]).collect());
    }

    let mut pool: Vec<Word> = vec![Word::empty()];
    pool.extend(alphabet.s0_words_upto(bounds.pool_len));
    pool.sort();

    let horizon = bounds.t_horizon;
    let mut best: Option<Word> = None;
    for m in 1..=bounds.m_max {
        let mut t_combo = Combinations::new(horizon, m);
        while let Some(picks) = t_combo.next() {
            let t: Vec<usize> = picks.iter().map(|&i| i + 1).collect();
            let blocks: Result<Vec<Word>> = t
                .iter()
                .map(|&tj| match probe.eval(Some(alphabet), tj)? {
                    Elem::Word(w) => Ok(w),
                    _ => unreachable!(),
                })
                .collect();
            let blocks = blocks?;
            let mut a_odo = TupleOdometer::new(pool.len(), m + 1);
            while let Some(digits) = a_odo.next() {
                let mut product = pool[digits[0]].clone();
                for j in 0..m {
                    product = product.concat(&blocks[j]);
                    product = product.concat(&pool[digits[j + 1]]);
                }
                if product.len() > bounds.word_len {
                    continue;
                }
                if let Some(b) = &best {
                    if *b <= product {
                        continue;
                    }
                }
                let qualifies = subst_tuples.iter().all(|x| {
                    let instance = product.substitute(alphabet, x).expect("product is in Sn");
                    pred.eval(&word_elem(&instance)).expect("validated predicate")
                });
                if qualifies {
                    best = Some(product);
                }
            }
        }
    }
    Ok(best)
}

/// Multivariable constrained existence: least `w ∈ Sn` with every instance
/// in `D`. Runs the direct route as the authoritative answer; when
/// `with_lift_route` is set the lifting route runs too and the certificate
/// records whether the two canonical words agree.
pub fn theorem3_find(
    pred: &PredicateSpec,
    n: usize,
    alphabet: &Alphabet,
    bounds: &Bounds,
    with_lift_route: bool,
) -> Result<Thm3Outcome> {
    let (direct, words_scanned) = theorem3_direct(pred, n, alphabet, bounds)?;
    match direct {
        None => Ok(Thm3Outcome::Exhausted { words_scanned }),
        Some(word) => {
            let instances = instance_rows(alphabet, &word, n, pred)?;
            let (lift_word, routes_agree) = if with_lift_route {
                let lifted = theorem3_via_lift(pred, n, alphabet, bounds)?;
                let agree = lifted.as_ref() == Some(&word);
                (lifted, Some(agree))
            } else {
                (None, None)
            };
            Ok(Thm3Outcome::Found(Box::new(Thm3Found {
                word,
                instances,
                words_scanned,
                lift_word,
                routes_agree,
            })))
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fs1Found {
    pub word: Word,
    pub tau: u64,
    /// 1-based indices into the user's generator sequence witnessing
    /// `tau ∈ FS(x)`
    pub fs_indices: Vec<u32>,
    pub instances: Vec<InstanceCheck>,
    pub words_scanned: u64,
}

#[derive(Debug, Clone)]
pub enum Fs1Outcome {
    Found(Box<Fs1Found>),
    Exhausted { words_scanned: u64 },
}

/// Single-variable theorem with an FS constraint on the variable count:
/// least `w ∈ S1` with all instances in `D` and `|w|_{v1} ∈ FS(x-prefix)`.
///
/// Internally works over the zero-padded prefix `y = (0, x1, .., xT)`, the
/// padding that adjoins `S0` to the constrained structure; the returned
/// index witness never uses the padding slot.
pub fn fs_constrained_find(
    pred: &PredicateSpec,
    x: &[u64],
    alphabet: &Alphabet,
    bounds: &Bounds,
) -> Result<Fs1Outcome> {
    validate_word_predicate(pred)?;
    if x.is_empty() {
        return Err(Error::InvalidInput("FS constraint needs a generator prefix".into()));
    }
    let mut padded = vec![0u64];
    padded.extend_from_slice(x);
    let trunc = PsgTruncation::fs_prefix_nat(&padded)?;
    // least FS(x) element (pad index excluded) per attainable tau value
    let witness_for = |tau: u64| -> Option<Vec<u32>> {
        (0..trunc.len()).find_map(|e| {
            let indices = trunc.indices_of(e).unwrap();
            if indices.contains(&1) {
                return None;
            }
            match trunc.value(e) {
                PsgValue::Nat(v) if v == tau => {
                    Some(indices.iter().map(|&i| i - 1).collect())
                }
                _ => None,
            }
        })
    };

    let letters = alphabet.letter_syms();
    let (word, words_scanned) = find_least_sn_word(alphabet, 1, bounds.word_len, |w| {
        if witness_for(w.var_count(1) as u64).is_none() {
            return false;
        }
        letters.iter().all(|&l| {
            let instance = w.substitute(alphabet, &[l]).expect("w is in S1");
            pred.eval(&word_elem(&instance)).expect("validated predicate")
        })
    })?;
    match word {
        None => Ok(Fs1Outcome::Exhausted { words_scanned }),
        Some(word) => {
            let tau = word.var_count(1) as u64;
            let fs_indices = witness_for(tau).expect("accepted word has a witness");
            let instances = instance_rows(alphabet, &word, 1, pred)?;
            Ok(Fs1Outcome::Found(Box::new(Fs1Found {
                word,
                tau,
                fs_indices,
                instances,
                words_scanned,
            })))
        }
    }
}

#[derive(Debug, Clone)]
pub struct Thm16Found {
    pub word: Word,
    pub extract: Word,
    /// 1-based indices into the pattern sequence witnessing FP membership
    pub fp_indices: Vec<u32>,
    pub instances: Vec<InstanceCheck>,
    pub words_scanned: u64,
}

#[derive(Debug, Clone)]
pub enum Thm16Outcome {
    Found(Box<Thm16Found>),
    Exhausted { words_scanned: u64 },
}

/// Pattern-constrained existence: least `w ∈ Sn` with all instances in `D`
/// and the `v1..vk` pattern extraction lying in the FP prefix of the given
/// pattern words.
pub fn theorem16_find(
    pred: &PredicateSpec,
    n: usize,
    kvars: usize,
    pattern_seq: &[Word],
    alphabet: &Alphabet,
    bounds: &Bounds,
) -> Result<Thm16Outcome> {
    validate_word_predicate(pred)?;
    if kvars == 0 || kvars >= n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k < n, got k={kvars}, n={n}"
        )));
    }
    for y in pattern_seq {
        let pure_vars = y
            .syms()
            .iter()
            .all(|&s| matches!(crate::words::var_index(s), Some(i) if i <= kvars));
        if !pure_vars || !y.in_sn(kvars) {
            return Err(Error::InvalidInput(format!(
                "pattern word {} must use exactly the variables v1..v{kvars}",
                alphabet.display_word(y)
            )));
        }
    }
    let trunc = PsgTruncation::fp_prefix_word(pattern_seq)?;
    let extract_witness = |extract: &Word| -> Option<Vec<u32>> {
        (0..trunc.len()).find_map(|e| match trunc.value(e) {
            PsgValue::Word(w) if w == *extract => Some(trunc.indices_of(e).unwrap()),
            _ => None,
        })
    };

    let letters = alphabet.letter_syms();
    let (word, words_scanned) = find_least_sn_word(alphabet, n, bounds.word_len, |w| {
        if extract_witness(&w.extract_upto(kvars)).is_none() {
            return false;
        }
        let mut odo = TupleOdometer::new(letters.len(), n);
        while let Some(digits) = odo.next() {
            let x: Vec<Sym> = digits.iter().map(|&d| letters[d]).collect();
            let instance = w.substitute(alphabet, &x).expect("w is in Sn");
            if !pred.eval(&word_elem(&instance)).expect("validated predicate") {
                return false;
            }
        }
        true
    })?;
    match word {
        None => Ok(Thm16Outcome::Exhausted { words_scanned }),
        Some(word) => {
            let extract = word.pattern_extract(n, kvars)?;
            let fp_indices = extract_witness(&extract).expect("accepted word has a witness");
            let instances = instance_rows(alphabet, &word, n, pred)?;
            Ok(Thm16Outcome::Found(Box::new(Thm16Found {
                word,
                extract,
                fp_indices,
                instances,
                words_scanned,
            })))
        }
    }
}

#[derive(Debug, Clone)]
pub struct Thm17Found {
    pub word: Word,
    /// `psi(w) = (tau_1(w), .., tau_m(w))`
    pub psi: Vec<u64>,
    /// `M psi(w)`, computed by two independent routes and compared
    pub m_psi: Vec<u64>,
    /// per-coordinate FS index witnesses (1-based into each prefix)
    pub coord_witnesses: Vec<Vec<u32>>,
    /// per-homomorphism membership rows
    pub hom_checks: Vec<(String, Word, bool)>,
    pub words_scanned: u64,
}

#[derive(Debug, Clone)]
pub enum Thm17Outcome {
    Found(Box<Thm17Found>),
    Exhausted { words_scanned: u64 },
}

/// Matrix-constrained existence: least `w ∈ Sn` with `ν(w) ∈ D` for every
/// `S0`-preserving `ν ∈ F` and `M psi(w)` coordinatewise inside the given
/// FS prefixes, where `psi` stacks `S0`-independent counting homomorphisms
/// (variable-occurrence counters by default).
#[allow(clippy::too_many_arguments)]
pub fn theorem17_find(
    pred: &PredicateSpec,
    homs_f: &[HomSpec],
    matrix: &MatrixSpec,
    taus: &[HomSpec],
    fs_prefixes: &[Vec<u64>],
    n: usize,
    alphabet: &Alphabet,
    bounds: &Bounds,
    hom_check_bound: usize,
) -> Result<Thm17Outcome> {
    validate_word_predicate(pred)?;
    if taus.len() != matrix.cols {
        return Err(Error::InvalidInput(format!(
            "matrix has {} columns but {} tau homomorphisms",
            matrix.cols,
            taus.len()
        )));
    }
    if fs_prefixes.len() != matrix.rows {
        return Err(Error::InvalidInput(format!(
            "matrix has {} rows but {} FS prefixes",
            matrix.rows,
            fs_prefixes.len()
        )));
    }
    require_identity_homs(homs_f, alphabet, hom_check_bound)?;
    for tau in taus {
        if tau.is_word_valued() {
            return Err(Error::InvalidInput(format!(
                "{} does not map into (ω, +)",
                tau.describe(alphabet)
            )));
        }
        let report = check_hom_properties(tau, alphabet, hom_check_bound);
        if !report.is_homomorphism || !report.s0_independent {
            return Err(Error::InvalidInput(format!(
                "{} is not an S0-independent homomorphism",
                tau.describe(alphabet)
            )));
        }
    }

    let truncs: Result<Vec<PsgTruncation>> = fs_prefixes
        .iter()
        .map(|gens| PsgTruncation::fs_prefix_nat(gens))
        .collect();
    let truncs = truncs?;
    let coord_witness = |trunc: &PsgTruncation, target: u64| -> Option<Vec<u32>> {
        (0..trunc.len()).find_map(|e| match trunc.value(e) {
            PsgValue::Nat(v) if v == target => Some(trunc.indices_of(e).unwrap()),
            _ => None,
        })
    };

    let psi_of = |w: &Word| -> Vec<u64> {
        taus.iter()
            .map(|tau| {
                apply_hom(tau, alphabet, w)
                    .ok()
                    .and_then(|v| v.as_count())
                    .expect("count-valued tau")
            })
            .collect()
    };

    let (word, words_scanned) = find_least_sn_word(alphabet, n, bounds.word_len, |w| {
        let psi = psi_of(w);
        let image = matrix.mat_vec(&psi).expect("arity checked");
        if image
            .iter()
            .zip(&truncs)
            .any(|(&coord, trunc)| coord_witness(trunc, coord).is_none())
        {
            return false;
        }
        homs_f.iter().all(|nu| {
            match apply_hom(nu, alphabet, w) {
                Ok(HomValue::Word(img)) => {
                    pred.eval(&word_elem(&img)).expect("validated predicate")
                }
                _ => false,
            }
        })
    })?;

    match word {
        None => Ok(Thm17Outcome::Exhausted { words_scanned }),
        Some(word) => {
            let psi = psi_of(&word);
            let route_one = matrix.mat_vec(&psi)?;
            let route_two = matrix.row_dot(&psi)?;
            if route_one != route_two {
                return Err(Error::Certificate(
                    "matrix product routes disagree".into(),
                ));
            }
            let coord_witnesses: Vec<Vec<u32>> = route_one
                .iter()
                .zip(&truncs)
                .map(|(&coord, trunc)| coord_witness(trunc, coord).expect("accepted word"))
                .collect();
            let mut hom_checks = Vec::new();
            for nu in homs_f {
                let HomValue::Word(img) = apply_hom(nu, alphabet, &word)? else {
                    unreachable!("word-valued hom")
                };
                let verdict = pred.eval(&word_elem(&img))?;
                hom_checks.push((nu.describe(alphabet), img, verdict));
            }
            Ok(Thm17Outcome::Found(Box::new(Thm17Found {
                word,
                psi,
                m_psi: route_one,
                coord_witnesses,
                hom_checks,
                words_scanned,
            })))
        }
    }
}

/// One row of the C-set product verification table.
#[derive(Debug, Clone)]
pub struct ProductCheck {
    /// 1-based index set `H`
    pub h: Vec<usize>,
    /// chosen homomorphism per position, by index into `F`
    pub phi: Vec<usize>,
    pub product: Word,
    pub verdict: bool,
}

#[derive(Debug, Clone)]
pub struct CsetStep {
    pub index: usize,
    pub word: Word,
    /// depth the word was drawn from
    pub target_depth: usize,
}

#[derive(Debug, Clone)]
pub struct CsetOutcome {
    pub words: Vec<Word>,
    pub steps: Vec<CsetStep>,
    pub table: Vec<ProductCheck>,
    pub complete: bool,
    pub failure: Option<String>,
}

/// Inductive C-set product sequence: choose `w1` from `⋂ ν^{-1}[D_1]`, and
/// at each later step form the product set `E` over the words so far,
/// shift every element of `E` through the structure's rule, draw the next
/// word from the deepest level demanded, and finally brute-force the whole
/// `(H, φ)` product table against `D_1`.
pub fn cset_sequence(
    cs: &CSetStructure,
    homs_f: &[HomSpec],
    len: usize,
    n: usize,
    alphabet: &Alphabet,
    bounds: &Bounds,
    hom_check_bound: usize,
) -> Result<CsetOutcome> {
    if len == 0 {
        return Err(Error::InvalidInput("sequence length must be >= 1".into()));
    }
    if len > 16 {
        return Err(Error::SizeBound("sequence length capped at 16".into()));
    }
    for level in 1..=cs.depth() {
        validate_word_predicate(cs.level(level)?)?;
    }
    require_identity_homs(homs_f, alphabet, hom_check_bound)?;

    let apply = |nu: &HomSpec, w: &Word| -> Result<Word> {
        match apply_hom(nu, alphabet, w)? {
            HomValue::Word(img) => Ok(img),
            HomValue::Count(_) => unreachable!("word-valued hom"),
        }
    };

    // least Sn word whose every image lies in the target level
    let draw = |target: usize| -> Result<Option<Word>> {
        let pred = cs.level(target)?;
        let (word, _) = find_least_sn_word(alphabet, n, bounds.word_len, |w| {
            homs_f.iter().all(|nu| match apply_hom(nu, alphabet, w) {
                Ok(HomValue::Word(img)) => {
                    pred.eval(&word_elem(&img)).unwrap_or(false)
                }
                _ => false,
            })
        })?;
        Ok(word)
    };

    let mut words: Vec<Word> = Vec::new();
    let mut steps: Vec<CsetStep> = Vec::new();
    let mut failure: Option<String> = None;

    'build: for step in 1..=len {
        let target = if step == 1 {
            1
        } else {
            // E = all (H, φ) products over the words so far
            let m = words.len();
            let mut deepest = 1usize;
            for h_mask in 1u32..(1 << m) {
                let positions: Vec<usize> =
                    (0..m).filter(|i| h_mask & (1 << i) != 0).collect();
                let mut phi_odo = TupleOdometer::new(homs_f.len(), positions.len());
                while let Some(phi) = phi_odo.next() {
                    let mut product = Word::empty();
                    for (slot, &pos) in positions.iter().enumerate() {
                        product = product.concat(&apply(&homs_f[phi[slot]], &words[pos])?);
                    }
                    let y = word_elem(&product);
                    if !cs.level(1)?.eval(&y)? {
                        failure = Some(format!(
                            "induction broke: a product left D_1 before step {step}"
                        ));
                        break 'build;
                    }
                    cs.check_nesting(&y, Some(alphabet))?;
                    let m_y = cs.shift(1, &y, Some(alphabet))?;
                    deepest = deepest.max(m_y);
                }
            }
            deepest
        };
        match draw(target)? {
            Some(w) => {
                // sampled shift containment: the new word's images lie in
                // every level above its target
                for nu in homs_f {
                    let img = word_elem(&apply(nu, &w)?);
                    for level in 1..=target {
                        if !cs.level(level)?.eval(&img)? {
                            return Err(Error::Certificate(format!(
                                "draw from D_{target} escaped D_{level}"
                            )));
                        }
                    }
                }
                steps.push(CsetStep {
                    index: step,
                    word: w.clone(),
                    target_depth: target,
                });
                words.push(w);
            }
            None => {
                failure = Some(format!(
                    "step {step} exhausted: no word of S{n} within length {} lands every image in D_{target}",
                    bounds.word_len
                ));
                break 'build;
            }
        }
    }

    // full product table over whatever prefix was built
    let m = words.len();
    let mut table = Vec::new();
    let mut all_ok = true;
    for h_mask in 1u32..(1 << m) {
        let positions: Vec<usize> = (0..m).filter(|i| h_mask & (1 << i) != 0).collect();
        let mut phi_odo = TupleOdometer::new(homs_f.len(), positions.len());
        while let Some(phi) = phi_odo.next() {
            let mut product = Word::empty();
            for (slot, &pos) in positions.iter().enumerate() {
                product = product.concat(&apply(&homs_f[phi[slot]], &words[pos])?);
            }
            let verdict = cs.level(1)?.eval(&word_elem(&product))?;
            all_ok &= verdict;
            table.push(ProductCheck {
                h: positions.iter().map(|&p| p + 1).collect(),
                phi: phi.to_vec(),
                product,
                verdict,
            });
        }
    }

    let complete = failure.is_none() && words.len() == len && all_ok;
    if failure.is_none() && !all_ok {
        failure = Some("a product in the final table left D_1".into());
    }
    Ok(CsetOutcome {
        words,
        steps,
        table,
        complete,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even_length() -> PredicateSpec {
        PredicateSpec::LengthMod { q: 2, r: 0 }
    }

    fn small_bounds() -> Bounds {
        Bounds {
            m_max: 2,
            t_horizon: 4,
            pool_len: 2,
            word_len: 6,
            threads: 0,
        }
    }

    fn subst_homs(alphabet: &Alphabet, n: usize) -> Vec<HomSpec> {
        let letters = alphabet.letter_syms();
        let mut homs = Vec::new();
        let mut odo = TupleOdometer::new(letters.len(), n);
        while let Some(digits) = odo.next() {
            homs.push(HomSpec::Substitution(
                digits.iter().map(|&d| letters[d]).collect(),
            ));
        }
        homs
    }

    #[test]
    fn lemma1_lift_even_length() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let family = vec![SequenceSpec::WordPower(alphabet.parse_word("a#1").unwrap())];
        let homs = subst_homs(&alphabet, 1);
        let out = lemma1_lift(
            &alphabet,
            1,
            &family,
            &homs,
            &even_length(),
            &small_bounds(),
            3,
        )
        .unwrap();
        let Lemma1Outcome::Found(found) = out else {
            panic!("expected a lifted witness");
        };
        // the outer tuple is exactly the inner witness
        assert_eq!(found.witness, found.inner.witness);
        assert!(found.pair_checks.iter().all(|p| p.verdict));
        // every image is even-length and the product lives in T
        for row in &found.pair_checks {
            assert_eq!(row.image.len() % 2, 0);
            assert!(row.product.in_sn(1) || row.product.in_s0());
        }
    }

    #[test]
    fn lemma1_identity_family_reduces_to_find_witness() {
        // single substitution hom over a 1-letter alphabet is the identity
        // on S0 and forces nothing new
        let alphabet = Alphabet::new(2, 1).unwrap();
        let family = vec![SequenceSpec::WordPower(alphabet.parse_word("a").unwrap())];
        let homs = vec![HomSpec::Substitution(vec![0])];
        let out = lemma1_lift(
            &alphabet,
            1,
            &family,
            &homs,
            &even_length(),
            &small_bounds(),
            3,
        )
        .unwrap();
        let Lemma1Outcome::Found(found) = out else {
            panic!("expected a witness");
        };
        // the base family is already in S0, so the composed family equals it
        let direct = find_witness(
            &even_length(),
            &family,
            Some(&alphabet),
            &alphabet
                .s0_words_upto(2)
                .into_iter()
                .map(Elem::Word)
                .collect::<Vec<_>>(),
            &small_bounds(),
        )
        .unwrap();
        let JsetOutcome::Found(inner) = direct else {
            panic!()
        };
        assert_eq!(found.witness, inner.witness);
    }

    #[test]
    fn lemma1_true_predicate_finds_least_candidate() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let family = vec![SequenceSpec::VarPower(1)];
        let homs = subst_homs(&alphabet, 1);
        let out = lemma1_lift(
            &alphabet,
            1,
            &family,
            &homs,
            &PredicateSpec::True,
            &small_bounds(),
            3,
        )
        .unwrap();
        let Lemma1Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(found.witness.m, 1);
        assert_eq!(found.witness.t, vec![1]);
        assert_eq!(
            found.witness.a,
            vec![
                Elem::Word(alphabet.parse_word("a").unwrap()),
                Elem::Word(alphabet.parse_word("a").unwrap())
            ]
        );
    }

    #[test]
    fn theorem3_even_length_two_variables() {
        let alphabet = Alphabet::new(2, 2).unwrap();
        let out = theorem3_find(&even_length(), 2, &alphabet, &small_bounds(), true).unwrap();
        let Thm3Outcome::Found(found) = out else {
            panic!("expected a word");
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#2");
        assert_eq!(found.instances.len(), 4);
        assert!(found.instances.iter().all(|i| i.verdict));
        assert_eq!(found.routes_agree, Some(true));
        assert_eq!(found.lift_word, Some(found.word.clone()));
    }

    #[test]
    fn theorem3_starts_with_a() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let pred = PredicateSpec::StartsWith(alphabet.parse_word("a").unwrap());
        let out = theorem3_find(&pred, 1, &alphabet, &small_bounds(), true).unwrap();
        let Thm3Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "a#1");
        assert_eq!(found.routes_agree, Some(true));
    }

    #[test]
    fn theorem3_true_predicate_least_variable_word() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let out =
            theorem3_find(&PredicateSpec::True, 1, &alphabet, &small_bounds(), true).unwrap();
        let Thm3Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1");
        assert_eq!(found.routes_agree, Some(true));
    }

    #[test]
    fn theorem3_exhausts_on_false() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let bounds = Bounds {
            word_len: 3,
            ..small_bounds()
        };
        let out = theorem3_find(&PredicateSpec::False, 1, &alphabet, &bounds, false).unwrap();
        let Thm3Outcome::Exhausted { words_scanned } = out else {
            panic!()
        };
        // S1 words over 2 letters up to length 3: 1 + 5 + 19
        assert_eq!(words_scanned, 25);
    }

    #[test]
    fn fs_constrained_examples() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let out =
            fs_constrained_find(&PredicateSpec::True, &[2], &alphabet, &small_bounds()).unwrap();
        let Fs1Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#1");
        assert_eq!(found.tau, 2);
        assert_eq!(found.fs_indices, vec![1]);

        let out = fs_constrained_find(&even_length(), &[2, 4], &alphabet, &small_bounds())
            .unwrap();
        let Fs1Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#1");
        assert!([2u64, 4, 6].contains(&found.tau));

        // "contains b": count not divisible by a modulus beyond the cap
        let pred = PredicateSpec::Not(Box::new(PredicateSpec::LetterCountMod {
            sym: alphabet.letter_sym('b').unwrap(),
            q: 64,
            r: 0,
        }));
        let out = fs_constrained_find(&pred, &[1], &alphabet, &small_bounds()).unwrap();
        let Fs1Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "b#1");
        assert!(found.instances.iter().all(|i| i.verdict));
    }

    #[test]
    fn theorem16_examples() {
        let alphabet = Alphabet::new(2, 2).unwrap();
        let v1 = alphabet.parse_word("#1").unwrap();
        let out = theorem16_find(
            &PredicateSpec::True,
            2,
            1,
            &[v1.clone()],
            &alphabet,
            &small_bounds(),
        )
        .unwrap();
        let Thm16Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#2");
        assert_eq!(alphabet.display_word(&found.extract), "#1");
        assert_eq!(found.fp_indices, vec![1]);

        let v1v1 = alphabet.parse_word("#1#1").unwrap();
        let out = theorem16_find(
            &PredicateSpec::True,
            2,
            1,
            &[v1v1],
            &alphabet,
            &small_bounds(),
        )
        .unwrap();
        let Thm16Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#1#2");

        let out = theorem16_find(&even_length(), 2, 1, &[v1], &alphabet, &small_bounds())
            .unwrap();
        let Thm16Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#2");

        // k >= n rejected
        assert!(theorem16_find(
            &PredicateSpec::True,
            2,
            2,
            &[alphabet.parse_word("#1#2").unwrap()],
            &alphabet,
            &small_bounds()
        )
        .is_err());
    }

    #[test]
    fn theorem17_examples() {
        let alphabet = Alphabet::new(2, 2).unwrap();
        let identity = MatrixSpec::new(2, 2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let taus = vec![HomSpec::VarCount(1), HomSpec::VarCount(2)];
        let homs = vec![HomSpec::Substitution(vec![0, 0])];
        let out = theorem17_find(
            &PredicateSpec::True,
            &homs,
            &identity,
            &taus,
            &[vec![1, 3, 9], vec![1, 3, 9]],
            2,
            &alphabet,
            &small_bounds(),
            3,
        )
        .unwrap();
        let Thm17Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#2");
        assert_eq!(found.psi, vec![1, 1]);
        assert_eq!(found.m_psi, vec![1, 1]);
        assert_eq!(found.coord_witnesses, vec![vec![1], vec![1]]);

        // zero matrix with positive generators: image is constantly zero
        let zero = MatrixSpec::new(1, 1, vec![vec![0]]).unwrap();
        let out = theorem17_find(
            &PredicateSpec::True,
            &subst_homs(&alphabet, 1),
            &zero,
            &[HomSpec::VarCount(1)],
            &[vec![4]],
            1,
            &alphabet,
            &Bounds {
                word_len: 3,
                ..small_bounds()
            },
            3,
        )
        .unwrap();
        assert!(matches!(out, Thm17Outcome::Exhausted { .. }));

        // doubling matrix
        let twice = MatrixSpec::new(1, 1, vec![vec![2]]).unwrap();
        let out = theorem17_find(
            &PredicateSpec::True,
            &subst_homs(&alphabet, 1),
            &twice,
            &[HomSpec::VarCount(1)],
            &[vec![4]],
            1,
            &alphabet,
            &small_bounds(),
            3,
        )
        .unwrap();
        let Thm17Outcome::Found(found) = out else {
            panic!()
        };
        assert_eq!(alphabet.display_word(&found.word), "#1#1");
        assert_eq!(found.m_psi, vec![4]);
    }

    #[test]
    fn theorem17_rejects_dependent_tau() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let identity = MatrixSpec::new(1, 1, vec![vec![1]]).unwrap();
        // a word-valued hom cannot serve as a counting component
        let out = theorem17_find(
            &PredicateSpec::True,
            &subst_homs(&alphabet, 1),
            &identity,
            &[HomSpec::PatternExtract(1)],
            &[vec![1]],
            1,
            &alphabet,
            &small_bounds(),
            3,
        );
        assert!(out.is_err());
    }

    #[test]
    fn cset_sequence_trivial_structure() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let cs = CSetStructure::new(vec![PredicateSpec::True], ShiftRule::Same).unwrap();
        let homs = subst_homs(&alphabet, 1);
        let out = cset_sequence(&cs, &homs, 3, 1, &alphabet, &small_bounds(), 3).unwrap();
        assert!(out.complete);
        assert_eq!(out.words.len(), 3);
        assert!(out.words.iter().all(|w| w.in_sn(1)));
        // all 26 products: sum over j of C(3,j) * 2^j
        assert_eq!(out.table.len(), 26);
        assert!(out.table.iter().all(|row| row.verdict));
    }

    #[test]
    fn cset_sequence_even_length_structure() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let cs = CSetStructure::new(
            vec![even_length(), even_length()],
            ShiftRule::Same,
        )
        .unwrap();
        let homs = vec![HomSpec::Substitution(vec![0])];
        let out = cset_sequence(&cs, &homs, 2, 1, &alphabet, &small_bounds(), 3).unwrap();
        assert!(out.complete);
        for w in &out.words {
            assert_eq!(w.len() % 2, 0);
            assert!(w.in_sn(1));
        }
        for row in &out.table {
            assert_eq!(row.product.len() % 2, 0);
            assert!(row.verdict);
        }
    }

    #[test]
    fn cset_sequence_empty_level_fails_at_step_one() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let cs = CSetStructure::new(vec![PredicateSpec::False], ShiftRule::Same).unwrap();
        let homs = subst_homs(&alphabet, 1);
        let out = cset_sequence(&cs, &homs, 2, 1, &alphabet, &small_bounds(), 3).unwrap();
        assert!(!out.complete);
        assert!(out.words.is_empty());
        assert!(out.failure.unwrap().contains("step 1"));
    }

    #[test]
    fn cset_shift_gap_is_loud() {
        let alphabet = Alphabet::new(2, 1).unwrap();
        let cs = CSetStructure::new(vec![PredicateSpec::True], ShiftRule::Const(5)).unwrap();
        let homs = subst_homs(&alphabet, 1);
        let out = cset_sequence(&cs, &homs, 2, 1, &alphabet, &small_bounds(), 3);
        assert!(matches!(out, Err(Error::ShiftGap { .. })));
    }

    #[test]
    fn matrix_routes_agree() {
        let m = MatrixSpec::new(2, 3, vec![vec![1, 2, 3], vec![0, 1, 0]]).unwrap();
        let v = vec![5, 7, 11];
        assert_eq!(m.mat_vec(&v).unwrap(), m.row_dot(&v).unwrap());
        assert_eq!(m.mat_vec(&v).unwrap(), vec![52, 7]);
    }
}
