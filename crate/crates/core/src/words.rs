//! Word algebra over a finite alphabet with variables.
//!
//! Words are finite symbol strings over `k` letters plus a reserved band of
//! variables `v1..vn`. The sets tracked throughout the crate:
//!
//! * `S0` — nonempty words containing no variable,
//! * `Sn` — words in which every one of `v1..vn` occurs at least once.
//!
//! The empty word exists as a value but belongs to neither set. Canonical
//! word order is length-then-lexicographic with variables sorting after
//! letters; every search in this crate reports its least result under that
//! order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Symbol code: letters occupy `0..k`, variables a fixed band starting at
/// [`VAR_BASE`]. Alphabets are capped at 255 letters so the bands never
/// collide.
pub type Sym = u16;

/// First symbol code reserved for variables; `v_i` is `VAR_BASE + i - 1`.
pub const VAR_BASE: Sym = 256;

/// Symbol code of the variable `v_i` (1-based).
pub fn var_sym(i: usize) -> Sym {
    debug_assert!(i >= 1);
    VAR_BASE + (i as Sym) - 1
}

/// Is this symbol a variable, and if so which (1-based)?
pub fn var_index(s: Sym) -> Option<usize> {
    if s >= VAR_BASE {
        Some((s - VAR_BASE) as usize + 1)
    } else {
        None
    }
}

const LETTER_POOL: &str = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Default cap on word length for constructed input words.
pub const DEFAULT_MAX_WORD_LEN: usize = 16;

/// A finite alphabet together with the number of admissible variables and a
/// construction-time length cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<char>,
    nvars: usize,
    max_word_len: usize,
}

impl Alphabet {
    /// Alphabet with `k` letters drawn from `a..z, A..Z` and `nvars` variables.
    pub fn new(k: usize, nvars: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidAlphabet("alphabet must be nonempty".into()));
        }
        if k > LETTER_POOL.len() {
            return Err(Error::InvalidAlphabet(format!(
                "auto-named alphabets support at most {} letters, got {k}",
                LETTER_POOL.len()
            )));
        }
        Self::with_letters(&LETTER_POOL.chars().take(k).collect::<Vec<_>>(), nvars)
    }

    /// Alphabet over explicit letters.
    pub fn with_letters(letters: &[char], nvars: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet must be nonempty".into()));
        }
        if letters.len() > 255 {
            return Err(Error::InvalidAlphabet(format!(
                "at most 255 letters supported, got {}",
                letters.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &c in letters {
            if c == '#' {
                return Err(Error::InvalidAlphabet(
                    "'#' is reserved for variable notation".into(),
                ));
            }
            if !seen.insert(c) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter '{c}'")));
            }
        }
        Ok(Alphabet {
            letters: letters.to_vec(),
            nvars,
            max_word_len: DEFAULT_MAX_WORD_LEN,
        })
    }

    pub fn k(&self) -> usize {
        self.letters.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    pub fn set_max_word_len(&mut self, cap: usize) {
        self.max_word_len = cap;
    }

    /// Symbol code of a letter character.
    pub fn letter_sym(&self, c: char) -> Option<Sym> {
        self.letters.iter().position(|&l| l == c).map(|i| i as Sym)
    }

    /// Letter character of a symbol code.
    pub fn letter_char(&self, s: Sym) -> Option<char> {
        self.letters.get(s as usize).copied()
    }

    /// All letter symbol codes in order.
    pub fn letter_syms(&self) -> Vec<Sym> {
        (0..self.letters.len() as Sym).collect()
    }

    /// Parse the textual form: letters verbatim, `#i` for `v_i`; the empty
    /// string is the empty word. Enforces the length cap and the variable
    /// band.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut syms = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c == '#' {
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                if digits.is_empty() {
                    return Err(Error::InvalidWord(format!("'#' without index in {s:?}")));
                }
                let i: usize = digits
                    .parse()
                    .map_err(|_| Error::InvalidWord(format!("bad variable index in {s:?}")))?;
                if i == 0 || i > self.nvars {
                    return Err(Error::InvalidWord(format!(
                        "variable #{i} outside 1..={} in {s:?}",
                        self.nvars
                    )));
                }
                syms.push(var_sym(i));
            } else {
                let sym = self.letter_sym(c).ok_or_else(|| {
                    Error::InvalidWord(format!("'{c}' is not a letter of the alphabet"))
                })?;
                syms.push(sym);
            }
        }
        if syms.len() > self.max_word_len {
            return Err(Error::WordLengthCap {
                len: syms.len(),
                cap: self.max_word_len,
            });
        }
        Ok(Word::from_syms(syms))
    }

    /// Textual form of a word under this alphabet's letter table.
    pub fn display_word(&self, w: &Word) -> String {
        let mut out = String::new();
        for &s in w.syms() {
            match var_index(s) {
                Some(i) => {
                    out.push('#');
                    out.push_str(&i.to_string());
                }
                None => out.push(self.letter_char(s).unwrap_or('?')),
            }
        }
        out
    }

    /// All words of exactly `len` over the letters plus variables `v1..vn`,
    /// in lexicographic symbol order (letters before variables).
    pub fn words_of_len(&self, nvars: usize, len: usize) -> WordIter {
        let mut syms = self.letter_syms();
        for i in 1..=nvars {
            syms.push(var_sym(i));
        }
        WordIter::new(syms, len)
    }

    /// Nonempty variable-free words up to `max_len`, canonical order.
    pub fn s0_words_upto(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            out.extend(self.words_of_len(0, len));
        }
        out
    }

    /// Words of `Sn` of exactly `len`, canonical order.
    pub fn sn_words_of_len(&self, n: usize, len: usize) -> Vec<Word> {
        self.words_of_len(n, len)
            .filter(|w| w.in_sn(n))
            .collect()
    }

    /// Words of `Sn` up to `max_len`, canonical order.
    pub fn sn_words_upto(&self, n: usize, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            out.extend(self.sn_words_of_len(n, len));
        }
        out
    }

    /// Words of `Sn ∪ S0` up to `max_len`, canonical order.
    pub fn t_words_upto(&self, n: usize, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            out.extend(
                self.words_of_len(n, len)
                    .filter(|w| w.in_s0() || w.in_sn(n)),
            );
        }
        out
    }
}

/// Lexicographic odometer over a fixed symbol set at fixed length.
pub struct WordIter {
    syms: Vec<Sym>,
    digits: Vec<usize>,
    len: usize,
    done: bool,
}

impl WordIter {
    fn new(syms: Vec<Sym>, len: usize) -> Self {
        let done = syms.is_empty() && len > 0;
        WordIter {
            syms,
            digits: vec![0; len],
            len,
            done,
        }
    }
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let word = Word::from_syms(self.digits.iter().map(|&d| self.syms[d]).collect());
        // advance the odometer, most significant digit first
        let mut i = self.len;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.syms.len() {
                break;
            }
            self.digits[i] = 0;
        }
        if self.len == 0 {
            self.done = true;
        }
        Some(word)
    }
}

/// A finite word; possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    syms: Vec<Sym>,
}

impl Word {
    pub fn empty() -> Self {
        Word { syms: Vec::new() }
    }

    pub fn from_syms(syms: Vec<Sym>) -> Self {
        Word { syms }
    }

    pub fn syms(&self) -> &[Sym] {
        &self.syms
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    /// Concatenation; the empty word is the identity.
    pub fn concat(&self, other: &Word) -> Word {
        let mut syms = Vec::with_capacity(self.len() + other.len());
        syms.extend_from_slice(&self.syms);
        syms.extend_from_slice(&other.syms);
        Word { syms }
    }

    /// Membership in `S0`: nonempty and variable-free.
    pub fn in_s0(&self) -> bool {
        !self.is_empty() && self.syms.iter().all(|&s| s < VAR_BASE)
    }

    /// Membership in `Sn`: every `v_i` with `1 <= i <= n` occurs, and no
    /// variable beyond `v_n` occurs. `in_sn(0)` coincides with `in_s0`.
    pub fn in_sn(&self, n: usize) -> bool {
        if n == 0 {
            return self.in_s0();
        }
        if self.is_empty() {
            return false;
        }
        let mut seen = vec![false; n];
        for &s in &self.syms {
            if let Some(i) = var_index(s) {
                if i > n {
                    return false;
                }
                seen[i - 1] = true;
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Occurrence count of the variable `v_i`.
    pub fn var_count(&self, i: usize) -> usize {
        let target = var_sym(i);
        self.syms.iter().filter(|&&s| s == target).count()
    }

    /// Occurrence count of an arbitrary symbol.
    pub fn sym_count(&self, sym: Sym) -> usize {
        self.syms.iter().filter(|&&s| s == sym).count()
    }

    /// Largest variable index occurring, or 0 if variable-free.
    pub fn max_var(&self) -> usize {
        self.syms
            .iter()
            .filter_map(|&s| var_index(s))
            .max()
            .unwrap_or(0)
    }

    /// Replace each `v_i` by the letter `x[i-1]`. Requires `self ∈ Sn` for
    /// `n = x.len()` and every entry of `x` to be a letter.
    pub fn substitute(&self, alphabet: &Alphabet, x: &[Sym]) -> Result<Word> {
        let n = x.len();
        if !self.in_sn(n) {
            return Err(Error::Domain(format!(
                "substitution needs a word of S{n}, got {:?}",
                alphabet.display_word(self)
            )));
        }
        for &s in x {
            if (s as usize) >= alphabet.k() {
                return Err(Error::Domain(format!(
                    "substitution tuple entry {s} is not a letter"
                )));
            }
        }
        let syms = self
            .syms
            .iter()
            .map(|&s| match var_index(s) {
                Some(i) => x[i - 1],
                None => s,
            })
            .collect();
        Ok(Word::from_syms(syms))
    }

    /// Replace each `v_i` by the i-th letter of `u`; `u` must be a
    /// variable-free word of length `n`.
    pub fn substitute_by_word(&self, alphabet: &Alphabet, u: &Word) -> Result<Word> {
        if !u.in_s0() {
            return Err(Error::Domain(
                "substitution word must be nonempty and variable-free".into(),
            ));
        }
        let n = u.len();
        if !self.in_sn(n) {
            return Err(Error::Domain(format!(
                "length mismatch: substitution word has length {n} but word is not in S{n}"
            )));
        }
        self.substitute(alphabet, u.syms())
    }

    /// Subsequence of the occurrences of `v1..vk`, in order (all letters and
    /// higher variables deleted). Requires `self ∈ Sn` and `1 <= k < n`.
    pub fn pattern_extract(&self, n: usize, k: usize) -> Result<Word> {
        if k == 0 || k >= n {
            return Err(Error::Domain(format!(
                "pattern extraction needs 1 <= k < n, got k={k}, n={n}"
            )));
        }
        if !self.in_sn(n) {
            return Err(Error::Domain(format!("word is not in S{n}")));
        }
        Ok(self.extract_upto(k))
    }

    /// Unchecked extraction: keep occurrences of `v1..vk` only. This is the
    /// total extension used by homomorphism machinery; it maps variable-free
    /// words to the empty word.
    pub fn extract_upto(&self, k: usize) -> Word {
        let syms = self
            .syms
            .iter()
            .copied()
            .filter(|&s| matches!(var_index(s), Some(i) if i <= k))
            .collect();
        Word::from_syms(syms)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.syms.cmp(&other.syms))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Display without a letter table: letter codes print as `\u{code}` only
    /// when no table is available; prefer [`Alphabet::display_word`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.syms {
            match var_index(s) {
                Some(i) => write!(f, "#{i}")?,
                None => write!(f, "{}", (b'a' + (s as u8 % 26)) as char)?,
            }
        }
        Ok(())
    }
}

/// A homomorphism description on word semigroups.
///
/// Substitution kinds act as the identity on `S0` and substitute on `Sn`
/// (the extension used when lifting witnesses). Counting kinds map into
/// `(ω,+)`. Pattern extraction maps into words over `v1..vk`, sending `S0`
/// to the empty word. User tables give a per-symbol image extended
/// multiplicatively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomSpec {
    Substitution(Vec<Sym>),
    SubstitutionByWord(Word),
    VarCount(usize),
    PatternExtract(usize),
    UserTable(BTreeMap<Sym, Word>),
}

/// Value of a homomorphism application: a word or a count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum HomValue {
    Word(Word),
    Count(u64),
}

impl HomValue {
    /// Semigroup operation on the codomain: concatenation or addition.
    pub fn combine(&self, other: &HomValue) -> Option<HomValue> {
        match (self, other) {
            (HomValue::Word(a), HomValue::Word(b)) => Some(HomValue::Word(a.concat(b))),
            (HomValue::Count(a), HomValue::Count(b)) => Some(HomValue::Count(a + b)),
            _ => None,
        }
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            HomValue::Word(w) => Some(w),
            HomValue::Count(_) => None,
        }
    }

    pub fn as_count(&self) -> Option<u64> {
        match self {
            HomValue::Count(c) => Some(*c),
            HomValue::Word(_) => None,
        }
    }
}

impl HomSpec {
    /// Arity of the substitution tuple, where applicable.
    pub fn substitution_arity(&self) -> Option<usize> {
        match self {
            HomSpec::Substitution(x) => Some(x.len()),
            HomSpec::SubstitutionByWord(u) => Some(u.len()),
            _ => None,
        }
    }

    /// Does this homomorphism produce word values (as opposed to counts)?
    pub fn is_word_valued(&self) -> bool {
        !matches!(self, HomSpec::VarCount(_))
    }

    /// Render for certificates and reports.
    pub fn describe(&self, alphabet: &Alphabet) -> String {
        match self {
            HomSpec::Substitution(x) => {
                let letters: String = x
                    .iter()
                    .map(|&s| alphabet.letter_char(s).unwrap_or('?'))
                    .collect();
                format!("subst({letters})")
            }
            HomSpec::SubstitutionByWord(u) => {
                format!("subst-word({})", alphabet.display_word(u))
            }
            HomSpec::VarCount(i) => format!("var-count({i})"),
            HomSpec::PatternExtract(k) => format!("pattern-extract({k})"),
            HomSpec::UserTable(map) => {
                let entries: Vec<String> = map
                    .iter()
                    .map(|(&s, w)| {
                        let key = match var_index(s) {
                            Some(i) => format!("#{i}"),
                            None => alphabet.letter_char(s).map(String::from).unwrap_or_default(),
                        };
                        format!("{key}->{}", alphabet.display_word(w))
                    })
                    .collect();
                format!("table({})", entries.join(","))
            }
        }
    }
}

/// Apply a homomorphism to a word in its declared domain.
pub fn apply_hom(h: &HomSpec, alphabet: &Alphabet, w: &Word) -> Result<HomValue> {
    match h {
        HomSpec::Substitution(x) => {
            if w.in_s0() {
                Ok(HomValue::Word(w.clone()))
            } else if w.in_sn(x.len()) {
                Ok(HomValue::Word(w.substitute(alphabet, x)?))
            } else {
                Err(Error::Domain(format!(
                    "word {:?} is in neither S{} nor S0",
                    alphabet.display_word(w),
                    x.len()
                )))
            }
        }
        HomSpec::SubstitutionByWord(u) => {
            if w.in_s0() {
                Ok(HomValue::Word(w.clone()))
            } else if w.in_sn(u.len()) {
                Ok(HomValue::Word(w.substitute_by_word(alphabet, u)?))
            } else {
                Err(Error::Domain(format!(
                    "word {:?} is in neither S{} nor S0",
                    alphabet.display_word(w),
                    u.len()
                )))
            }
        }
        HomSpec::VarCount(i) => {
            if *i == 0 || *i > alphabet.nvars() {
                return Err(Error::Domain(format!(
                    "variable index {i} outside 1..={}",
                    alphabet.nvars()
                )));
            }
            Ok(HomValue::Count(w.var_count(*i) as u64))
        }
        HomSpec::PatternExtract(k) => {
            if *k == 0 {
                return Err(Error::Domain("pattern-extract needs k >= 1".into()));
            }
            Ok(HomValue::Word(w.extract_upto(*k)))
        }
        HomSpec::UserTable(map) => {
            let mut acc = Word::empty();
            for &s in w.syms() {
                let image = map.get(&s).ok_or_else(|| {
                    Error::Domain(format!("symbol {s} has no image in the user table"))
                })?;
                acc = acc.concat(image);
            }
            Ok(HomValue::Word(acc))
        }
    }
}

/// Outcome of an exhaustive small-bound check of the homomorphism laws.
#[derive(Debug, Clone)]
pub struct HomReport {
    /// `h(uv) = h(u)h(v)` over all domain pairs up to the bound.
    pub is_homomorphism: bool,
    /// `h(uw) = u h(w)` and `h(wu) = h(w) u` for `u ∈ S0`; `None` when the
    /// codomain is not the word semigroup.
    pub s0_preserving: Option<bool>,
    /// `h(uw) = h(w) = h(wu)` for `u ∈ S0`.
    pub s0_independent: bool,
    /// `h(u) = u` for `u ∈ S0 ∩ domain`; `None` for count-valued kinds.
    pub identity_on_s0: Option<bool>,
    /// First violated identity, rendered for reports.
    pub counterexample: Option<String>,
}

fn domain_words(h: &HomSpec, alphabet: &Alphabet, bound: usize) -> Vec<Word> {
    match h {
        HomSpec::Substitution(x) => alphabet.t_words_upto(x.len(), bound),
        HomSpec::SubstitutionByWord(u) => alphabet.t_words_upto(u.len(), bound),
        HomSpec::VarCount(_) | HomSpec::PatternExtract(_) => {
            let mut out = Vec::new();
            for len in 1..=bound {
                out.extend(alphabet.words_of_len(alphabet.nvars(), len));
            }
            out
        }
        HomSpec::UserTable(map) => {
            let syms: Vec<Sym> = map.keys().copied().collect();
            let mut out = Vec::new();
            for len in 1..=bound {
                out.extend(WordIter::new(syms.clone(), len));
            }
            out
        }
    }
}

/// Exhaustively check the homomorphism, `S0`-preservation, and
/// `S0`-independence laws over all domain words up to `sample_bound`
/// symbols. Reports the first counterexample found for any failing law.
pub fn check_hom_properties(h: &HomSpec, alphabet: &Alphabet, sample_bound: usize) -> HomReport {
    let domain = domain_words(h, alphabet, sample_bound);
    let word_valued = h.is_word_valued();
    let s0: Vec<Word> = domain.iter().filter(|w| w.in_s0()).cloned().collect();

    let mut report = HomReport {
        is_homomorphism: true,
        s0_preserving: if word_valued { Some(true) } else { None },
        s0_independent: true,
        identity_on_s0: if word_valued { Some(true) } else { None },
        counterexample: None,
    };
    let note = |report: &mut HomReport, msg: String| {
        if report.counterexample.is_none() {
            report.counterexample = Some(msg);
        }
    };

    for w1 in &domain {
        for w2 in &domain {
            let joined = w1.concat(w2);
            let lhs = apply_hom(h, alphabet, &joined);
            let rhs = apply_hom(h, alphabet, w1)
                .ok()
                .zip(apply_hom(h, alphabet, w2).ok())
                .and_then(|(a, b)| a.combine(&b));
            match (lhs, rhs) {
                (Ok(l), Some(r)) if l == r => {}
                _ => {
                    report.is_homomorphism = false;
                    note(
                        &mut report,
                        format!(
                            "hom law fails at ({}, {})",
                            alphabet.display_word(w1),
                            alphabet.display_word(w2)
                        ),
                    );
                }
            }
        }
    }

    for u in &s0 {
        if word_valued {
            match apply_hom(h, alphabet, u) {
                Ok(HomValue::Word(img)) if img == *u => {}
                _ => {
                    report.identity_on_s0 = Some(false);
                    note(
                        &mut report,
                        format!("not identity on S0 at {}", alphabet.display_word(u)),
                    );
                }
            }
        }
        for w in &domain {
            let uw = u.concat(w);
            let wu = w.concat(u);
            let hw = apply_hom(h, alphabet, w).ok();
            let huw = apply_hom(h, alphabet, &uw).ok();
            let hwu = apply_hom(h, alphabet, &wu).ok();
            if word_valued {
                let expected_left = hw
                    .as_ref()
                    .and_then(|v| v.as_word())
                    .map(|img| u.concat(img));
                let expected_right = hw
                    .as_ref()
                    .and_then(|v| v.as_word())
                    .map(|img| img.concat(u));
                let left_ok = matches!(
                    (&huw, &expected_left),
                    (Some(HomValue::Word(l)), Some(e)) if l == e
                );
                let right_ok = matches!(
                    (&hwu, &expected_right),
                    (Some(HomValue::Word(r)), Some(e)) if r == e
                );
                if !(left_ok && right_ok) {
                    report.s0_preserving = Some(false);
                    note(
                        &mut report,
                        format!(
                            "S0-preservation fails at u={}, w={}",
                            alphabet.display_word(u),
                            alphabet.display_word(w)
                        ),
                    );
                }
            }
            let indep = matches!((&huw, &hw, &hwu), (Some(a), Some(b), Some(c)) if a == b && b == c);
            if !indep {
                report.s0_independent = false;
                note(
                    &mut report,
                    format!(
                        "S0-independence fails at u={}, w={}",
                        alphabet.display_word(u),
                        alphabet.display_word(w)
                    ),
                );
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(nvars: usize) -> Alphabet {
        Alphabet::new(2, nvars).unwrap()
    }

    fn w(alphabet: &Alphabet, s: &str) -> Word {
        alphabet.parse_word(s).unwrap()
    }

    #[test]
    fn concat_examples() {
        let a = ab(1);
        assert_eq!(w(&a, "ab").concat(&w(&a, "ba")), w(&a, "abba"));
        assert_eq!(Word::empty().concat(&w(&a, "ab")), w(&a, "ab"));
        assert_eq!(w(&a, "a#1").concat(&w(&a, "#1b")), w(&a, "a#1#1b"));
    }

    #[test]
    fn substitute_examples() {
        let a1 = ab(1);
        let a2 = Alphabet::new(3, 2).unwrap();
        let c = a1.letter_sym('c');
        assert!(c.is_none());
        let a3 = Alphabet::new(3, 1).unwrap();
        let got = w(&a3, "a#1b#1")
            .substitute(&a3, &[a3.letter_sym('c').unwrap()])
            .unwrap();
        assert_eq!(got, w(&a3, "acbc"));
        let got = w(&a2, "#1#2")
            .substitute(
                &a2,
                &[a2.letter_sym('a').unwrap(), a2.letter_sym('b').unwrap()],
            )
            .unwrap();
        assert_eq!(got, w(&a2, "ab"));
        let got = w(&a2, "#1a#2#1")
            .substitute(
                &a2,
                &[a2.letter_sym('b').unwrap(), a2.letter_sym('c').unwrap()],
            )
            .unwrap();
        assert_eq!(got, w(&a2, "bacb"));
    }

    #[test]
    fn substitute_rejects_bad_domain() {
        let a = ab(2);
        // missing v2
        let err = w(&a, "a#1").substitute(&a, &[0, 1]);
        assert!(err.is_err());
        // non-letter in the tuple
        let err = w(&a, "#1").substitute(&a, &[9]);
        assert!(err.is_err());
    }

    #[test]
    fn substitute_by_word_examples() {
        let a = ab(2);
        assert_eq!(
            w(&a, "#1#2").substitute_by_word(&a, &w(&a, "ab")).unwrap(),
            w(&a, "ab")
        );
        assert_eq!(
            w(&a, "#2#1").substitute_by_word(&a, &w(&a, "ab")).unwrap(),
            w(&a, "ba")
        );
        let a3 = Alphabet::new(3, 2).unwrap();
        assert_eq!(
            w(&a3, "a#1#2b")
                .substitute_by_word(&a3, &w(&a3, "cc"))
                .unwrap(),
            w(&a3, "accb")
        );
        // length mismatch
        assert!(w(&a, "#1#2").substitute_by_word(&a, &w(&a, "a")).is_err());
    }

    #[test]
    fn var_count_examples() {
        let a = ab(2);
        assert_eq!(w(&a, "#1#1ab").var_count(1), 2);
        assert_eq!(w(&a, "ab").var_count(1), 0);
        assert_eq!(w(&a, "#1a#2#1").var_count(2), 1);
    }

    #[test]
    fn var_count_additive_under_concat() {
        let a = ab(2);
        let u = w(&a, "#1a#2");
        let v = w(&a, "#1#1b");
        assert_eq!(
            u.concat(&v).var_count(1),
            u.var_count(1) + v.var_count(1)
        );
    }

    #[test]
    fn pattern_extract_examples() {
        let a = ab(2);
        assert_eq!(
            w(&a, "#1a#2b#1").pattern_extract(2, 1).unwrap(),
            w(&a, "#1#1")
        );
        assert_eq!(w(&a, "#1#2").pattern_extract(2, 1).unwrap(), w(&a, "#1"));
        let a3 = Alphabet::new(1, 3).unwrap();
        assert_eq!(
            a3.parse_word("a#2#1#2#3").unwrap().pattern_extract(3, 2).unwrap(),
            a3.parse_word("#2#1#2").unwrap()
        );
        assert!(w(&a, "#1#2").pattern_extract(2, 2).is_err());
    }

    #[test]
    fn apply_hom_examples() {
        let a = Alphabet::new(3, 1).unwrap();
        let h = HomSpec::Substitution(vec![a.letter_sym('a').unwrap()]);
        assert_eq!(
            apply_hom(&h, &a, &w(&a, "#1b")).unwrap(),
            HomValue::Word(w(&a, "ab"))
        );
        // identity on S0
        assert_eq!(
            apply_hom(&h, &a, &w(&a, "cb")).unwrap(),
            HomValue::Word(w(&a, "cb"))
        );
        let tau = HomSpec::VarCount(1);
        assert_eq!(
            apply_hom(&tau, &a, &w(&a, "#1#1c")).unwrap(),
            HomValue::Count(2)
        );
    }

    #[test]
    fn hom_property_reports() {
        let a = ab(1);
        let subst = HomSpec::Substitution(vec![0]);
        let rep = check_hom_properties(&subst, &a, 3);
        assert!(rep.is_homomorphism);
        assert_eq!(rep.s0_preserving, Some(true));
        assert!(!rep.s0_independent);
        assert_eq!(rep.identity_on_s0, Some(true));

        let tau = HomSpec::VarCount(1);
        let rep = check_hom_properties(&tau, &a, 3);
        assert!(rep.is_homomorphism);
        assert_eq!(rep.s0_preserving, None);
        assert!(rep.s0_independent);

        // a -> ab, b -> b, extended multiplicatively
        let mut table = BTreeMap::new();
        table.insert(0, w(&a, "ab"));
        table.insert(1, w(&a, "b"));
        let h = HomSpec::UserTable(table);
        let rep = check_hom_properties(&h, &a, 3);
        assert!(rep.is_homomorphism);
        assert_eq!(rep.s0_preserving, Some(false));
        assert!(!rep.s0_independent);
    }

    #[test]
    fn pattern_extract_is_s0_independent_hom() {
        let a = ab(2);
        let rep = check_hom_properties(&HomSpec::PatternExtract(1), &a, 3);
        assert!(rep.is_homomorphism);
        assert!(rep.s0_independent);
        assert_eq!(rep.s0_preserving, Some(false));
    }

    #[test]
    fn canonical_order_is_length_then_lex() {
        let a = ab(1);
        let mut words = vec![w(&a, "#1"), w(&a, "b"), w(&a, "aa"), w(&a, "a#1")];
        words.sort();
        assert_eq!(
            words,
            vec![w(&a, "b"), w(&a, "#1"), w(&a, "aa"), w(&a, "a#1")]
        );
    }

    #[test]
    fn membership_edges() {
        let a = ab(2);
        assert!(!Word::empty().in_s0());
        assert!(!Word::empty().in_sn(1));
        assert!(w(&a, "ab").in_s0());
        assert!(!w(&a, "a#1").in_s0());
        assert!(w(&a, "#1a#2").in_sn(2));
        assert!(!w(&a, "#1a").in_sn(2));
        // word with v2 only is not in S1's alphabet
        assert!(!w(&a, "#2").in_sn(1));
    }

    #[test]
    fn length_cap_enforced_at_parse() {
        let mut a = ab(1);
        a.set_max_word_len(3);
        assert!(a.parse_word("aaa").is_ok());
        assert!(matches!(
            a.parse_word("aaaa"),
            Err(Error::WordLengthCap { len: 4, cap: 3 })
        ));
    }

    #[test]
    fn parse_display_roundtrip() {
        let a = ab(2);
        for s in ["", "a", "ab#1", "#1#2a", "b#2#2"] {
            let word = a.parse_word(s).unwrap();
            assert_eq!(a.display_word(&word), s);
        }
        assert!(a.parse_word("#3").is_err());
        assert!(a.parse_word("z").is_err());
        assert!(a.parse_word("#").is_err());
    }

    #[test]
    fn enumeration_is_canonical_and_complete() {
        let a = ab(1);
        let s1: Vec<String> = a
            .sn_words_upto(1, 2)
            .iter()
            .map(|w| a.display_word(w))
            .collect();
        assert_eq!(s1, vec!["#1", "a#1", "b#1", "#1a", "#1b", "#1#1"]);
        // 1-variable words of length 2 over a 2-letter alphabet: 3^2 - 2^2 = 5
        assert_eq!(a.sn_words_of_len(1, 2).len(), 5);
    }
}
