//! Finite Hales-Jewett engines.
//!
//! Colorings live on the fixed-length cube `A^N` (or on all lengths up to
//! `N` in cumulative mode). A combinatorial line is the instance set of a
//! variable word of length `N`; the searches below find monochromatic
//! lines, search for line-free colorings by backtracking, and compute tiny
//! HJ numbers.
//!
//! The line search works on base-`(k+n)` digit ranks and never touches the
//! word substitution code; `verify_line` and `verify_line_free` go the
//! other way (parse, substitute, look up) so certificates are re-checked by
//! a disjoint path.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::words::{var_sym, Alphabet, Sym, Word};

/// Cell cap for the backtracking line-free search.
pub const MAX_BACKTRACK_CELLS: usize = 100;
/// Cell cap for the exhaustive line-free search.
pub const MAX_EXHAUSTIVE_CELLS: usize = 32;
/// Coloring-count cap for the exhaustive line-free search.
pub const MAX_EXHAUSTIVE_COLORINGS: u64 = 1 << 22;

/// A total coloring of `A^N` (fixed) or of all words of length `1..=N`
/// (cumulative), stored by word rank in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    k: usize,
    len: usize,
    cumulative: bool,
    colors: Vec<u32>,
}

fn pow(k: usize, e: usize) -> usize {
    k.pow(e as u32)
}

impl Coloring {
    /// Fixed-length coloring; `colors[rank]` for ranks in base-`k` digit
    /// order, values in `1..=c`.
    pub fn new_fixed(k: usize, len: usize, colors: Vec<u32>) -> Result<Self> {
        if k == 0 || len == 0 {
            return Err(Error::InvalidInput("coloring needs k >= 1 and N >= 1".into()));
        }
        if colors.len() != pow(k, len) {
            return Err(Error::InvalidInput(format!(
                "coloring must be total: expected {} cells, got {}",
                pow(k, len),
                colors.len()
            )));
        }
        if colors.iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput("colors are 1-based".into()));
        }
        Ok(Coloring {
            k,
            len,
            cumulative: false,
            colors,
        })
    }

    /// Cumulative coloring over lengths `1..=len`; cells ordered by length
    /// then rank.
    pub fn new_cumulative(k: usize, len: usize, colors: Vec<u32>) -> Result<Self> {
        if k == 0 || len == 0 {
            return Err(Error::InvalidInput("coloring needs k >= 1 and N >= 1".into()));
        }
        let total: usize = (1..=len).map(|l| pow(k, l)).sum();
        if colors.len() != total {
            return Err(Error::InvalidInput(format!(
                "cumulative coloring must be total: expected {total} cells, got {}",
                colors.len()
            )));
        }
        if colors.iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput("colors are 1-based".into()));
        }
        Ok(Coloring {
            k,
            len,
            cumulative: true,
            colors,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_cumulative(&self) -> bool {
        self.cumulative
    }

    pub fn color_count(&self) -> u32 {
        self.colors.iter().copied().max().unwrap_or(1)
    }

    fn slice_offset(&self, word_len: usize) -> Option<usize> {
        if self.cumulative {
            (1..=self.len).contains(&word_len).then(|| {
                (1..word_len).map(|l| pow(self.k, l)).sum()
            })
        } else {
            (word_len == self.len).then_some(0)
        }
    }

    /// Color of a cell given its letter digits.
    pub fn color_of_digits(&self, digits: &[usize]) -> Option<u32> {
        let offset = self.slice_offset(digits.len())?;
        let mut rank = 0usize;
        for &d in digits {
            if d >= self.k {
                return None;
            }
            rank = rank * self.k + d;
        }
        self.colors.get(offset + rank).copied()
    }

    /// Color of a variable-free word; the independent lookup path.
    pub fn color_of_word(&self, alphabet: &Alphabet, w: &Word) -> Option<u32> {
        if !w.in_s0() || alphabet.k() != self.k {
            return None;
        }
        let digits: Vec<usize> = w.syms().iter().map(|&s| s as usize).collect();
        self.color_of_digits(&digits)
    }

    /// All (word, color) pairs in canonical order.
    pub fn entries(&self, alphabet: &Alphabet) -> Vec<(Word, u32)> {
        let lens: Vec<usize> = if self.cumulative {
            (1..=self.len).collect()
        } else {
            vec![self.len]
        };
        let mut out = Vec::with_capacity(self.colors.len());
        for l in lens {
            for w in alphabet.words_of_len(0, l) {
                let color = self.color_of_word(alphabet, &w).expect("total coloring");
                out.push((w, color));
            }
        }
        out
    }

    /// Cylinder restriction: the length `N-1` coloring `w -> color(w a0)`
    /// obtained by appending the first letter.
    pub fn cylinder(&self) -> Result<Coloring> {
        if self.cumulative || self.len < 2 {
            return Err(Error::InvalidInput(
                "cylinder restriction needs a fixed-length coloring with N >= 2".into(),
            ));
        }
        let shorter = pow(self.k, self.len - 1);
        let colors = (0..shorter)
            .map(|rank| self.colors[rank * self.k])
            .collect();
        Coloring::new_fixed(self.k, self.len - 1, colors)
    }
}

/// A combinatorial line: a variable-word root together with its instance
/// points in substitution-tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub root: Word,
    pub points: Vec<Word>,
    pub color: u32,
}

#[derive(Debug, Clone)]
pub enum LineOutcome {
    Found { line: Line, roots_checked: u64 },
    None { roots_checked: u64 },
}

// root digits: 0..k are letters, k+j encodes v_{j+1}
fn decode_root(mut rank: usize, base: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0usize; len];
    for slot in (0..len).rev() {
        digits[slot] = rank % base;
        rank /= base;
    }
    digits
}

fn root_uses_all_vars(digits: &[usize], k: usize, n: usize) -> bool {
    let mut seen = vec![false; n];
    for &d in digits {
        if d >= k {
            seen[d - k] = true;
        }
    }
    seen.into_iter().all(|b| b)
}

fn root_digits_to_word(digits: &[usize], k: usize) -> Word {
    Word::from_syms(
        digits
            .iter()
            .map(|&d| {
                if d < k {
                    d as Sym
                } else {
                    var_sym(d - k + 1)
                }
            })
            .collect(),
    )
}

/// Check whether all `k^n` instances of a root share a color; returns the
/// color if so. Works purely on digit ranks.
fn mono_color(coloring: &Coloring, digits: &[usize], k: usize, n: usize) -> Option<u32> {
    let mut assignment = vec![0usize; n];
    let mut expected: Option<u32> = None;
    loop {
        let point: Vec<usize> = digits
            .iter()
            .map(|&d| if d < k { d } else { assignment[d - k] })
            .collect();
        let color = coloring.color_of_digits(&point)?;
        match expected {
            None => expected = Some(color),
            Some(c) if c != color => return None,
            _ => {}
        }
        // advance assignment odometer
        let mut i = n;
        loop {
            if i == 0 {
                return expected;
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < k {
                break;
            }
            assignment[i] = 0;
        }
    }
}

/// Find the canonically least monochromatic `n`-variable line, scanning
/// roots in length-lex order with variables sorting after letters.
pub fn find_mono_line(coloring: &Coloring, n: usize) -> Result<LineOutcome> {
    if n == 0 {
        return Err(Error::InvalidInput("line search needs n >= 1".into()));
    }
    let k = coloring.k;
    if n > coloring.len {
        return Err(Error::InvalidInput(format!(
            "n={n} variables cannot occur in words of length {}",
            coloring.len
        )));
    }
    let base = k + n;
    let lens: Vec<usize> = if coloring.cumulative {
        (1..=coloring.len).collect()
    } else {
        vec![coloring.len]
    };

    let mut roots_checked: u64 = 0;
    for len in lens {
        let total = pow(base, len);
        let hit = (0..total).into_par_iter().find_map_first(|rank| {
            let digits = decode_root(rank, base, len);
            if !root_uses_all_vars(&digits, k, n) {
                return None;
            }
            mono_color(coloring, &digits, k, n).map(|color| (rank, digits, color))
        });
        match hit {
            Some((rank, digits, color)) => {
                // deterministic count: valid roots up to and including the hit
                roots_checked += (0..=rank)
                    .filter(|&r| root_uses_all_vars(&decode_root(r, base, len), k, n))
                    .count() as u64;
                let root = root_digits_to_word(&digits, k);
                let mut points = Vec::with_capacity(pow(k, n));
                let mut assignment = vec![0usize; n];
                loop {
                    let point: Vec<usize> = digits
                        .iter()
                        .map(|&d| if d < k { d } else { assignment[d - k] })
                        .collect();
                    points.push(Word::from_syms(
                        point.into_iter().map(|d| d as Sym).collect(),
                    ));
                    let mut i = n;
                    let mut done = false;
                    loop {
                        if i == 0 {
                            done = true;
                            break;
                        }
                        i -= 1;
                        assignment[i] += 1;
                        if assignment[i] < k {
                            break;
                        }
                        assignment[i] = 0;
                    }
                    if done {
                        break;
                    }
                }
                return Ok(LineOutcome::Found {
                    line: Line {
                        root,
                        points,
                        color,
                    },
                    roots_checked,
                });
            }
            None => {
                roots_checked += (0..total)
                    .filter(|&r| root_uses_all_vars(&decode_root(r, base, len), k, n))
                    .count() as u64;
            }
        }
    }
    Ok(LineOutcome::None { roots_checked })
}

/// Independent line verifier: recomputes the points through the word
/// substitution path and the word-indexed color lookup. Checks the
/// canonical point order as part of the contract.
pub fn verify_line(alphabet: &Alphabet, coloring: &Coloring, line: &Line, n: usize) -> Result<()> {
    if !line.root.in_sn(n) {
        return Err(Error::Certificate("line root is not an n-variable word".into()));
    }
    let letters = alphabet.letter_syms();
    let mut expected_points = Vec::new();
    let mut assignment = vec![0usize; n];
    loop {
        let x: Vec<Sym> = assignment.iter().map(|&i| letters[i]).collect();
        expected_points.push(line.root.substitute(alphabet, &x)?);
        let mut i = n;
        let mut done = false;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < alphabet.k() {
                break;
            }
            assignment[i] = 0;
        }
        if done {
            break;
        }
    }
    if expected_points != line.points {
        return Err(Error::Certificate(
            "line points differ from the canonical substitution order".into(),
        ));
    }
    for p in &line.points {
        match coloring.color_of_word(alphabet, p) {
            Some(c) if c == line.color => {}
            Some(c) => {
                return Err(Error::Certificate(format!(
                    "point {} has color {c}, expected {}",
                    alphabet.display_word(p),
                    line.color
                )))
            }
            None => {
                return Err(Error::Certificate(format!(
                    "point {} is outside the coloring domain",
                    alphabet.display_word(p)
                )))
            }
        }
    }
    Ok(())
}

/// All 1-variable lines of `A^len` as point-rank vectors.
fn all_lines(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut lines = Vec::new();
    for mask in 1usize..(1 << len) {
        let free: Vec<usize> = (0..len).filter(|i| mask & (1 << i) == 0).collect();
        let mut fill = vec![0usize; free.len()];
        loop {
            let mut points = Vec::with_capacity(k);
            for letter in 0..k {
                let mut rank = 0usize;
                for pos in 0..len {
                    let d = if mask & (1 << pos) != 0 {
                        letter
                    } else {
                        let idx = free.iter().position(|&f| f == pos).unwrap();
                        fill[idx]
                    };
                    rank = rank * k + d;
                }
                points.push(rank);
            }
            lines.push(points);
            let mut i = free.len();
            let mut done = false;
            loop {
                if i == 0 {
                    done = true;
                    break;
                }
                i -= 1;
                fill[i] += 1;
                if fill[i] < k {
                    break;
                }
                fill[i] = 0;
            }
            if done || free.is_empty() {
                break;
            }
        }
    }
    lines
}

#[derive(Debug, Clone)]
pub struct LineFreeOutcome {
    pub coloring: Option<Coloring>,
    /// 1-variable roots of `A^N`: `(k+1)^N - k^N`
    pub lines_count: u64,
    pub nodes_visited: u64,
}

/// Backtracking search for a coloring of `A^N` with `c` colors and no
/// monochromatic 1-variable line. Cells are assigned in canonical order,
/// the first cell's color is pinned to break color symmetry, and a branch
/// is pruned as soon as any fully assigned line goes monochromatic. The
/// first solution found is the lex-least line-free coloring.
pub fn search_line_free(k: usize, c: u32, len: usize) -> Result<LineFreeOutcome> {
    if k == 0 || c == 0 || len == 0 {
        return Err(Error::InvalidInput("need k >= 1, c >= 1, N >= 1".into()));
    }
    let cells = pow(k, len);
    if cells > MAX_BACKTRACK_CELLS {
        return Err(Error::SizeBound(format!(
            "{cells} cells exceed the backtracking cap of {MAX_BACKTRACK_CELLS}"
        )));
    }
    let lines = all_lines(k, len);
    let mut lines_by_last: Vec<Vec<usize>> = vec![Vec::new(); cells];
    for (li, line) in lines.iter().enumerate() {
        let last = *line.iter().max().unwrap();
        lines_by_last[last].push(li);
    }

    let mut colors = vec![0u32; cells]; // 0 = unassigned
    let mut nodes: u64 = 0;
    // iterative DFS: position i, try colors upward from colors[i]+1
    let mut i = 0usize;
    loop {
        let limit = if i == 0 { 1 } else { c }; // symmetry: first cell pinned
        let mut advanced = false;
        while colors[i] < limit {
            colors[i] += 1;
            nodes += 1;
            let ok = lines_by_last[i].iter().all(|&li| {
                let line = &lines[li];
                let first = colors[line[0]];
                !line.iter().all(|&p| colors[p] == first)
            });
            if ok {
                advanced = true;
                break;
            }
        }
        if advanced {
            if i + 1 == cells {
                let coloring = Coloring::new_fixed(k, len, colors)?;
                return Ok(LineFreeOutcome {
                    coloring: Some(coloring),
                    lines_count: lines.len() as u64,
                    nodes_visited: nodes,
                });
            }
            i += 1;
        } else {
            colors[i] = 0;
            if i == 0 {
                return Ok(LineFreeOutcome {
                    coloring: None,
                    lines_count: lines.len() as u64,
                    nodes_visited: nodes,
                });
            }
            i -= 1;
        }
    }
}

/// Brute-force oracle: scan every coloring of `A^N` in lexicographic order
/// and return the first line-free one. Kept independent of the
/// backtracking engine; used as the dual route at tiny sizes.
pub fn search_line_free_exhaustive(k: usize, c: u32, len: usize) -> Result<Option<Coloring>> {
    if k == 0 || c == 0 || len == 0 {
        return Err(Error::InvalidInput("need k >= 1, c >= 1, N >= 1".into()));
    }
    let cells = pow(k, len);
    if cells > MAX_EXHAUSTIVE_CELLS {
        return Err(Error::SizeBound(format!(
            "{cells} cells exceed the exhaustive cap of {MAX_EXHAUSTIVE_CELLS}"
        )));
    }
    let total = (c as u64).checked_pow(cells as u32).unwrap_or(u64::MAX);
    if total > MAX_EXHAUSTIVE_COLORINGS {
        return Err(Error::SizeBound(format!(
            "{total} colorings exceed the exhaustive cap of {MAX_EXHAUSTIVE_COLORINGS}"
        )));
    }
    let lines = all_lines(k, len);
    let mut colors = vec![1u32; cells];
    loop {
        let line_free = lines.iter().all(|line| {
            let first = colors[line[0]];
            !line.iter().all(|&p| colors[p] == first)
        });
        if line_free {
            return Ok(Some(Coloring::new_fixed(k, len, colors)?));
        }
        let mut i = cells;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            colors[i] += 1;
            if colors[i] <= c {
                break;
            }
            colors[i] = 1;
        }
    }
}

/// Verify a claimed line-free coloring through the word path: every
/// 1-variable root's instance set must be polychromatic. Returns the root
/// count checked.
pub fn verify_line_free(alphabet: &Alphabet, coloring: &Coloring) -> Result<u64> {
    let mut nvars_alphabet = Alphabet::with_letters(
        &(0..alphabet.k())
            .map(|i| alphabet.letter_char(i as Sym).unwrap())
            .collect::<Vec<_>>(),
        1,
    )?;
    nvars_alphabet.set_max_word_len(nvars_alphabet.max_word_len().max(coloring.len()));
    let mut checked = 0u64;
    for root in nvars_alphabet.words_of_len(1, coloring.len()) {
        if !root.in_sn(1) {
            continue;
        }
        checked += 1;
        let mut seen: Option<u32> = None;
        let mut mono = true;
        for letter in nvars_alphabet.letter_syms() {
            let point = root.substitute(&nvars_alphabet, &[letter])?;
            let color = coloring
                .color_of_word(alphabet, &point)
                .ok_or_else(|| Error::Certificate("coloring is not total".into()))?;
            match seen {
                None => seen = Some(color),
                Some(c) if c != color => {
                    mono = false;
                    break;
                }
                _ => {}
            }
        }
        if mono {
            return Err(Error::Certificate(format!(
                "monochromatic line at root {}",
                nvars_alphabet.display_word(&root)
            )));
        }
    }
    Ok(checked)
}

#[derive(Debug, Clone)]
pub enum HjNumberOutcome {
    /// Least `N <= max` admitting no line-free coloring.
    Found {
        number: usize,
        witnesses: Vec<(usize, Coloring)>,
        cylinder_checks: Vec<(usize, bool)>,
    },
    Unresolved {
        max: usize,
        witnesses: Vec<(usize, Coloring)>,
        cylinder_checks: Vec<(usize, bool)>,
    },
}

/// Least `N <= n_max` such that no `c`-coloring of `A^N` is line-free.
/// Scans upward; the scan stops at the first failure, which monotonicity
/// makes the answer. Each line-free witness found along the way also has
/// its cylinder restriction re-checked for line-freeness rather than
/// assuming the monotone lemma.
pub fn hj_number(k: usize, c: u32, n_max: usize) -> Result<HjNumberOutcome> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    let mut witnesses = Vec::new();
    let mut cylinder_checks = Vec::new();
    for len in 1..=n_max {
        let outcome = search_line_free(k, c, len)?;
        match outcome.coloring {
            Some(coloring) => {
                if len >= 2 {
                    let restricted = coloring.cylinder()?;
                    let ok = matches!(
                        find_mono_line(&restricted, 1)?,
                        LineOutcome::None { .. }
                    );
                    cylinder_checks.push((len, ok));
                }
                witnesses.push((len, coloring));
            }
            None => {
                return Ok(HjNumberOutcome::Found {
                    number: len,
                    witnesses,
                    cylinder_checks,
                })
            }
        }
    }
    Ok(HjNumberOutcome::Unresolved {
        max: n_max,
        witnesses,
        cylinder_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_letter_coloring() -> Coloring {
        // k=2, N=2: color 1 iff the word starts with 'a'
        Coloring::new_fixed(2, 2, vec![1, 1, 2, 2]).unwrap()
    }

    #[test]
    fn find_mono_line_prefers_least_root() {
        let coloring = first_letter_coloring();
        let out = find_mono_line(&coloring, 1).unwrap();
        let LineOutcome::Found {
            line,
            roots_checked,
        } = out
        else {
            panic!("expected a line");
        };
        let alphabet = Alphabet::new(2, 1).unwrap();
        assert_eq!(alphabet.display_word(&line.root), "a#1");
        assert_eq!(
            line.points
                .iter()
                .map(|p| alphabet.display_word(p))
                .collect::<Vec<_>>(),
            vec!["aa", "ab"]
        );
        assert_eq!(line.color, 1);
        assert!(roots_checked >= 1);
        verify_line(&alphabet, &coloring, &line, 1).unwrap();
    }

    #[test]
    fn find_mono_line_constant_coloring_length_one() {
        let coloring = Coloring::new_fixed(2, 1, vec![1, 1]).unwrap();
        let out = find_mono_line(&coloring, 1).unwrap();
        let LineOutcome::Found { line, .. } = out else {
            panic!("expected a line");
        };
        let alphabet = Alphabet::new(2, 1).unwrap();
        assert_eq!(alphabet.display_word(&line.root), "#1");
    }

    #[test]
    fn line_free_trivial_case() {
        let out = search_line_free(2, 2, 1).unwrap();
        let coloring = out.coloring.expect("2 points, 2 colors");
        assert_eq!(coloring.color_of_digits(&[0]), Some(1));
        assert_eq!(coloring.color_of_digits(&[1]), Some(2));
        assert!(matches!(
            find_mono_line(&coloring, 1).unwrap(),
            LineOutcome::None { .. }
        ));
    }

    #[test]
    fn line_free_impossible_at_two_squared() {
        let out = search_line_free(2, 2, 2).unwrap();
        assert!(out.coloring.is_none());
        // dual route agrees
        assert!(search_line_free_exhaustive(2, 2, 2).unwrap().is_none());
    }

    #[test]
    fn backtracking_and_exhaustive_agree_when_solvable() {
        let bt = search_line_free(2, 3, 2).unwrap().coloring.unwrap();
        let ex = search_line_free_exhaustive(2, 3, 2).unwrap().unwrap();
        assert_eq!(bt, ex);
    }

    #[test]
    fn line_free_exists_for_three_letters_at_three() {
        let out = search_line_free(3, 2, 3).unwrap();
        let coloring = out.coloring.expect("line-free coloring should exist");
        let res = find_mono_line(&coloring, 1).unwrap();
        let LineOutcome::None { roots_checked } = res else {
            panic!("constructed coloring has a mono line");
        };
        assert_eq!(roots_checked, 37); // 4^3 - 3^3
        let alphabet = Alphabet::new(3, 1).unwrap();
        assert_eq!(verify_line_free(&alphabet, &coloring).unwrap(), 37);
    }

    #[test]
    fn hj_number_examples() {
        // single letter: every line is a single point
        let out = hj_number(1, 3, 2).unwrap();
        assert!(matches!(out, HjNumberOutcome::Found { number: 1, .. }));

        let out = hj_number(2, 2, 4).unwrap();
        let HjNumberOutcome::Found {
            number,
            cylinder_checks,
            ..
        } = out
        else {
            panic!("expected resolution");
        };
        assert_eq!(number, 2);
        assert!(cylinder_checks.iter().all(|&(_, ok)| ok));

        let out = hj_number(3, 2, 3).unwrap();
        assert!(matches!(out, HjNumberOutcome::Unresolved { max: 3, .. }));
    }

    #[test]
    fn cumulative_coloring_scans_short_lengths_first() {
        // lengths 1 and 2 over k=2: 2 + 4 cells; constant color
        let coloring = Coloring::new_cumulative(2, 2, vec![1; 6]).unwrap();
        let out = find_mono_line(&coloring, 1).unwrap();
        let LineOutcome::Found { line, .. } = out else {
            panic!("expected a line");
        };
        assert_eq!(line.root.len(), 1); // found in the length-1 slice
    }

    #[test]
    fn mono_line_roots_require_every_variable() {
        // 2-variable search on a 2-cell domain is rejected up front
        let coloring = Coloring::new_fixed(2, 1, vec![1, 1]).unwrap();
        assert!(find_mono_line(&coloring, 2).is_err());
        // on N=2, a 2-variable mono line must use both variables
        let coloring = Coloring::new_fixed(2, 2, vec![1, 1, 1, 1]).unwrap();
        let out = find_mono_line(&coloring, 2).unwrap();
        let LineOutcome::Found { line, .. } = out else {
            panic!("expected a line");
        };
        assert!(line.root.in_sn(2));
        assert_eq!(line.points.len(), 4);
    }
}
