//! Finite truncations of adequate partial semigroups.
//!
//! The central example is the finite-sums structure FS over a generator
//! prefix: elements are the nonempty index sets `H ⊆ {1..T}` with their
//! evaluated sums, and the operation is defined exactly on disjoint pairs.
//! FP variants evaluate products (numeric or word concatenation) in
//! increasing index order. Elements are keyed by index set, not by value:
//! distinct index sets with equal sums stay distinct, which is what keeps
//! the operation well defined.
//!
//! An explicit partial Cayley table constructor covers non-FS experiments;
//! the constructor checks partial associativity exhaustively and rejects
//! violations.
//!
//! Adequacy is an infinitary property; the checks here are bounded and say
//! so loudly. A failure whose σ would become nonempty after enlarging the
//! horizon is flagged as horizon exhaustion instead of being passed off as
//! genuine inadequacy.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::util::Combinations;
use crate::words::Word;

/// Element handle inside one truncation; also the canonical order position.
pub type ElemId = usize;

/// Evaluation mode for index-set truncations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsgMode {
    /// Finite sums of numeric generators.
    FsNat,
    /// Finite products of numeric generators, increasing index order.
    FpNat,
    /// Finite products (concatenations) of word generators, increasing
    /// index order.
    FpWord,
}

/// Evaluated element value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PsgValue {
    Nat(u64),
    Word(Word),
    Label(String),
}

/// Cap on the generator prefix length: 2^20 - 1 elements.
pub const MAX_HORIZON: usize = 20;

const MAX_ADEQUACY_SUBSETS: u64 = 5_000_000;

enum PsgKind {
    IndexSets {
        mode: PsgMode,
        gens_nat: Vec<u64>,
        gens_word: Vec<Word>,
        horizon: usize,
        /// Masks in canonical order: support size, then lex on sorted index lists.
        elems: Vec<u32>,
        /// mask -> ElemId (padded with usize::MAX at unused slots).
        id_of_mask: Vec<usize>,
    },
    Table {
        labels: Vec<String>,
        table: Vec<Vec<Option<ElemId>>>,
    },
}

/// A finite truncation of a partial semigroup.
pub struct PsgTruncation {
    kind: PsgKind,
}

fn mask_indices(mask: u32) -> Vec<u32> {
    (0..32)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| i + 1)
        .collect()
}

fn canonical_masks(horizon: usize) -> (Vec<u32>, Vec<usize>) {
    let total = (1u32 << horizon) - 1;
    let mut elems: Vec<u32> = (1..=total).collect();
    elems.sort_by_key(|&m| (m.count_ones(), mask_indices(m)));
    let mut id_of_mask = vec![usize::MAX; 1 << horizon];
    for (id, &m) in elems.iter().enumerate() {
        id_of_mask[m as usize] = id;
    }
    (elems, id_of_mask)
}

impl PsgTruncation {
    fn index_sets(mode: PsgMode, gens_nat: Vec<u64>, gens_word: Vec<Word>) -> Result<Self> {
        let horizon = match mode {
            PsgMode::FpWord => gens_word.len(),
            _ => gens_nat.len(),
        };
        if horizon == 0 {
            return Err(Error::InvalidInput("generator prefix must be nonempty".into()));
        }
        if horizon > MAX_HORIZON {
            return Err(Error::SizeBound(format!(
                "generator prefix of length {horizon} exceeds the cap of {MAX_HORIZON}"
            )));
        }
        if mode == PsgMode::FpNat {
            // reject overflowing truncations up front
            let mut acc: u64 = 1;
            for &g in &gens_nat {
                acc = acc.checked_mul(g).ok_or_else(|| {
                    Error::SizeBound("numeric FP truncation overflows u64".into())
                })?;
            }
        }
        let (elems, id_of_mask) = canonical_masks(horizon);
        Ok(PsgTruncation {
            kind: PsgKind::IndexSets {
                mode,
                gens_nat,
                gens_word,
                horizon,
                elems,
                id_of_mask,
            },
        })
    }

    /// FS truncation over a numeric generator prefix: all 2^T - 1 nonempty
    /// index sets with their sums.
    pub fn fs_prefix_nat(gens: &[u64]) -> Result<Self> {
        Self::index_sets(PsgMode::FsNat, gens.to_vec(), Vec::new())
    }

    /// FP truncation over a numeric generator prefix.
    pub fn fp_prefix_nat(gens: &[u64]) -> Result<Self> {
        Self::index_sets(PsgMode::FpNat, gens.to_vec(), Vec::new())
    }

    /// FP truncation over a word generator prefix (concatenation in
    /// increasing index order).
    pub fn fp_prefix_word(gens: &[Word]) -> Result<Self> {
        Self::index_sets(PsgMode::FpWord, Vec::new(), gens.to_vec())
    }

    /// Explicit partial Cayley table. `entries[i][j]` is the product of
    /// element `i` with element `j`, or `None` where undefined. Partial
    /// associativity is checked exhaustively; violations are rejected.
    pub fn from_table(labels: Vec<String>, entries: Vec<Vec<Option<ElemId>>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidInput("table must have at least one element".into()));
        }
        if n > 200 {
            return Err(Error::SizeBound(format!("table of {n} elements exceeds the cap of 200")));
        }
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("table must be square over the element list".into()));
        }
        for row in &entries {
            for &cell in row {
                if let Some(id) = cell {
                    if id >= n {
                        return Err(Error::InvalidInput(format!(
                            "table entry {id} out of range"
                        )));
                    }
                }
            }
        }
        let t = PsgTruncation {
            kind: PsgKind::Table {
                labels,
                table: entries,
            },
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let left = t.op(x, y).and_then(|xy| t.op(xy, z));
                    let right = t.op(y, z).and_then(|yz| t.op(x, yz));
                    if left.is_some() || right.is_some() {
                        if left != right {
                            return Err(Error::Associativity(format!(
                                "({},{},{}): ({:?}) vs ({:?})",
                                t.display_elem(x),
                                t.display_elem(y),
                                t.display_elem(z),
                                left.map(|e| t.display_elem(e)),
                                right.map(|e| t.display_elem(e)),
                            )));
                        }
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            PsgKind::IndexSets { elems, .. } => elems.len(),
            PsgKind::Table { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Generator prefix length for index-set truncations.
    pub fn horizon(&self) -> Option<usize> {
        match &self.kind {
            PsgKind::IndexSets { horizon, .. } => Some(*horizon),
            PsgKind::Table { .. } => None,
        }
    }

    pub fn is_index_mode(&self) -> bool {
        matches!(self.kind, PsgKind::IndexSets { .. })
    }

    /// Index set of an element (1-based indices), for index-set truncations.
    pub fn indices_of(&self, e: ElemId) -> Option<Vec<u32>> {
        match &self.kind {
            PsgKind::IndexSets { elems, .. } => elems.get(e).map(|&m| mask_indices(m)),
            PsgKind::Table { .. } => None,
        }
    }

    /// Element with the given 1-based index set.
    pub fn elem_by_indices(&self, indices: &[u32]) -> Option<ElemId> {
        match &self.kind {
            PsgKind::IndexSets {
                horizon,
                id_of_mask,
                ..
            } => {
                let mut mask = 0u32;
                for &i in indices {
                    if i == 0 || i as usize > *horizon {
                        return None;
                    }
                    mask |= 1 << (i - 1);
                }
                if mask == 0 {
                    return None;
                }
                let id = id_of_mask[mask as usize];
                (id != usize::MAX).then_some(id)
            }
            PsgKind::Table { .. } => None,
        }
    }

    /// Element with the given label, for table truncations.
    pub fn elem_by_label(&self, label: &str) -> Option<ElemId> {
        match &self.kind {
            PsgKind::Table { labels, .. } => labels.iter().position(|l| l == label),
            PsgKind::IndexSets { .. } => None,
        }
    }

    /// Evaluated value of an element.
    pub fn value(&self, e: ElemId) -> PsgValue {
        match &self.kind {
            PsgKind::IndexSets {
                mode,
                gens_nat,
                gens_word,
                elems,
                ..
            } => {
                let mask = elems[e];
                match mode {
                    PsgMode::FsNat => PsgValue::Nat(
                        mask_indices(mask)
                            .iter()
                            .map(|&i| gens_nat[i as usize - 1])
                            .sum(),
                    ),
                    PsgMode::FpNat => PsgValue::Nat(
                        mask_indices(mask)
                            .iter()
                            .map(|&i| gens_nat[i as usize - 1])
                            .product(),
                    ),
                    PsgMode::FpWord => {
                        let mut acc = Word::empty();
                        for i in mask_indices(mask) {
                            acc = acc.concat(&gens_word[i as usize - 1]);
                        }
                        PsgValue::Word(acc)
                    }
                }
            }
            PsgKind::Table { labels, .. } => PsgValue::Label(labels[e].clone()),
        }
    }

    /// Short serialized form: `H=[1,3]` or the table label. This is the
    /// form `textio::parse_elem_list` accepts.
    pub fn display_elem_short(&self, e: ElemId) -> String {
        match &self.kind {
            PsgKind::IndexSets { .. } => {
                let idx = self.indices_of(e).unwrap_or_default();
                let idx_str = idx
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!("H=[{idx_str}]")
            }
            PsgKind::Table { labels, .. } => labels[e].clone(),
        }
    }

    /// Serialized element form: `H=[1,3]; value=5` or the table label.
    pub fn display_elem(&self, e: ElemId) -> String {
        match &self.kind {
            PsgKind::IndexSets { .. } => {
                let idx = self.indices_of(e).unwrap_or_default();
                let idx_str = idx
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let value = match self.value(e) {
                    PsgValue::Nat(v) => v.to_string(),
                    PsgValue::Word(w) => w.to_string(),
                    PsgValue::Label(l) => l,
                };
                format!("H=[{idx_str}]; value={value}")
            }
            PsgKind::Table { labels, .. } => labels[e].clone(),
        }
    }

    /// Partial operation.
    pub fn op(&self, a: ElemId, b: ElemId) -> Option<ElemId> {
        match &self.kind {
            PsgKind::IndexSets {
                elems, id_of_mask, ..
            } => {
                let (ma, mb) = (elems[a], elems[b]);
                if ma & mb != 0 {
                    return None;
                }
                let id = id_of_mask[(ma | mb) as usize];
                (id != usize::MAX).then_some(id)
            }
            PsgKind::Table { table, .. } => table[a][b],
        }
    }

    /// Left-to-right product of a nonempty element sequence; `None` if any
    /// partial product is undefined.
    pub fn product(&self, elems: &[ElemId]) -> Option<ElemId> {
        let (&first, rest) = elems.split_first()?;
        let mut acc = first;
        for &e in rest {
            acc = self.op(acc, e)?;
        }
        Some(acc)
    }

    /// `phi(g)`: elements `h` with `g * h` defined, in canonical order.
    pub fn phi(&self, g: ElemId) -> Result<Vec<ElemId>> {
        if g >= self.len() {
            return Err(Error::InvalidInput(format!("element {g} not in truncation")));
        }
        Ok((0..self.len()).filter(|&h| self.op(g, h).is_some()).collect())
    }

    /// `sigma(H)`: intersection of `phi` over a nonempty element set. For
    /// index-set truncations this is computed as disjointness from the
    /// union of the supports.
    pub fn sigma(&self, hs: &[ElemId]) -> Result<Vec<ElemId>> {
        if hs.is_empty() {
            return Err(Error::InvalidInput("sigma needs a nonempty element set".into()));
        }
        for &h in hs {
            if h >= self.len() {
                return Err(Error::InvalidInput(format!("element {h} not in truncation")));
            }
        }
        match &self.kind {
            PsgKind::IndexSets { elems, .. } => {
                let union: u32 = hs.iter().map(|&h| elems[h]).fold(0, |a, b| a | b);
                Ok((0..self.len()).filter(|&e| elems[e] & union == 0).collect())
            }
            PsgKind::Table { .. } => Ok((0..self.len())
                .filter(|&e| hs.iter().all(|&h| self.op(h, e).is_some()))
                .collect()),
        }
    }

    /// `g^{-1}A`: elements `h` of `phi(g)` with `g * h ∈ A`.
    pub fn left_quotient(&self, g: ElemId, a: &BTreeSet<ElemId>) -> Result<Vec<ElemId>> {
        if g >= self.len() {
            return Err(Error::InvalidInput(format!("element {g} not in truncation")));
        }
        Ok((0..self.len())
            .filter(|&h| matches!(self.op(g, h), Some(gh) if a.contains(&gh)))
            .collect())
    }

    /// Bounded adequacy check.
    ///
    /// Checks `sigma(H) != ∅` for every subset `H` of at most
    /// `subset_bound` elements, each of support size at most `subset_bound`
    /// (all elements are eligible in table mode, where there is no support).
    /// Subsets are scanned by size, then lexicographically over the
    /// canonical element order; the first failure is reported. For
    /// index-set truncations a failure always carries the horizon
    /// exhaustion flag: enlarging the generator prefix would supply a
    /// disjoint element.
    pub fn is_adequate(&self, subset_bound: usize) -> Result<AdequacyReport> {
        if subset_bound == 0 {
            return Err(Error::InvalidInput("subset bound must be >= 1".into()));
        }
        let eligible: Vec<ElemId> = match &self.kind {
            PsgKind::IndexSets { elems, .. } => (0..self.len())
                .filter(|&e| elems[e].count_ones() as usize <= subset_bound)
                .collect(),
            PsgKind::Table { .. } => (0..self.len()).collect(),
        };
        let mut projected: u64 = 0;
        for size in 1..=subset_bound.min(eligible.len()) {
            projected = projected.saturating_add(binomial(eligible.len() as u64, size as u64));
        }
        if projected > MAX_ADEQUACY_SUBSETS {
            return Err(Error::SizeBound(format!(
                "adequacy check would scan {projected} subsets (cap {MAX_ADEQUACY_SUBSETS})"
            )));
        }

        let mut checked: u64 = 0;
        for size in 1..=subset_bound.min(eligible.len()) {
            let mut combo = Combinations::new(eligible.len(), size);
            while let Some(picks) = combo.next() {
                let subset: Vec<ElemId> = picks.iter().map(|&i| eligible[i]).collect();
                checked += 1;
                if self.sigma(&subset)?.is_empty() {
                    return Ok(AdequacyReport {
                        adequate: false,
                        failing: Some(subset),
                        horizon_exhaustion: self.is_index_mode(),
                        subsets_checked: checked,
                    });
                }
            }
        }
        Ok(AdequacyReport {
            adequate: true,
            failing: None,
            horizon_exhaustion: false,
            subsets_checked: checked,
        })
    }

    /// Bounded adequate-sequence check for a prefix `f(1)..f(len)`.
    ///
    /// Condition (1): the product over every nonempty `H ⊆ {1..len}` is
    /// defined (evaluated in increasing index order). Condition (2), bounded
    /// form: the least `m <= len` such that every product over nonempty
    /// `H ⊆ {m..len}` lies in `sigma(F)`. An empty `F` is taken as the
    /// vacuous constraint (sigma = everything).
    pub fn check_adequate_sequence(
        &self,
        f: &[ElemId],
        big_f: &[ElemId],
    ) -> Result<SeqAdequacyReport> {
        let len = f.len();
        if len < 2 {
            return Err(Error::InvalidInput("sequence prefix must have length >= 2".into()));
        }
        if len > MAX_HORIZON {
            return Err(Error::SizeBound(format!(
                "sequence prefix of length {len} exceeds the cap of {MAX_HORIZON}"
            )));
        }
        for &e in f.iter().chain(big_f) {
            if e >= self.len() {
                return Err(Error::InvalidInput(format!("element {e} not in truncation")));
            }
        }
        let sigma_f: Option<BTreeSet<ElemId>> = if big_f.is_empty() {
            None // vacuous: everything
        } else {
            Some(self.sigma(big_f)?.into_iter().collect())
        };

        let mut failing_h: Option<Vec<usize>> = None;
        'outer: for size in 1..=len {
            let mut combo = Combinations::new(len, size);
            while let Some(picks) = combo.next() {
                let seq: Vec<ElemId> = picks.iter().map(|&i| f[i]).collect();
                if self.product(&seq).is_none() {
                    failing_h = Some(picks.iter().map(|&i| i + 1).collect());
                    break 'outer;
                }
            }
        }

        let mut least_m = None;
        'm_loop: for m in 1..=len {
            let tail = &f[m - 1..];
            for size in 1..=tail.len() {
                let mut combo = Combinations::new(tail.len(), size);
                while let Some(picks) = combo.next() {
                    let seq: Vec<ElemId> = picks.iter().map(|&i| tail[i]).collect();
                    match self.product(&seq) {
                        Some(p) => {
                            if let Some(sf) = &sigma_f {
                                if !sf.contains(&p) {
                                    continue 'm_loop;
                                }
                            }
                        }
                        None => continue 'm_loop,
                    }
                }
            }
            least_m = Some(m);
            break;
        }

        Ok(SeqAdequacyReport {
            products_defined: failing_h.is_none(),
            failing_h,
            least_m,
        })
    }
}

/// Report of a bounded adequacy check.
#[derive(Debug, Clone)]
pub struct AdequacyReport {
    pub adequate: bool,
    pub failing: Option<Vec<ElemId>>,
    pub horizon_exhaustion: bool,
    pub subsets_checked: u64,
}

/// Report of a bounded adequate-sequence check.
#[derive(Debug, Clone)]
pub struct SeqAdequacyReport {
    pub products_defined: bool,
    /// First `H` (1-based positions) with an undefined product, if any.
    pub failing_h: Option<Vec<usize>>,
    /// Least `m` with the tail FP contained in `sigma(F)`, if any.
    pub least_m: Option<usize>,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn values(t: &PsgTruncation) -> Vec<u64> {
        (0..t.len())
            .map(|e| match t.value(e) {
                PsgValue::Nat(v) => v,
                _ => panic!("numeric truncation expected"),
            })
            .collect()
    }

    #[test]
    fn fs_prefix_enumerates_all_index_sets() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2, 4]).unwrap();
        assert_eq!(t.len(), 7);
        let mut vals = values(&t);
        vals.sort();
        assert_eq!(vals, vec![1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn fs_prefix_zero_padding() {
        let t = PsgTruncation::fs_prefix_nat(&[0, 5]).unwrap();
        let one = t.elem_by_indices(&[1]).unwrap();
        let two = t.elem_by_indices(&[2]).unwrap();
        let both = t.elem_by_indices(&[1, 2]).unwrap();
        assert_eq!(t.value(one), PsgValue::Nat(0));
        assert_eq!(t.value(two), PsgValue::Nat(5));
        assert_eq!(t.value(both), PsgValue::Nat(5));
        // distinct elements despite the equal value
        assert_ne!(two, both);
    }

    #[test]
    fn fp_word_prefix_concatenates_in_index_order() {
        let a = Alphabet::new(1, 1).unwrap();
        let v = a.parse_word("#1").unwrap();
        let vv = a.parse_word("#1#1").unwrap();
        let t = PsgTruncation::fp_prefix_word(&[v.clone(), vv.clone()]).unwrap();
        let both = t.elem_by_indices(&[1, 2]).unwrap();
        assert_eq!(
            t.value(both),
            PsgValue::Word(a.parse_word("#1#1#1").unwrap())
        );
    }

    #[test]
    fn phi_examples() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2, 4]).unwrap();
        let g = t.elem_by_indices(&[1]).unwrap();
        let phi = t.phi(g).unwrap();
        // exactly the three elements supported inside {2,3}
        assert_eq!(phi.len(), 3);
        for e in phi {
            assert!(!t.indices_of(e).unwrap().contains(&1));
        }
        let full = t.elem_by_indices(&[1, 2, 3]).unwrap();
        assert!(t.phi(full).unwrap().is_empty());

        let t2 = PsgTruncation::fs_prefix_nat(&[1, 2]).unwrap();
        let g2 = t2.elem_by_indices(&[2]).unwrap();
        assert_eq!(t2.phi(g2).unwrap(), vec![t2.elem_by_indices(&[1]).unwrap()]);
    }

    #[test]
    fn sigma_examples() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2, 4]).unwrap();
        let e1 = t.elem_by_indices(&[1]).unwrap();
        let e2 = t.elem_by_indices(&[2]).unwrap();
        let e23 = t.elem_by_indices(&[2, 3]).unwrap();
        assert_eq!(t.sigma(&[e1]).unwrap(), t.phi(e1).unwrap());
        assert_eq!(
            t.sigma(&[e1, e2]).unwrap(),
            vec![t.elem_by_indices(&[3]).unwrap()]
        );
        assert!(t.sigma(&[e1, e23]).unwrap().is_empty());
        assert!(t.sigma(&[]).is_err());
    }

    #[test]
    fn sigma_matches_phi_intersection_oracle() {
        let t = PsgTruncation::fs_prefix_nat(&[3, 1, 4, 1, 5]).unwrap();
        let subsets: Vec<Vec<ElemId>> = vec![
            vec![0],
            vec![0, 1],
            vec![2, 5, 9],
            vec![t.len() - 1],
            vec![1, 2, 3, 4],
        ];
        for hs in subsets {
            let smart = t.sigma(&hs).unwrap();
            let mut oracle: Option<BTreeSet<ElemId>> = None;
            for &h in &hs {
                let phi: BTreeSet<ElemId> = t.phi(h).unwrap().into_iter().collect();
                oracle = Some(match oracle {
                    None => phi,
                    Some(acc) => acc.intersection(&phi).copied().collect(),
                });
            }
            let oracle: Vec<ElemId> = oracle.unwrap().into_iter().collect();
            assert_eq!(smart, oracle);
        }
    }

    #[test]
    fn left_quotient_examples() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2]).unwrap();
        let g = t.elem_by_indices(&[1]).unwrap();
        let target = t.elem_by_indices(&[1, 2]).unwrap();
        let a: BTreeSet<ElemId> = [target].into_iter().collect();
        assert_eq!(
            t.left_quotient(g, &a).unwrap(),
            vec![t.elem_by_indices(&[2]).unwrap()]
        );
        assert!(t.left_quotient(g, &BTreeSet::new()).unwrap().is_empty());
        let all: BTreeSet<ElemId> = (0..t.len()).collect();
        assert_eq!(t.left_quotient(g, &all).unwrap(), t.phi(g).unwrap());
    }

    #[test]
    fn left_quotient_matches_comprehension_oracle() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2, 4, 8]).unwrap();
        let a: BTreeSet<ElemId> = (0..t.len()).step_by(3).collect();
        for g in 0..t.len() {
            let smart = t.left_quotient(g, &a).unwrap();
            let oracle: Vec<ElemId> = t
                .phi(g)
                .unwrap()
                .into_iter()
                .filter(|&h| a.contains(&t.op(g, h).unwrap()))
                .collect();
            assert_eq!(smart, oracle);
        }
    }

    #[test]
    fn adequacy_single_generator_fails() {
        let t = PsgTruncation::fs_prefix_nat(&[7]).unwrap();
        let rep = t.is_adequate(1).unwrap();
        assert!(!rep.adequate);
        assert_eq!(rep.failing, Some(vec![t.elem_by_indices(&[1]).unwrap()]));
        assert!(rep.horizon_exhaustion);
    }

    #[test]
    fn adequacy_three_generators_exhausts_at_bound_two() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2, 4]).unwrap();
        let rep = t.is_adequate(2).unwrap();
        assert!(!rep.adequate);
        assert!(rep.horizon_exhaustion);
        let failing = rep.failing.unwrap();
        // union of the supports consumes every index
        let union: BTreeSet<u32> = failing
            .iter()
            .flat_map(|&e| t.indices_of(e).unwrap())
            .collect();
        assert_eq!(union, [1, 2, 3].into_iter().collect());
        assert!(t.sigma(&failing).unwrap().is_empty());
    }

    #[test]
    fn adequacy_six_generators_passes_at_bound_two() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2, 4, 8, 16, 32]).unwrap();
        let rep = t.is_adequate(2).unwrap();
        assert!(rep.adequate, "failing: {:?}", rep.failing);
        assert!(!rep.horizon_exhaustion);
    }

    #[test]
    fn adequate_sequence_examples() {
        let t = PsgTruncation::fs_prefix_nat(&[1, 2, 4, 8, 16, 32]).unwrap();
        // f(t) = H={t}
        let f: Vec<ElemId> = (1..=6)
            .map(|i| t.elem_by_indices(&[i]).unwrap())
            .collect();
        let big_f = vec![t.elem_by_indices(&[1]).unwrap()];
        let rep = t.check_adequate_sequence(&f, &big_f).unwrap();
        assert!(rep.products_defined);
        assert_eq!(rep.least_m, Some(2));

        // constant sequence: products collide at H={1,2}
        let c = t.elem_by_indices(&[1]).unwrap();
        let rep = t.check_adequate_sequence(&[c, c, c], &big_f).unwrap();
        assert!(!rep.products_defined);
        assert_eq!(rep.failing_h, Some(vec![1, 2]));

        // f(t) = H={2t-1, 2t}, F = {H={1,2}}
        let f: Vec<ElemId> = (1..=3)
            .map(|i| t.elem_by_indices(&[2 * i - 1, 2 * i]).unwrap())
            .collect();
        let big_f = vec![t.elem_by_indices(&[1, 2]).unwrap()];
        let rep = t.check_adequate_sequence(&f, &big_f).unwrap();
        assert!(rep.products_defined);
        assert_eq!(rep.least_m, Some(2));
    }

    #[test]
    fn table_constructor_validates_associativity() {
        // left-zero band on two elements: xy = x, associative
        let ok = PsgTruncation::from_table(
            vec!["x".into(), "y".into()],
            vec![vec![Some(0), Some(0)], vec![Some(1), Some(1)]],
        );
        assert!(ok.is_ok());

        // x*x = y, x*y = x, y undefined elsewhere: (xx)x = xx = y defined,
        // x(xx) = xy = x, mismatch
        let bad = PsgTruncation::from_table(
            vec!["x".into(), "y".into()],
            vec![vec![Some(1), Some(0)], vec![None, None]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn fs_op_commutes_where_defined() {
        let t = PsgTruncation::fs_prefix_nat(&[2, 3, 5]).unwrap();
        for a in 0..t.len() {
            for b in 0..t.len() {
                assert_eq!(t.op(a, b), t.op(b, a));
            }
        }
    }
}
