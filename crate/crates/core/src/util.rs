//! Small enumeration helpers shared by the search engines.

/// Lexicographic k-combinations of `0..n`, yielded as sorted index slices.
pub struct Combinations {
    n: usize,
    picks: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            picks: (0..k).collect(),
            started: false,
            done: k > n || k == 0,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.picks);
        }
        let k = self.picks.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.picks[i] < self.n - (k - i) {
                self.picks[i] += 1;
                for j in i + 1..k {
                    self.picks[j] = self.picks[j - 1] + 1;
                }
                return Some(&self.picks);
            }
        }
    }

    /// Collect all combinations (for small spaces).
    pub fn collect_all(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut combo = Combinations::new(n, k);
        let mut out = Vec::new();
        while let Some(picks) = combo.next() {
            out.push(picks.to_vec());
        }
        out
    }
}

/// Lexicographic tuples of fixed length over `0..base`.
pub struct TupleOdometer {
    base: usize,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl TupleOdometer {
    pub fn new(base: usize, len: usize) -> Self {
        TupleOdometer {
            base,
            digits: vec![0; len],
            started: false,
            done: base == 0 && len > 0,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.base {
                return Some(&self.digits);
            }
            self.digits[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let all = Combinations::collect_all(4, 2);
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert!(Combinations::collect_all(3, 4).is_empty());
    }

    #[test]
    fn odometer_counts_in_lex_order() {
        let mut odo = TupleOdometer::new(2, 2);
        let mut seen = Vec::new();
        while let Some(d) = odo.next() {
            seen.push(d.to_vec());
        }
        assert_eq!(
            seen,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }
}
