//! Finite-alphabet topological Markov chains.
//!
//! A [`Shift`] is a 0/1 transition matrix over the alphabet `0..size` together
//! with the period and mixing flag of its transition graph. Words are plain
//! letter sequences; the admissibility check lives on the shift.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("transition matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("row {0} of the transition matrix has no admissible successor")]
    ZeroRow(usize),
    #[error("letter {letter} is outside the alphabet of size {size}")]
    LetterOutOfRange { letter: usize, size: usize },
    #[error("word {0:?} is not admissible")]
    InadmissibleWord(Vec<usize>),
    #[error("shift is not topologically mixing (period {period}, transitive: {transitive})")]
    NotMixing { period: usize, transitive: bool },
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
}

/// A one-sided topological Markov chain on a finite alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shift {
    size: usize,
    transitions: Vec<Vec<bool>>,
    period: usize,
    transitive: bool,
    mixing: bool,
}

impl Shift {
    /// Validates the matrix and computes period and mixing.
    pub fn new(transitions: Vec<Vec<bool>>) -> Result<Self, ShiftError> {
        let size = transitions.len();
        if size == 0 {
            return Err(ShiftError::EmptyAlphabet);
        }
        for (row, r) in transitions.iter().enumerate() {
            if r.len() != size {
                return Err(ShiftError::NotSquare {
                    row,
                    len: r.len(),
                    expected: size,
                });
            }
        }
        if let Some(row) = transitions.iter().position(|r| !r.iter().any(|&b| b)) {
            return Err(ShiftError::ZeroRow(row));
        }
        let (period, transitive) = period_of(&transitions);
        Ok(Shift {
            size,
            transitions,
            period,
            transitive,
            mixing: transitive && period == 1,
        })
    }

    /// Builds a shift from an integer 0/1 matrix.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self, ShiftError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect())
    }

    /// All transitions allowed except the listed 2-blocks.
    pub fn from_forbidden(size: usize, forbidden: &[(usize, usize)]) -> Result<Self, ShiftError> {
        let mut t = vec![vec![true; size]; size];
        for &(i, j) in forbidden {
            if i >= size || j >= size {
                return Err(ShiftError::LetterOutOfRange { letter: i.max(j), size });
            }
            t[i][j] = false;
        }
        Self::new(t)
    }

    pub fn full(size: usize) -> Result<Self, ShiftError> {
        Self::new(vec![vec![true; size]; size])
    }

    /// The golden-mean shift: `11` forbidden.
    pub fn golden_mean() -> Self {
        Self::from_forbidden(2, &[(1, 1)]).expect("golden mean matrix is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.size
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    pub fn is_mixing(&self) -> bool {
        self.mixing
    }

    pub fn is_full(&self) -> bool {
        self.transitions.iter().all(|r| r.iter().all(|&b| b))
    }

    pub fn transitions(&self) -> &[Vec<bool>] {
        &self.transitions
    }

    #[inline]
    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.transitions[from][to]
    }

    pub fn successors(&self, letter: usize) -> impl Iterator<Item = usize> + '_ {
        self.transitions[letter]
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
    }

    pub fn is_admissible(&self, letters: &[usize]) -> bool {
        letters.iter().all(|&l| l < self.size) && letters.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// Checks admissibility and wraps the letters as a [`Word`].
    pub fn word(&self, letters: &[usize]) -> Result<Word, ShiftError> {
        if let Some(&l) = letters.iter().find(|&&l| l >= self.size) {
            return Err(ShiftError::LetterOutOfRange {
                letter: l,
                size: self.size,
            });
        }
        if !self.is_admissible(letters) {
            return Err(ShiftError::InadmissibleWord(letters.to_vec()));
        }
        Ok(Word(letters.to_vec()))
    }

    /// Admissible words of length `n` in lexicographic order.
    ///
    /// `prefix` restricts to words beginning with the given letters, `end`
    /// keeps only words whose last letter may be followed by `end`; with both
    /// this is the set of words starting with `a` that can be followed by `b`.
    pub fn enumerate_words(&self, n: usize, prefix: Option<&[usize]>, end: Option<usize>) -> Vec<Word> {
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        let prefix = prefix.unwrap_or(&[]);
        if prefix.len() > n || !self.is_admissible(prefix) {
            return out;
        }
        if end.is_some_and(|b| b >= self.size) {
            return out;
        }
        let mut buf = prefix.to_vec();
        self.extend_words(n, end, &mut buf, &mut out);
        out
    }

    fn extend_words(&self, n: usize, end: Option<usize>, buf: &mut Vec<usize>, out: &mut Vec<Word>) {
        if buf.len() == n {
            if end.is_none_or(|b| self.allows(buf[n - 1], b)) {
                out.push(Word(buf.clone()));
            }
            return;
        }
        let candidates: Vec<usize> = match buf.last() {
            None => (0..self.size).collect(),
            Some(&l) => self.successors(l).collect(),
        };
        for c in candidates {
            buf.push(c);
            self.extend_words(n, end, buf, out);
            buf.pop();
        }
    }

    /// Number of admissible words of length `n`, computed by counting paths.
    pub fn count_words(&self, n: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        let mut v = vec![1u128; self.size];
        for _ in 1..n {
            let mut next = vec![0u128; self.size];
            for (i, &c) in v.iter().enumerate() {
                for j in self.successors(i) {
                    next[j] += c;
                }
            }
            v = next;
        }
        v.iter().sum()
    }

    /// Verifies the big images and preimages property.
    ///
    /// For a finite alphabet the property reduces to mixing; the witness set is
    /// chosen greedily by letter index so that every letter has an admissible
    /// successor and predecessor inside it.
    pub fn check_bip(&self) -> Result<BipReport, ShiftError> {
        if !self.mixing {
            return Err(ShiftError::NotMixing {
                period: self.period,
                transitive: self.transitive,
            });
        }
        let m = self.size;
        // need_image[v]: v still lacks beta with (v beta) admissible
        let mut need_image = vec![true; m];
        let mut need_preimage = vec![true; m];
        let mut witness = Vec::new();
        while need_image.iter().chain(need_preimage.iter()).any(|&b| b) {
            let gain = |beta: usize| {
                (0..m).filter(|&v| need_image[v] && self.allows(v, beta)).count()
                    + (0..m).filter(|&v| need_preimage[v] && self.allows(beta, v)).count()
            };
            let best = (0..m)
                .filter(|b| !witness.contains(b))
                .max_by(|&a, &b| gain(a).cmp(&gain(b)).then(b.cmp(&a)))
                .expect("mixing shift always admits a cover");
            for v in 0..m {
                if self.allows(v, best) {
                    need_image[v] = false;
                }
                if self.allows(best, v) {
                    need_preimage[v] = false;
                }
            }
            witness.push(best);
        }
        witness.sort_unstable();
        Ok(BipReport { mixing: true, witness })
    }
}

/// Period of the transition graph and whether it is strongly connected.
///
/// The period is the gcd of all cycle lengths, taken over every strongly
/// connected component that carries a cycle.
fn period_of(t: &[Vec<bool>]) -> (usize, bool) {
    let n = t.len();
    let comps = strongly_connected_components(t);
    let transitive = comps.iter().max().is_none_or(|&c| c == 0) && n > 0;
    let mut g = 0usize;
    let ncomp = comps.iter().max().map_or(0, |&c| c + 1);
    for c in 0..ncomp {
        let members: Vec<usize> = (0..n).filter(|&v| comps[v] == c).collect();
        let root = members[0];
        // BFS levels restricted to the component
        let mut level = vec![usize::MAX; n];
        level[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if t[u][v] && comps[v] == c && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for &u in &members {
            for &v in &members {
                if t[u][v] {
                    let d = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs() as usize;
                    g = gcd(g, d);
                }
            }
        }
    }
    (g.max(1), transitive)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Tarjan's algorithm; returns component ids in reverse topological order.
fn strongly_connected_components(t: &[Vec<bool>]) -> Vec<usize> {
    struct State<'a> {
        t: &'a [Vec<bool>],
        index: Vec<usize>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }
    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = s.next_index;
        s.low[v] = s.next_index;
        s.next_index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for w in 0..s.t.len() {
            if !s.t[v][w] {
                continue;
            }
            if s.index[w] == usize::MAX {
                visit(s, w);
                s.low[v] = s.low[v].min(s.low[w]);
            } else if s.on_stack[w] {
                s.low[v] = s.low[v].min(s.index[w]);
            }
        }
        if s.low[v] == s.index[v] {
            loop {
                let w = s.stack.pop().expect("tarjan stack");
                s.on_stack[w] = false;
                s.comp[w] = s.next_comp;
                if w == v {
                    break;
                }
            }
            s.next_comp += 1;
        }
    }
    let n = t.len();
    let mut s = State {
        t,
        index: vec![usize::MAX; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![0; n],
        next_index: 0,
        next_comp: 0,
    };
    for v in 0..n {
        if s.index[v] == usize::MAX {
            visit(&mut s, v);
        }
    }
    s.comp
}

/// An admissible word. Construct through [`Shift::word`] or enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_letters(self) -> Vec<usize> {
        self.0
    }
}

impl AsRef<[usize]> for Word {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipReport {
    pub mixing: bool,
    /// Letters every other letter can reach in one step and be reached from.
    pub witness: Vec<usize>,
}

/// An alphabet involution compatible with the transition matrix:
/// `(v w)` is admissible iff `(w† v†)` is.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Involution {
    dagger: Vec<usize>,
}

impl Involution {
    pub fn new(shift: &Shift, dagger: Vec<usize>) -> Result<Self, ShiftError> {
        let m = shift.alphabet_size();
        if dagger.len() != m {
            return Err(ShiftError::InvalidInvolution(format!(
                "expected {m} images, got {}",
                dagger.len()
            )));
        }
        if let Some(&l) = dagger.iter().find(|&&l| l >= m) {
            return Err(ShiftError::InvalidInvolution(format!("image {l} outside alphabet")));
        }
        for (w, &d) in dagger.iter().enumerate() {
            if dagger[d] != w {
                return Err(ShiftError::InvalidInvolution(format!("({w}†)† = {} != {w}", dagger[d])));
            }
        }
        for v in 0..m {
            for w in 0..m {
                if shift.allows(v, w) != shift.allows(dagger[w], dagger[v]) {
                    return Err(ShiftError::InvalidInvolution(format!(
                        "({v} {w}) and ({} {}) disagree on admissibility",
                        dagger[w], dagger[v]
                    )));
                }
            }
        }
        Ok(Involution { dagger })
    }

    pub fn identity(shift: &Shift) -> Result<Self, ShiftError> {
        Self::new(shift, (0..shift.alphabet_size()).collect())
    }

    #[inline]
    pub fn letter(&self, l: usize) -> usize {
        self.dagger[l]
    }

    pub fn images(&self) -> &[usize] {
        &self.dagger
    }

    /// `(w_1 … w_n)† = (w_n† … w_1†)`.
    pub fn dagger_letters(&self, letters: &[usize]) -> Vec<usize> {
        letters.iter().rev().map(|&l| self.dagger[l]).collect()
    }

    pub fn dagger_word(&self, word: &Word) -> Word {
        Word(self.dagger_letters(word.letters()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_sum(shift: &Shift, n: usize) -> u128 {
        // independent oracle: entry sum of A^(n-1) by dense integer products
        let m = shift.alphabet_size();
        let a: Vec<Vec<u128>> = shift
            .transitions()
            .iter()
            .map(|r| r.iter().map(|&b| b as u128).collect())
            .collect();
        let mut p: Vec<Vec<u128>> = (0..m).map(|i| (0..m).map(|j| (i == j) as u128).collect()).collect();
        for _ in 1..n {
            let mut q = vec![vec![0u128; m]; m];
            for i in 0..m {
                for k in 0..m {
                    for j in 0..m {
                        q[i][j] += p[i][k] * a[k][j];
                    }
                }
            }
            p = q;
        }
        p.iter().flatten().sum()
    }

    #[test]
    fn full_two_shift_is_mixing() {
        let s = Shift::full(2).unwrap();
        assert!(s.is_mixing());
        assert_eq!(s.period(), 1);
    }

    #[test]
    fn flip_matrix_has_period_two() {
        let s = Shift::from_matrix(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(s.is_transitive());
        assert!(!s.is_mixing());
        assert_eq!(s.period(), 2);
    }

    #[test]
    fn golden_mean_square_is_positive() {
        let s = Shift::golden_mean();
        assert!(s.is_mixing());
        assert_eq!(s.period(), 1);
        // oracle: A^2 strictly positive
        let a = s.transitions();
        for i in 0..2 {
            for j in 0..2 {
                assert!((0..2).any(|k| a[i][k] && a[k][j]));
            }
        }
    }

    #[test]
    fn rejects_zero_rows_and_ragged_matrices() {
        assert_eq!(
            Shift::from_matrix(&[vec![1, 1], vec![0, 0]]),
            Err(ShiftError::ZeroRow(1))
        );
        assert!(matches!(
            Shift::from_matrix(&[vec![1, 1], vec![1]]),
            Err(ShiftError::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn reducible_matrix_is_not_transitive() {
        // 0 -> 0,1 ; 1 -> 1
        let s = Shift::from_matrix(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!s.is_transitive());
        assert!(!s.is_mixing());
        assert_eq!(s.period(), 1);
    }

    #[test]
    fn period_three_cycle_with_chord() {
        // 0->1->2->0 plus 0->2 : cycles of length 3 and 2, gcd 1
        let s = Shift::from_matrix(&[vec![0, 1, 1], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(s.period(), 1);
        let s = Shift::from_matrix(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(s.period(), 3);
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(Shift::full(2).unwrap().enumerate_words(2, None, None).len(), 4);
        let g = Shift::golden_mean().enumerate_words(3, None, None);
        let got: Vec<Vec<usize>> = g.into_iter().map(Word::into_letters).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
                vec![1, 0, 0],
                vec![1, 0, 1]
            ]
        );
        assert_eq!(Shift::full(3).unwrap().enumerate_words(2, Some(&[0]), None).len(), 3);
    }

    #[test]
    fn constrained_enumeration() {
        let g = Shift::golden_mean();
        // words of length 3 starting with 1 that can be followed by 1
        let w = g.enumerate_words(3, Some(&[1]), Some(1));
        let got: Vec<Vec<usize>> = w.into_iter().map(Word::into_letters).collect();
        assert_eq!(got, vec![vec![1, 0, 0]]);
        assert!(g.enumerate_words(2, Some(&[1, 1]), None).is_empty());
    }

    #[test]
    fn word_counts_match_matrix_powers() {
        let shifts = [
            Shift::golden_mean(),
            Shift::full(3).unwrap(),
            Shift::from_forbidden(4, &[(0, 2), (1, 3), (2, 0), (3, 1)]).unwrap(),
        ];
        for s in &shifts {
            for n in 1..=7 {
                let oracle = power_sum(s, n);
                assert_eq!(s.enumerate_words(n, None, None).len() as u128, oracle);
                assert_eq!(s.count_words(n), oracle);
            }
        }
    }

    #[test]
    fn mixing_gives_all_connecting_lengths() {
        // boolean matrix powers as the oracle for nonempty connecting sets
        let shifts = [
            Shift::golden_mean(),
            Shift::from_forbidden(4, &[(0, 2), (1, 3), (2, 0), (3, 1)]).unwrap(),
        ];
        for s in &shifts {
            let m = s.alphabet_size();
            let a = s.transitions();
            // reach[a][b]: some word of the current length starts at a and can be followed by b
            let mut reach: Vec<Vec<bool>> = a.to_vec();
            for n in 1..m * m + 4 {
                if n >= m * m {
                    assert!(reach.iter().flatten().all(|&x| x), "n={n}");
                }
                if n <= 6 {
                    for x in 0..m {
                        for y in 0..m {
                            let nonempty = !s.enumerate_words(n, Some(&[x]), Some(y)).is_empty();
                            assert_eq!(nonempty, reach[x][y]);
                        }
                    }
                }
                reach = (0..m)
                    .map(|x| (0..m).map(|y| (0..m).any(|k| reach[x][k] && a[k][y])).collect())
                    .collect();
            }
        }
    }

    #[test]
    fn bip_witnesses() {
        assert_eq!(Shift::full(5).unwrap().check_bip().unwrap().witness, vec![0]);
        assert_eq!(Shift::golden_mean().check_bip().unwrap().witness, vec![0]);
        let flip = Shift::from_matrix(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(flip.check_bip(), Err(ShiftError::NotMixing { period: 2, .. })));
    }

    #[test]
    fn bip_witness_covers_rows_and_columns() {
        let s = Shift::from_matrix(&[vec![0, 1, 0, 1], vec![0, 0, 1, 1], vec![1, 0, 0, 0], vec![1, 1, 0, 0]]).unwrap();
        let rep = s.check_bip().unwrap();
        for v in 0..4 {
            assert!(rep.witness.iter().any(|&b| s.allows(v, b)));
            assert!(rep.witness.iter().any(|&b| s.allows(b, v)));
        }
    }

    #[test]
    fn dagger_examples() {
        let full = Shift::full(3).unwrap();
        let id = Involution::identity(&full).unwrap();
        let w = full.word(&[0, 1, 2]).unwrap();
        assert_eq!(id.dagger_word(&w).letters(), &[2, 1, 0]);

        // a, b, a^-1, b^-1 with a† = a^-1
        let f2 = Shift::full(4).unwrap();
        let inv = Involution::new(&f2, vec![2, 3, 0, 1]).unwrap();
        let w = f2.word(&[0, 1]).unwrap();
        assert_eq!(inv.dagger_word(&w).letters(), &[3, 2]);
    }

    #[test]
    fn rejects_bad_involutions() {
        let g = Shift::golden_mean();
        // swapping 0 and 1 maps the admissible (0 1) to (0 1) but (0 0) to (1 1)
        assert!(matches!(
            Involution::new(&g, vec![1, 0]),
            Err(ShiftError::InvalidInvolution(_))
        ));
        let f = Shift::full(3).unwrap();
        assert!(Involution::new(&f, vec![1, 2, 0]).is_err());
    }

    #[test]
    fn dagger_is_an_admissibility_preserving_involution() {
        let shift = Shift::from_forbidden(4, &[(0, 2), (1, 3), (2, 0), (3, 1)]).unwrap();
        let inv = Involution::new(&shift, vec![2, 3, 0, 1]).unwrap();
        for n in 1..=6 {
            for w in shift.enumerate_words(n, None, None) {
                let d = inv.dagger_word(&w);
                assert!(shift.is_admissible(d.letters()));
                assert_eq!(inv.dagger_word(&d), w);
            }
        }
    }
}
