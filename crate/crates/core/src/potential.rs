//! Locally constant potentials and their thermodynamic data.
//!
//! A potential of memory `k` assigns a log-weight to every admissible
//! `k`-block. Everything downstream (Birkhoff sums, partition functions, the
//! Ruelle operator restricted to functions of `k` coordinates, Gibbs
//! measures) is exact for such potentials.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::numeric::{line_fit, log_sum_exp};
use crate::sft::{Involution, Shift, ShiftError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error("memory must be at least 1")]
    ZeroMemory,
    #[error("no log-weight given for admissible block {0:?}")]
    MissingBlock(Vec<usize>),
    #[error("block {0:?} is not an admissible block of the declared memory")]
    UnknownBlock(Vec<usize>),
    #[error("log-weight of block {block:?} is not finite ({value})")]
    NonFinite { block: Vec<usize>, value: f64 },
    #[error("word {0:?} is not admissible")]
    InadmissibleWord(Vec<usize>),
    #[error("tail context is inadmissible or has the wrong length for word {word:?}")]
    InadmissibleContext { word: Vec<usize> },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("potential is not normalized: leading eigenvalue {0}")]
    NotNormalized(f64),
    #[error("symmetry defects requested without an involution")]
    InvolutionMissing,
    #[error("range of word lengths is empty or too short to fit")]
    EmptyRange,
}

/// How the `k − 1` symbols after a word are supplied to a Birkhoff sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailContext<'a> {
    /// The word is repeated forever; it must be closed under the shift.
    Periodic,
    /// The word is followed by exactly `k − 1` given symbols.
    Follow(&'a [usize]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    shift: Shift,
    memory: usize,
    blocks: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    log_weights: Vec<f64>,
}

impl Potential {
    /// Builds a potential from an explicit table of log-weights, one per
    /// admissible `memory`-block.
    pub fn new(shift: &Shift, memory: usize, table: &BTreeMap<Vec<usize>, f64>) -> Result<Self, PotentialError> {
        if memory == 0 {
            return Err(PotentialError::ZeroMemory);
        }
        let blocks = admissible_blocks(shift, memory);
        let index: HashMap<Vec<usize>, usize> = blocks.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        if let Some(extra) = table.keys().find(|b| !index.contains_key(*b)) {
            return Err(PotentialError::UnknownBlock(extra.clone()));
        }
        let mut log_weights = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let v = *table.get(b).ok_or_else(|| PotentialError::MissingBlock(b.clone()))?;
            if !v.is_finite() {
                return Err(PotentialError::NonFinite {
                    block: b.clone(),
                    value: v,
                });
            }
            log_weights.push(v);
        }
        Ok(Potential {
            shift: shift.clone(),
            memory,
            blocks,
            index,
            log_weights,
        })
    }

    /// Builds a potential by evaluating `f` on every admissible block.
    pub fn from_fn<F>(shift: &Shift, memory: usize, mut f: F) -> Result<Self, PotentialError>
    where
        F: FnMut(&[usize]) -> f64,
    {
        if memory == 0 {
            return Err(PotentialError::ZeroMemory);
        }
        let table: BTreeMap<Vec<usize>, f64> = admissible_blocks(shift, memory)
            .into_iter()
            .map(|b| {
                let v = f(&b);
                (b, v)
            })
            .collect();
        Self::new(shift, memory, &table)
    }

    /// Memory-1 potential with the same log-weight on every letter.
    pub fn constant(shift: &Shift, log_weight: f64) -> Result<Self, PotentialError> {
        Self::from_fn(shift, 1, |_| log_weight)
    }

    /// Memory-1 potential with `log φ|[i] = log_weights[i]`.
    pub fn from_letter_weights(shift: &Shift, log_weights: &[f64]) -> Result<Self, PotentialError> {
        if log_weights.len() != shift.alphabet_size() {
            return Err(PotentialError::MissingBlock(vec![log_weights.len()]));
        }
        Self::from_fn(shift, 1, |b| log_weights[b[0]])
    }

    pub fn shift(&self) -> &Shift {
        &self.shift
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Admissible blocks of length `memory`, lexicographic.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn block_index(&self, block: &[usize]) -> Option<usize> {
        self.index.get(block).copied()
    }

    pub fn log_weight(&self, block: &[usize]) -> Option<f64> {
        self.block_index(block).map(|i| self.log_weights[i])
    }

    /// Log-weights as a block table, lexicographic.
    pub fn table(&self) -> BTreeMap<Vec<usize>, f64> {
        self.blocks
            .iter()
            .cloned()
            .zip(self.log_weights.iter().copied())
            .collect()
    }

    /// The same function regarded as a potential of larger memory.
    pub fn lift(&self, memory: usize) -> Result<Self, PotentialError> {
        if memory <= self.memory {
            return Ok(self.clone());
        }
        let k = self.memory;
        Self::from_fn(&self.shift, memory, |b| {
            self.log_weight(&b[..k])
                .expect("prefix of admissible block is admissible")
        })
    }

    /// `log Φ_n` along `word` with the given tail.
    pub fn birkhoff_log_weight(&self, word: &[usize], tail: TailContext<'_>) -> Result<f64, PotentialError> {
        let n = word.len();
        if n == 0 || !self.shift.is_admissible(word) {
            return Err(PotentialError::InadmissibleWord(word.to_vec()));
        }
        let k = self.memory;
        let bad = || PotentialError::InadmissibleContext { word: word.to_vec() };
        let mut block = Vec::with_capacity(k);
        let mut total = 0.0;
        match tail {
            TailContext::Periodic => {
                if !self.shift.allows(word[n - 1], word[0]) {
                    return Err(bad());
                }
                for j in 0..n {
                    block.clear();
                    block.extend((0..k).map(|i| word[(j + i) % n]));
                    total += self.log_weight(&block).ok_or_else(bad)?;
                }
            }
            TailContext::Follow(ctx) => {
                if ctx.len() != k - 1 {
                    return Err(bad());
                }
                if let Some(&c0) = ctx.first() {
                    if c0 >= self.shift.alphabet_size()
                        || !self.shift.allows(word[n - 1], c0)
                        || !self.shift.is_admissible(ctx)
                    {
                        return Err(bad());
                    }
                }
                for j in 0..n {
                    block.clear();
                    block.extend((0..k).map(|i| {
                        let p = j + i;
                        if p < n {
                            word[p]
                        } else {
                            ctx[p - n]
                        }
                    }));
                    total += self.log_weight(&block).ok_or_else(bad)?;
                }
            }
        }
        Ok(total)
    }

    /// Admissible tails of length `k − 1` that may follow `word`.
    pub fn tail_contexts(&self, word: &[usize]) -> Vec<Vec<usize>> {
        let k = self.memory;
        if k == 1 {
            return vec![Vec::new()];
        }
        let last = *word.last().expect("nonempty word");
        self.shift
            .enumerate_words(k - 1, None, None)
            .into_iter()
            .map(|w| w.into_letters())
            .filter(|t| self.shift.allows(last, t[0]))
            .collect()
    }
}

/// All admissible words of length `k`, lexicographic.
pub fn admissible_blocks(shift: &Shift, k: usize) -> Vec<Vec<usize>> {
    shift
        .enumerate_words(k, None, None)
        .into_iter()
        .map(|w| w.into_letters())
        .collect()
}

/// Sparse Ruelle matrix on `k`-blocks: `(M f)(u) = Σ_v φ(v) f(v)` over blocks
/// `v` that can precede `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    blocks: Vec<Vec<usize>>,
    /// `pre[u]` lists `(v, φ(v))` for each predecessor block.
    pre: Vec<Vec<(usize, f64)>>,
}

impl TransferMatrix {
    pub fn new(potential: &Potential) -> Self {
        let k = potential.memory();
        let shift = potential.shift();
        let blocks = potential.blocks().to_vec();
        let pre = blocks
            .iter()
            .map(|u| {
                blocks
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| {
                        if k == 1 {
                            shift.allows(v[0], u[0])
                        } else {
                            v[1..] == u[..k - 1]
                        }
                    })
                    .map(|(vi, _)| (vi, potential.log_weights()[vi].exp()))
                    .collect()
            })
            .collect();
        TransferMatrix { blocks, pre }
    }

    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn predecessors(&self, u: usize) -> &[(usize, f64)] {
        &self.pre[u]
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.pre[u].iter().find(|(w, _)| *w == v).map_or(0.0, |&(_, x)| x)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut m = vec![vec![0.0; d]; d];
        for (u, row) in self.pre.iter().enumerate() {
            for &(v, x) in row {
                m[u][v] = x;
            }
        }
        m
    }

    /// `M x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.pre
            .iter()
            .map(|row| row.iter().map(|&(v, w)| w * x[v]).sum())
            .collect()
    }

    /// `y M`.
    pub fn apply_left(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (u, row) in self.pre.iter().enumerate() {
            for &(v, w) in row {
                out[v] += y[u] * w;
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.pre.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigen {
    pub lambda: f64,
    /// Right eigenvector.
    pub h: Vec<f64>,
    /// Left eigenvector, `Σ ν = 1` and `⟨ν, h⟩ = 1`.
    pub nu: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

pub const DEFAULT_EIGEN_TOL: f64 = 1e-13;
pub const DEFAULT_EIGEN_ITERS: usize = 200_000;

/// Leading eigen-data by power iteration.
pub fn leading_eigen(m: &TransferMatrix, tol: f64, max_iter: usize) -> Result<Eigen, PotentialError> {
    let (lambda, h, it_r, _) = power_iterate(m.dim(), |x| m.apply(x), tol, max_iter)?;
    let (_, mut nu, it_l, _) = power_iterate(m.dim(), |y| m.apply_left(y), tol, max_iter)?;
    let s: f64 = nu.iter().sum();
    nu.iter_mut().for_each(|x| *x /= s);
    let dot: f64 = nu.iter().zip(&h).map(|(a, b)| a * b).sum();
    let h: Vec<f64> = h.iter().map(|x| x / dot).collect();
    let mh = m.apply(&h);
    let hmax = h.iter().copied().fold(0.0, f64::max);
    let residual = mh
        .iter()
        .zip(&h)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max)
        / hmax;
    Ok(Eigen {
        lambda,
        h,
        nu,
        iterations: it_r.max(it_l),
        residual,
    })
}

fn power_iterate<F>(
    dim: usize,
    apply: F,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>, usize, f64), PotentialError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    // a non-constant start so that periodic matrices visibly oscillate
    let mut x: Vec<f64> = (0..dim).map(|i| 1.0 + 0.1 * (i + 1) as f64 / dim as f64).collect();
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let y = apply(&x);
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        if !(sy > 0.0) || !sy.is_finite() {
            return Err(PotentialError::NoConvergence {
                iterations: it,
                residual,
            });
        }
        let lambda = sy / sx;
        let xmax = x.iter().copied().fold(0.0, f64::max);
        residual = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max)
            / (lambda * xmax);
        let next: Vec<f64> = y.iter().map(|v| v / sy).collect();
        if residual <= tol {
            return Ok((lambda, next, it, residual));
        }
        x = next;
    }
    Err(PotentialError::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Rescales `φ` by its eigen-data so that the transfer operator fixes
/// constants and has spectral radius 1.
///
/// The result has memory `max(k, 2)`: the eigenfunction of a memory-1
/// potential depends on one coordinate, so the normalized weight sees two.
pub fn normalize(potential: &Potential) -> Result<Potential, PotentialError> {
    let shift = potential.shift();
    if !shift.is_mixing() {
        return Err(ShiftError::NotMixing {
            period: shift.period(),
            transitive: shift.is_transitive(),
        }
        .into());
    }
    let k = potential.memory().max(2);
    let lifted = potential.lift(k)?;
    let m = TransferMatrix::new(&lifted);
    let eig = leading_eigen(&m, DEFAULT_EIGEN_TOL, DEFAULT_EIGEN_ITERS)?;
    // h only depends on the first k-1 coordinates of a block
    let mut h_prefix: HashMap<&[usize], f64> = HashMap::new();
    for (b, &hv) in lifted.blocks().iter().zip(&eig.h) {
        h_prefix.entry(&b[..k - 1]).or_insert(hv);
    }
    let log_lambda = eig.lambda.ln();
    Potential::from_fn(shift, k, |b| {
        let hp = h_prefix[&b[..k - 1]];
        let hs = h_prefix[&b[1..]];
        lifted.log_weight(b).expect("admissible block") + hp.ln() - hs.ln() - log_lambda
    })
}

/// `log Z_a^n`: weighted count of period-`n` points in `[a]`.
///
/// Computed exactly as the diagonal of `M^n` over blocks starting with `a`,
/// with scaled vectors so that large `n` does not underflow.
pub fn partition_function(potential: &Potential, a: usize, n: usize) -> f64 {
    if n == 0 || a >= potential.shift().alphabet_size() {
        return f64::NEG_INFINITY;
    }
    let m = TransferMatrix::new(potential);
    let starts: Vec<usize> = (0..m.dim()).filter(|&b| m.blocks()[b][0] == a).collect();
    log_sum_exp(starts.into_iter().map(|b| log_diag_power(&m, b, n)))
}

/// `log (M^n)_{bb}`.
fn log_diag_power(m: &TransferMatrix, b: usize, n: usize) -> f64 {
    let mut x = vec![0.0; m.dim()];
    x[b] = 1.0;
    let mut log_scale = 0.0;
    for _ in 0..n {
        x = m.apply(&x);
        let s = x.iter().copied().fold(0.0, f64::max);
        if s == 0.0 {
            return f64::NEG_INFINITY;
        }
        x.iter_mut().for_each(|v| *v /= s);
        log_scale += s.ln();
    }
    if x[b] > 0.0 {
        log_scale + x[b].ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `log Z_a^n` by listing every closed word; exponential cost.
pub fn partition_function_by_enumeration(potential: &Potential, a: usize, n: usize) -> f64 {
    let shift = potential.shift();
    if n == 0 || a >= shift.alphabet_size() {
        return f64::NEG_INFINITY;
    }
    let words = shift.enumerate_words(n, Some(&[a]), Some(a));
    log_sum_exp(words.iter().map(|w| {
        potential
            .birkhoff_log_weight(w.letters(), TailContext::Periodic)
            .expect("closed word")
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMethod {
    Eigenvalue,
    PeriodicOrbit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub letter: usize,
    /// `(n, (1/n) log Z_a^n)` for every `n` in range with a closed word.
    pub samples: Vec<(usize, f64)>,
    pub extrapolated_value: f64,
    pub method: PressureMethod,
    pub eigenvalue_pressure: f64,
    pub periodic_orbit_slope: f64,
    pub periodic_orbit_intercept: f64,
    pub discrepancy: f64,
}

/// Pressure from the leading eigenvalue together with the slope of an
/// unweighted line fit of `log Z_a^n` against `n`.
pub fn pressure_estimate(
    potential: &Potential,
    a: usize,
    n_range: RangeInclusive<usize>,
) -> Result<PressureEstimate, PotentialError> {
    let shift = potential.shift();
    if !shift.is_mixing() {
        return Err(ShiftError::NotMixing {
            period: shift.period(),
            transitive: shift.is_transitive(),
        }
        .into());
    }
    if a >= shift.alphabet_size() {
        return Err(ShiftError::LetterOutOfRange {
            letter: a,
            size: shift.alphabet_size(),
        }
        .into());
    }
    let m = TransferMatrix::new(potential);
    let eig = leading_eigen(&m, DEFAULT_EIGEN_TOL, DEFAULT_EIGEN_ITERS)?;
    let eigen_p = eig.lambda.ln();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut samples = Vec::new();
    for n in n_range.filter(|&n| n >= 1) {
        let z = partition_function(potential, a, n);
        if z.is_finite() {
            xs.push(n as f64);
            ys.push(z);
            samples.push((n, z / n as f64));
        }
    }
    let fit = line_fit(&xs, &ys).ok_or(PotentialError::EmptyRange)?;
    Ok(PressureEstimate {
        letter: a,
        samples,
        extrapolated_value: eigen_p,
        method: PressureMethod::Eigenvalue,
        eigenvalue_pressure: eigen_p,
        periodic_orbit_slope: fit.slope,
        periodic_orbit_intercept: fit.intercept,
        discrepancy: (eigen_p - fit.slope).abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationReport {
    pub memory: usize,
    /// `log C_n` for `n = 1..=n_max`.
    pub log_c: Vec<f64>,
    /// `log D_n` for `n = 1..=n_max` when an involution was supplied.
    pub log_d: Option<Vec<f64>>,
}

impl VariationReport {
    pub fn c(&self, n: usize) -> f64 {
        self.log_c[n - 1].exp()
    }
}

/// Distortion constants `C_n`, exact over all tails of every `n`-word.
pub fn variation_constants(potential: &Potential, n_max: usize) -> Result<VariationReport, PotentialError> {
    variation_impl(potential, n_max, None)
}

/// `C_n` together with the symmetry defects `D_n` comparing `[w]` to `[w†]`.
pub fn variation_constants_with_symmetry(
    potential: &Potential,
    n_max: usize,
    involution: Option<&Involution>,
) -> Result<VariationReport, PotentialError> {
    let inv = involution.ok_or(PotentialError::InvolutionMissing)?;
    variation_impl(potential, n_max, Some(inv))
}

fn variation_impl(
    potential: &Potential,
    n_max: usize,
    inv: Option<&Involution>,
) -> Result<VariationReport, PotentialError> {
    let shift = potential.shift();
    let mut log_c = Vec::with_capacity(n_max);
    let mut log_d = inv.map(|_| Vec::with_capacity(n_max));
    for n in 1..=n_max {
        let mut c: f64 = 0.0;
        let mut d: f64 = f64::NEG_INFINITY;
        for w in shift.enumerate_words(n, None, None) {
            let w = w.letters();
            // blocks lying inside w are common to every tail and cancel,
            // so only the overlapping ones are summed
            let (lo, hi) = tail_range(potential, w, n.saturating_sub(potential.memory() - 1))?;
            c = c.max(hi - lo);
            if let Some(inv) = inv {
                let wd = inv.dagger_letters(w);
                let (_, hi_w) = tail_range(potential, w, 0)?;
                let (lo_d, _) = tail_range(potential, &wd, 0)?;
                d = d.max(hi_w - lo_d);
            }
        }
        log_c.push(c);
        if let Some(v) = log_d.as_mut() {
            v.push(d);
        }
    }
    Ok(VariationReport {
        memory: potential.memory(),
        log_c,
        log_d,
    })
}

/// Min and max over all tails of the log-weights of blocks starting at
/// positions `from..|w|`, summed in sorted order so that equal multisets give
/// bitwise equal sums.
fn tail_range(potential: &Potential, w: &[usize], from: usize) -> Result<(f64, f64), PotentialError> {
    let k = potential.memory();
    let n = w.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut block = Vec::with_capacity(k);
    let mut terms = Vec::with_capacity(n);
    for t in potential.tail_contexts(w) {
        terms.clear();
        for j in from..n {
            block.clear();
            block.extend((j..j + k).map(|p| if p < n { w[p] } else { t[p - n] }));
            terms.push(
                potential
                    .log_weight(&block)
                    .ok_or_else(|| PotentialError::InadmissibleWord(w.to_vec()))?,
            );
        }
        terms.sort_by(f64::total_cmp);
        let b: f64 = terms.iter().sum();
        lo = lo.min(b);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

/// The Gibbs measure of a normalized potential.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsMeasure {
    potential: Potential,
    /// Mass of each block cylinder.
    nu: Vec<f64>,
    /// Mass of each single-letter cylinder.
    letters: Vec<f64>,
}

pub const NORMALIZATION_TOL: f64 = 1e-9;

impl GibbsMeasure {
    pub fn new(potential: &Potential) -> Result<Self, PotentialError> {
        let m = TransferMatrix::new(potential);
        let eig = leading_eigen(&m, DEFAULT_EIGEN_TOL, DEFAULT_EIGEN_ITERS)?;
        if (eig.lambda - 1.0).abs() > NORMALIZATION_TOL {
            return Err(PotentialError::NotNormalized(eig.lambda));
        }
        let mut letters = vec![0.0; potential.shift().alphabet_size()];
        for (b, &x) in potential.blocks().iter().zip(&eig.nu) {
            letters[b[0]] += x;
        }
        Ok(GibbsMeasure {
            potential: potential.clone(),
            nu: eig.nu,
            letters,
        })
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn block_masses(&self) -> &[f64] {
        &self.nu
    }

    /// `μ([w])`.
    pub fn cylinder(&self, word: &[usize]) -> Result<f64, PotentialError> {
        let p = &self.potential;
        let shift = p.shift();
        if word.is_empty() || !shift.is_admissible(word) {
            return Err(PotentialError::InadmissibleWord(word.to_vec()));
        }
        let k = p.memory();
        let last = word[word.len() - 1];
        let mut terms = Vec::new();
        if k == 1 {
            let lw = p.birkhoff_log_weight(word, TailContext::Follow(&[]))?;
            for c in shift.successors(last) {
                terms.push(self.letters[c].ln() + lw);
            }
        } else {
            // conformality: μ[w] = Σ_s μ[s] Φ_n(w s) over (k-1)-words s
            let mut s_mass: BTreeMap<&[usize], f64> = BTreeMap::new();
            for (b, &x) in p.blocks().iter().zip(&self.nu) {
                *s_mass.entry(&b[..k - 1]).or_insert(0.0) += x;
            }
            for (s, mass) in s_mass {
                if shift.allows(last, s[0]) {
                    terms.push(mass.ln() + p.birkhoff_log_weight(word, TailContext::Follow(s))?);
                }
            }
        }
        Ok(log_sum_exp(terms).exp())
    }

    /// `μ(θ[a])`: the mass of all letters that may follow `a`.
    pub fn image_mass(&self, a: usize) -> f64 {
        self.potential.shift().successors(a).map(|c| self.letters[c]).sum()
    }
}

/// `μ([w])` for a normalized potential.
pub fn gibbs_cylinder_measure(potential: &Potential, word: &[usize]) -> Result<f64, PotentialError> {
    GibbsMeasure::new(potential)?.cylinder(word)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalReport {
    pub n_max: usize,
    /// Largest value of `max(r/μθ, μθ/r)` with `r = μ[w]/Φ_n(x)`, per `n`.
    pub max_distortion: Vec<f64>,
    /// `C_n` used as the bound, per `n`.
    pub bound: Vec<f64>,
    /// Largest `distortion / C_n` seen over all lengths.
    pub max_violation_ratio: f64,
    pub violations: usize,
    pub checked: usize,
}

const REL_SLACK: f64 = 1e-12;

/// Checks `C_n^{-1} μ(θ[w_n]) ≤ μ([w]) / Φ_n(x) ≤ C_n μ(θ[w_n])` for every
/// word up to length `n_max` and every tail.
pub fn conformal_check(potential: &Potential, n_max: usize) -> Result<ConformalReport, PotentialError> {
    let gibbs = GibbsMeasure::new(potential)?;
    let var = variation_constants(potential, n_max)?;
    let shift = potential.shift();
    let mut report = ConformalReport {
        n_max,
        max_distortion: Vec::new(),
        bound: Vec::new(),
        max_violation_ratio: 0.0,
        violations: 0,
        checked: 0,
    };
    for n in 1..=n_max {
        let cn = var.c(n);
        let mut worst: f64 = 1.0;
        for w in shift.enumerate_words(n, None, None) {
            let mu = gibbs.cylinder(w.letters())?;
            let mu_theta = gibbs.image_mass(w.letters()[n - 1]);
            for t in potential.tail_contexts(w.letters()) {
                let phi = potential.birkhoff_log_weight(w.letters(), TailContext::Follow(&t))?;
                let r = (mu.ln() - phi).exp();
                let dist = (r / mu_theta).max(mu_theta / r);
                worst = worst.max(dist);
                report.checked += 1;
                if dist > cn * (1.0 + REL_SLACK) {
                    report.violations += 1;
                }
            }
        }
        report.max_violation_ratio = report.max_violation_ratio.max(worst / cn);
        report.max_distortion.push(worst);
        report.bound.push(cn);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GibbsReport {
    pub n_max: usize,
    /// The uniform constant `B`.
    pub bound: f64,
    /// Extremes of `μ([w]) / Φ_n(x)` over all words and tails.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub violations: usize,
    pub checked: usize,
}

/// Checks `B^{-1} ≤ μ([w]) / Φ_n(x) ≤ B` for every word up to `n_max`, with
/// `B` the largest distortion constant up to the memory.
pub fn gibbs_check(potential: &Potential, n_max: usize) -> Result<GibbsReport, PotentialError> {
    let gibbs = GibbsMeasure::new(potential)?;
    let k = potential.memory();
    let var = variation_constants(potential, k.max(n_max))?;
    let bound = var.log_c[..k].iter().copied().fold(0.0, f64::max).exp();
    let shift = potential.shift();
    let mut report = GibbsReport {
        n_max,
        bound,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        violations: 0,
        checked: 0,
    };
    for n in 1..=n_max {
        for w in shift.enumerate_words(n, None, None) {
            let mu = gibbs.cylinder(w.letters())?;
            for t in potential.tail_contexts(w.letters()) {
                let phi = potential.birkhoff_log_weight(w.letters(), TailContext::Follow(&t))?;
                let r = (mu.ln() - phi).exp();
                report.min_ratio = report.min_ratio.min(r);
                report.max_ratio = report.max_ratio.max(r);
                report.checked += 1;
                if r > bound * (1.0 + REL_SLACK) || r * bound * (1.0 + REL_SLACK) < 1.0 {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}
