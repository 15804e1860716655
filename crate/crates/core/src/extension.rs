//! Group extensions `T(x, g) = (θx, g ψ(x))` of a topological Markov chain.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::{ball, radial_return_probabilities, GroupElement, GroupError, GroupSpec};
use crate::numeric::least_squares;
use crate::potential::{normalize, GibbsMeasure, Potential, PotentialError, TransferMatrix};
use crate::sft::{Involution, Shift, ShiftError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("cocycle has {got} letter images, alphabet has {expected} letters")]
    CocycleArity { expected: usize, got: usize },
    #[error("cocycle image of letter {0} is not an element of the group")]
    CocycleNotInGroup(usize),
    #[error("cocycle is not symmetric: ψ({dagger}) != ψ({letter})⁻¹")]
    NotSymmetric { letter: usize, dagger: usize },
    #[error("word {0:?} is not admissible")]
    InadmissibleWord(Vec<usize>),
    #[error("the base shift is not mixing, so the potential cannot be normalized")]
    NotNormalizable,
    #[error("escaped mass {loss} exceeds the allowed fraction {max_loss}")]
    TruncationDominates { loss: f64, max_loss: f64 },
    #[error("window [{lo}, {hi}] has fewer than three usable samples")]
    EmptyWindow { lo: usize, hi: usize },
    #[error("radial return series unavailable: {0}")]
    RadialUnsupported(String),
    #[error("function values must be nonnegative and finite")]
    NegativeInput,
    #[error("state space exceeded {cap} group elements")]
    StateCapExceeded { cap: usize },
}

/// `ψ` as one group element per letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    images: Vec<GroupElement>,
}

impl Cocycle {
    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn image(&self, letter: usize) -> &GroupElement {
        &self.images[letter]
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionSystem {
    shift: Shift,
    potential: Potential,
    gibbs: Option<GibbsMeasure>,
    cocycle: Cocycle,
    group: GroupSpec,
    involution: Option<Involution>,
}

impl ExtensionSystem {
    /// Validates the cocycle (and its symmetry when an involution is given)
    /// and normalizes the potential when the base is mixing.
    pub fn new(
        potential: Potential,
        group: GroupSpec,
        images: Vec<GroupElement>,
        involution: Option<Involution>,
    ) -> Result<Self, ExtensionError> {
        let shift = potential.shift().clone();
        let m = shift.alphabet_size();
        if images.len() != m {
            return Err(ExtensionError::CocycleArity {
                expected: m,
                got: images.len(),
            });
        }
        if let Some(l) = images.iter().position(|g| !group.contains(g)) {
            return Err(ExtensionError::CocycleNotInGroup(l));
        }
        if let Some(inv) = &involution {
            if inv.images().len() != m {
                return Err(ShiftError::InvalidInvolution(format!("expected {m} images")).into());
            }
            for v in 0..m {
                let d = inv.letter(v);
                if images[d] != group.inverse_unchecked(&images[v]) {
                    return Err(ExtensionError::NotSymmetric { letter: v, dagger: d });
                }
            }
        }
        let gibbs = if shift.is_mixing() {
            Some(GibbsMeasure::new(&normalize(&potential)?)?)
        } else {
            None
        };
        Ok(ExtensionSystem {
            shift,
            potential,
            gibbs,
            cocycle: Cocycle { images },
            group,
            involution,
        })
    }

    pub fn shift(&self) -> &Shift {
        &self.shift
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn involution(&self) -> Option<&Involution> {
        self.involution.as_ref()
    }

    /// Gibbs measure of the normalized potential.
    pub fn gibbs(&self) -> Result<&GibbsMeasure, ExtensionError> {
        self.gibbs.as_ref().ok_or(ExtensionError::NotNormalizable)
    }

    pub fn normalized_potential(&self) -> Result<&Potential, ExtensionError> {
        Ok(self.gibbs()?.potential())
    }

    /// `ψ(w_1) ⋯ ψ(w_n)`.
    pub fn psi_n(&self, word: &[usize]) -> Result<GroupElement, ExtensionError> {
        if !self.shift.is_admissible(word) {
            return Err(ExtensionError::InadmissibleWord(word.to_vec()));
        }
        Ok(self.psi_unchecked(word))
    }

    pub(crate) fn psi_unchecked(&self, word: &[usize]) -> GroupElement {
        let mut acc = self.group.identity();
        for &l in word {
            acc = self.group.multiply_unchecked(&acc, &self.cocycle.images[l]);
        }
        acc
    }

    /// Distinct non-identity cocycle images and their inverses, canonical order.
    pub fn cocycle_generators(&self) -> Vec<GroupElement> {
        let id = self.group.identity();
        let mut gens: Vec<GroupElement> = self
            .cocycle
            .images
            .iter()
            .flat_map(|g| [g.clone(), self.group.inverse_unchecked(g)])
            .filter(|g| *g != id)
            .collect();
        gens.sort();
        gens.dedup();
        gens
    }

    /// `log 𝒵_{a,g}^n`: weighted count of closed words in `[a]` with
    /// `ψ_n = g`, using the potential as given.
    pub fn extension_partition_function(&self, a: usize, g: &GroupElement, n: usize) -> f64 {
        if n == 0 || a >= self.shift.alphabet_size() || !self.group.contains(g) {
            return f64::NEG_INFINITY;
        }
        let tm = TransferMatrix::new(&self.potential);
        let blocks = tm.blocks();
        let k = self.potential.memory();
        // successors in the block graph: b -> b' when b' can follow b
        let succ: Vec<Vec<usize>> = (0..tm.dim())
            .map(|b| {
                (0..tm.dim())
                    .filter(|&c| {
                        if k == 1 {
                            self.shift.allows(blocks[b][0], blocks[c][0])
                        } else {
                            blocks[c][..k - 1] == blocks[b][1..]
                        }
                    })
                    .collect()
            })
            .collect();
        let lw = self.potential.log_weights();
        let mut terms = Vec::new();
        for start in (0..tm.dim()).filter(|&b| blocks[b][0] == a) {
            let mut layer: BTreeMap<(usize, GroupElement), f64> = BTreeMap::new();
            layer.insert((start, self.group.identity()), 1.0);
            let mut log_scale = 0.0;
            for _ in 0..n {
                let mut next: BTreeMap<(usize, GroupElement), f64> = BTreeMap::new();
                for ((b, h), x) in &layer {
                    let w = x * lw[*b].exp();
                    let h2 = self.group.multiply_unchecked(h, &self.cocycle.images[blocks[*b][0]]);
                    for &c in &succ[*b] {
                        *next.entry((c, h2.clone())).or_insert(0.0) += w;
                    }
                }
                let s = next.values().copied().fold(0.0, f64::max);
                if s == 0.0 {
                    layer = next;
                    break;
                }
                next.values_mut().for_each(|v| *v /= s);
                log_scale += s.ln();
                layer = next;
            }
            if let Some(&x) = layer.get(&(start, g.clone())) {
                if x > 0.0 {
                    terms.push(log_scale + x.ln());
                }
            }
        }
        crate::numeric::log_sum_exp(terms)
    }

    /// `r_n = μ(ψ_n = id)` for `n = 1..=n_max` by iterating the normalized
    /// transfer operator of the extension.
    pub fn return_weight_series(&self, n_max: usize, method: ReturnMethod) -> Result<ReturnSeries, ExtensionError> {
        match method {
            ReturnMethod::Ball { radius, cap } => self.return_series_ball(n_max, radius, cap),
            ReturnMethod::Radial => self.return_series_radial(n_max),
        }
    }

    fn return_series_ball(&self, n_max: usize, radius: usize, cap: usize) -> Result<ReturnSeries, ExtensionError> {
        let gibbs = self.gibbs()?;
        let norm = gibbs.potential();
        let nu = gibbs.block_masses();
        let tm = TransferMatrix::new(norm);
        let nb = tm.dim();
        let gens = self.cocycle_generators();
        let b = ball(&self.group, radius, &gens, cap)?;
        let ng = b.len();
        let id = b.index_of(&self.group.identity()).expect("identity in ball");
        // pull[c][gi]: index of g ψ(c)^{-1} when inside the ball
        let inv_images: Vec<GroupElement> = self
            .cocycle
            .images
            .iter()
            .map(|g| self.group.inverse_unchecked(g))
            .collect();
        let pull = transpose(b.right_mult_table(&self.group, &inv_images));
        let pre: Vec<Vec<(usize, usize, f64)>> = (0..nb)
            .map(|u| {
                tm.predecessors(u)
                    .iter()
                    .map(|&(v, w)| (v, tm.blocks()[v][0], w))
                    .collect()
            })
            .collect();
        let mut f = vec![0.0; ng * nb];
        f[id * nb..(id + 1) * nb].iter_mut().for_each(|x| *x = 1.0);
        let mut samples = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let mut next = vec![0.0; ng * nb];
            next.par_chunks_mut(nb).enumerate().for_each(|(g, out)| {
                for (u, o) in out.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for &(v, c, w) in &pre[u] {
                        if let Some(h) = pull[c][g] {
                            s += w * f[h * nb + v];
                        }
                    }
                    *o = s;
                }
            });
            f = next;
            let r: f64 = (0..nb).map(|u| nu[u] * f[id * nb + u]).sum();
            let mass: f64 = f
                .chunks(nb)
                .map(|row| row.iter().zip(nu).map(|(x, m)| x * m).sum::<f64>())
                .sum();
            samples.push(ReturnSample::new(n, r, (1.0 - mass).max(0.0)));
        }
        Ok(ReturnSeries {
            group: self.group.name(),
            method: ReturnMethodTag::Ball,
            radius: Some(radius),
            ball_size: Some(ng),
            samples,
        })
    }

    fn return_series_radial(&self, n_max: usize) -> Result<ReturnSeries, ExtensionError> {
        let unsupported = |why: &str| ExtensionError::RadialUnsupported(why.to_string());
        let rank = match self.group {
            GroupSpec::Free { rank } => rank,
            _ => return Err(unsupported("group is not a free group")),
        };
        if !self.shift.is_full() || self.shift.alphabet_size() != 2 * rank {
            return Err(unsupported("base must be the full shift on 2r letters"));
        }
        let mut seen: Vec<GroupElement> = self.cocycle.images.clone();
        seen.sort();
        seen.dedup();
        let mut gens = self.group.standard_generators();
        gens.sort();
        if seen != gens {
            return Err(unsupported("cocycle must map the letters onto the free generators"));
        }
        let norm = self.normalized_potential()?;
        let target = -((2 * rank) as f64).ln();
        if norm.log_weights().iter().any(|&w| (w - target).abs() > 1e-12) {
            return Err(unsupported("normalized potential is not uniform"));
        }
        let p = radial_return_probabilities(rank, n_max);
        Ok(ReturnSeries {
            group: self.group.name(),
            method: ReturnMethodTag::Radial,
            radius: None,
            ball_size: None,
            samples: (1..=n_max).map(|n| ReturnSample::new(n, p[n], 0.0)).collect(),
        })
    }

    /// Shortest, then lexicographically least, word starting with `from`
    /// whose image is the identity and which may be followed by `to`.
    pub fn connector(
        &self,
        from: usize,
        to: usize,
        max_len: usize,
        cap: usize,
    ) -> Result<Option<Vec<usize>>, ExtensionError> {
        let m = self.shift.alphabet_size();
        if from >= m || to >= m {
            return Err(ShiftError::LetterOutOfRange {
                letter: from.max(to),
                size: m,
            }
            .into());
        }
        if max_len == 0 {
            return Ok(None);
        }
        let id = self.group.identity();
        let mut seen: HashMap<(usize, GroupElement), ()> = HashMap::new();
        let start = (from, self.cocycle.images[from].clone());
        seen.insert(start.clone(), ());
        let mut layer: VecDeque<(Vec<usize>, GroupElement)> = VecDeque::from([(vec![from], start.1)]);
        for len in 1..=max_len {
            for (w, g) in &layer {
                if *g == id && self.shift.allows(*w.last().expect("nonempty"), to) {
                    return Ok(Some(w.clone()));
                }
            }
            if len == max_len {
                break;
            }
            let mut next = VecDeque::new();
            for (w, g) in &layer {
                let last = *w.last().expect("nonempty");
                for c in self.shift.successors(last) {
                    let h = self.group.multiply_unchecked(g, &self.cocycle.images[c]);
                    let key = (c, h);
                    if seen.contains_key(&key) {
                        continue;
                    }
                    if seen.len() >= cap {
                        return Err(ExtensionError::StateCapExceeded { cap });
                    }
                    seen.insert(key.clone(), ());
                    let mut w2 = w.clone();
                    w2.push(c);
                    next.push_back((w2, key.1));
                }
            }
            layer = next;
        }
        Ok(None)
    }

    /// Identity-image connectors between every ordered pair of b.i.p.
    /// witness letters (every letter pair when `all_pairs`).
    pub fn trivial_connectors(&self, max_len: usize, all_pairs: bool) -> Result<ConnectorReport, ExtensionError> {
        let letters: Vec<usize> = if all_pairs {
            (0..self.shift.alphabet_size()).collect()
        } else {
            self.shift.check_bip()?.witness
        };
        let mut connectors = BTreeMap::new();
        let mut missing = Vec::new();
        for &b in &letters {
            for &b2 in &letters {
                match self.connector(b, b2, max_len, DEFAULT_STATE_CAP)? {
                    Some(w) => {
                        connectors.insert((b, b2), w);
                    }
                    None => missing.push((b, b2)),
                }
            }
        }
        Ok(ConnectorReport {
            letters,
            max_len,
            connectors,
            missing,
        })
    }

    /// `⟦ℒ^k f⟧₁ / ⟦f⟧₁` for `f` constant on each fibre `X_g`.
    pub fn lambda_k(&self, f: &BTreeMap<GroupElement, f64>, k: usize) -> Result<f64, ExtensionError> {
        self.lambda_k_capped(f, k, DEFAULT_STATE_CAP)
    }

    pub fn lambda_k_capped(
        &self,
        f: &BTreeMap<GroupElement, f64>,
        k: usize,
        cap: usize,
    ) -> Result<f64, ExtensionError> {
        let denom = hnorm_1(f)?;
        if denom == 0.0 {
            return Ok(0.0);
        }
        let gibbs = self.gibbs()?;
        let tm = TransferMatrix::new(gibbs.potential());
        let nu = gibbs.block_masses();
        let nb = tm.dim();
        let blocks = tm.blocks();
        // push form of the pull recursion: (v, h) feeds (u, h ψ(v_0))
        let succ: Vec<Vec<(usize, f64)>> = {
            let mut s = vec![Vec::new(); nb];
            for u in 0..nb {
                for &(v, w) in tm.predecessors(u) {
                    s[v].push((u, w));
                }
            }
            s
        };
        let mut elems: Vec<GroupElement> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for (g, &x) in f {
            if x != 0.0 {
                elems.push(g.clone());
                values.push(vec![x; nb]);
            }
        }
        for _ in 0..k {
            let mut index: HashMap<GroupElement, usize> = HashMap::new();
            let mut ne: Vec<GroupElement> = Vec::new();
            let mut nv: Vec<Vec<f64>> = Vec::new();
            for (g, vals) in elems.iter().zip(&values) {
                for v in 0..nb {
                    if vals[v] == 0.0 {
                        continue;
                    }
                    let h = self.group.multiply_unchecked(g, &self.cocycle.images[blocks[v][0]]);
                    let slot = match index.get(&h) {
                        Some(&i) => i,
                        None => {
                            if ne.len() >= cap {
                                return Err(ExtensionError::StateCapExceeded { cap });
                            }
                            index.insert(h.clone(), ne.len());
                            ne.push(h);
                            nv.push(vec![0.0; nb]);
                            ne.len() - 1
                        }
                    };
                    for &(u, w) in &succ[v] {
                        nv[slot][u] += w * vals[v];
                    }
                }
            }
            elems = ne;
            values = nv;
        }
        let num: f64 = values
            .iter()
            .map(|vals| {
                let s: f64 = vals.iter().zip(nu).map(|(x, m)| x * m).sum();
                s * s
            })
            .sum::<f64>()
            .sqrt();
        Ok(num / denom)
    }
}

pub const DEFAULT_STATE_CAP: usize = 2_000_000;

fn transpose(t: Vec<Vec<Option<usize>>>) -> Vec<Vec<Option<usize>>> {
    let cols = t.first().map_or(0, |r| r.len());
    (0..cols).map(|j| t.iter().map(|row| row[j]).collect()).collect()
}

/// `⟦f⟧₁ = (Σ_g f(g)²)^{1/2}` for `f` constant on each fibre.
pub fn hnorm_1(f: &BTreeMap<GroupElement, f64>) -> Result<f64, ExtensionError> {
    if f.values().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(ExtensionError::NegativeInput);
    }
    Ok(f.values().map(|x| x * x).sum::<f64>().sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnMethod {
    /// Exact iteration on the extension truncated to a word-metric ball.
    Ball { radius: usize, cap: usize },
    /// Word-length recursion; only for the isotropic walk on a free group.
    Radial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnMethodTag {
    Ball,
    Radial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReturnSample {
    pub n: usize,
    pub r: f64,
    pub log_r: f64,
    /// Mass that left the ball by step `n`.
    pub loss: f64,
}

impl ReturnSample {
    fn new(n: usize, r: f64, loss: f64) -> Self {
        ReturnSample {
            n,
            r,
            log_r: if r > 0.0 { r.ln() } else { f64::NEG_INFINITY },
            loss,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnSeries {
    pub group: String,
    pub method: ReturnMethodTag,
    pub radius: Option<usize>,
    pub ball_size: Option<usize>,
    pub samples: Vec<ReturnSample>,
}

impl ReturnSeries {
    pub fn sample(&self, n: usize) -> Option<&ReturnSample> {
        self.samples.iter().find(|s| s.n == n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    AmenableConsistent,
    PressureDrop,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub intercept: f64,
    pub slope: f64,
    pub rss: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolynomialFit {
    pub intercept: f64,
    /// Decay exponent `β` in `log r_n ≈ c − β log n`.
    pub beta: f64,
    pub rss: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointFit {
    pub intercept: f64,
    pub slope: f64,
    pub beta: f64,
    pub rss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Exponential rate of `r_n` after removing a polynomial prefactor.
    pub rate: f64,
    pub threshold: f64,
    pub window: (usize, usize),
    pub points: usize,
    pub max_loss: f64,
    pub exponential: ExponentialFit,
    pub polynomial: PolynomialFit,
    pub joint: JointFit,
}

pub const DEFAULT_THRESHOLD: f64 = 0.02;
pub const DEFAULT_MAX_LOSS: f64 = 0.1;

/// Classifies the decay of `r_n` over `window`.
///
/// Three least-squares fits of `log r_n` are made over the samples with
/// `r_n > 0`: `c + s n`, `c − β log n` and `c + s n − β log n`. The rate is
/// the slope of the joint fit. A rate above `−threshold` is amenable when the
/// polynomial fit is at least as good as the exponential one (or the plain
/// exponential slope is itself above `−threshold`); a rate below is a
/// pressure drop when the exponential fit is at least as good.
pub fn amenability_verdict(
    series: &ReturnSeries,
    window: (usize, usize),
    threshold: f64,
    max_loss: f64,
) -> Result<Verdict, ExtensionError> {
    let (lo, hi) = window;
    let pts: Vec<&ReturnSample> = series.samples.iter().filter(|s| s.n >= lo && s.n <= hi).collect();
    let worst_loss = pts.iter().map(|s| s.loss).fold(0.0, f64::max);
    if worst_loss > max_loss {
        return Err(ExtensionError::TruncationDominates {
            loss: worst_loss,
            max_loss,
        });
    }
    let used: Vec<&&ReturnSample> = pts.iter().filter(|s| s.r > 0.0).collect();
    if used.len() < 3 {
        return Err(ExtensionError::EmptyWindow { lo, hi });
    }
    let y: Vec<f64> = used.iter().map(|s| s.log_r).collect();
    let n: Vec<f64> = used.iter().map(|s| s.n as f64).collect();
    let logn: Vec<f64> = n.iter().map(|x| x.ln()).collect();
    let ones = vec![1.0; y.len()];
    let empty = || ExtensionError::EmptyWindow { lo, hi };
    let e = least_squares(&[ones.clone(), n.clone()], &y).ok_or_else(empty)?;
    let p = least_squares(&[ones.clone(), logn.clone()], &y).ok_or_else(empty)?;
    let j = least_squares(&[ones, n, logn], &y).ok_or_else(empty)?;
    let exponential = ExponentialFit {
        intercept: e.coefficients[0],
        slope: e.coefficients[1],
        rss: e.rss,
    };
    let polynomial = PolynomialFit {
        intercept: p.coefficients[0],
        beta: -p.coefficients[1],
        rss: p.rss,
    };
    let joint = JointFit {
        intercept: j.coefficients[0],
        slope: j.coefficients[1],
        beta: -j.coefficients[2],
        rss: j.rss,
    };
    let rate = joint.slope;
    let kind = if rate >= -threshold {
        if polynomial.rss <= exponential.rss || exponential.slope >= -threshold {
            VerdictKind::AmenableConsistent
        } else {
            VerdictKind::Inconclusive
        }
    } else if exponential.rss <= polynomial.rss {
        VerdictKind::PressureDrop
    } else {
        VerdictKind::Inconclusive
    };
    Ok(Verdict {
        kind,
        rate,
        threshold,
        window,
        points: used.len(),
        max_loss: worst_loss,
        exponential,
        polynomial,
        joint,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectorReport {
    pub letters: Vec<usize>,
    pub max_len: usize,
    #[serde(serialize_with = "serialize_pairs")]
    pub connectors: BTreeMap<(usize, usize), Vec<usize>>,
    pub missing: Vec<(usize, usize)>,
}

fn serialize_pairs<S: serde::Serializer>(m: &BTreeMap<(usize, usize), Vec<usize>>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    struct Entry<'a> {
        from: usize,
        to: usize,
        word: &'a [usize],
    }
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for ((from, to), word) in m {
        seq.serialize_element(&Entry {
            from: *from,
            to: *to,
            word,
        })?;
    }
    seq.end()
}

/// Outcome of checking the three symmetry properties on raw data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    /// `(w†)† = w` for every letter.
    pub involutive: bool,
    /// `(v w)` admissible iff `(w† v†)` admissible.
    pub reverses_admissibility: bool,
    /// `ψ(v†) = ψ(v)⁻¹`.
    pub inverts_cocycle: bool,
    pub failures: Vec<String>,
}

impl SymmetryReport {
    pub fn all_pass(&self) -> bool {
        self.involutive && self.reverses_admissibility && self.inverts_cocycle
    }
}

/// Checks each symmetry property separately without failing early.
pub fn check_symmetry(shift: &Shift, dagger: &[usize], group: &GroupSpec, images: &[GroupElement]) -> SymmetryReport {
    let m = shift.alphabet_size();
    let mut failures = Vec::new();
    let in_range = dagger.len() == m && dagger.iter().all(|&d| d < m);
    if !in_range {
        failures.push(format!("involution must map {m} letters into the alphabet"));
        return SymmetryReport {
            involutive: false,
            reverses_admissibility: false,
            inverts_cocycle: false,
            failures,
        };
    }
    let mut involutive = true;
    for (v, &d) in dagger.iter().enumerate() {
        if dagger[d] != v {
            involutive = false;
            failures.push(format!("letter {v}: double dagger is {}", dagger[d]));
        }
    }
    let mut reverses = true;
    for v in 0..m {
        for w in 0..m {
            if shift.allows(v, w) != shift.allows(dagger[w], dagger[v]) {
                reverses = false;
                failures.push(format!("pair ({v} {w}) vs ({} {})", dagger[w], dagger[v]));
            }
        }
    }
    let mut inverts = images.len() == m;
    if inverts {
        for v in 0..m {
            let ok = group.contains(&images[v])
                && group.contains(&images[dagger[v]])
                && images[dagger[v]] == group.inverse_unchecked(&images[v]);
            if !ok {
                inverts = false;
                failures.push(format!("cocycle at letter {v}"));
            }
        }
    } else {
        failures.push(format!("cocycle has {} images for {m} letters", images.len()));
    }
    SymmetryReport {
        involutive,
        reverses_admissibility: reverses,
        inverts_cocycle: inverts,
        failures,
    }
}
