//! The symmetrized operator built from a symmetric extension and its
//! return probabilities.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::AmenabilityError;
use crate::extension::ExtensionSystem;
use crate::group::{ball, radial_return_probabilities, GroupElement, GroupSpec};
use crate::potential::TailContext;

/// A symmetric probability measure `m_n` on the group.
#[derive(Clone, Debug)]
pub struct KestenWalk {
    pub group: GroupSpec,
    /// Probabilities, keyed by canonical element order.
    pub weights: BTreeMap<GroupElement, f64>,
    /// `P_n(1)`, the mass before normalization.
    pub total: f64,
    pub anchor: Vec<usize>,
    /// The repeating word defining `ξ`.
    pub xi: Vec<usize>,
    pub n: usize,
}

impl KestenWalk {
    /// A walk given directly by its step distribution; weights are
    /// normalized to sum to one.
    pub fn from_weights(group: GroupSpec, weights: BTreeMap<GroupElement, f64>) -> Result<Self, AmenabilityError> {
        let total = sorted_sum(weights.values().copied());
        if !(total > 0.0) || weights.values().any(|&w| !(w >= 0.0)) {
            return Err(AmenabilityError::EmptyWordSet);
        }
        if let Some(g) = weights.keys().find(|g| !group.contains(g)) {
            return Err(AmenabilityError::InvalidWalk(format!("{g} is not in {}", group.name())));
        }
        let weights = weights.into_iter().map(|(g, w)| (g, w / total)).collect();
        Ok(KestenWalk {
            group,
            weights,
            total,
            anchor: Vec::new(),
            xi: Vec::new(),
            n: 1,
        })
    }

    /// Uniform measure on the standard generators of `group`.
    pub fn simple(group: GroupSpec) -> Result<Self, AmenabilityError> {
        let gens = group.standard_generators();
        let w = 1.0 / gens.len() as f64;
        Self::from_weights(group, gens.into_iter().map(|g| (g, w)).collect())
    }

    pub fn weight(&self, g: &GroupElement) -> f64 {
        self.weights.get(g).copied().unwrap_or(0.0)
    }

    /// Largest `|m(g) − m(g⁻¹)|` over the support.
    pub fn symmetry_defect(&self) -> f64 {
        self.weights
            .iter()
            .map(|(g, &w)| (w - self.weight(&self.group.inverse_unchecked(g))).abs())
            .fold(0.0, f64::max)
    }
}

fn sorted_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Lexicographically least among the shortest admissible words that start
/// with `prefix` and can be repeated forever.
pub fn default_xi(ext: &ExtensionSystem, prefix: &[usize]) -> Option<Vec<usize>> {
    let shift = ext.shift();
    let m = shift.alphabet_size();
    let lo = prefix.len().max(1);
    for len in lo..=lo + m * m {
        let p = if prefix.is_empty() { None } else { Some(prefix) };
        let first = shift.enumerate_words(len, p, None).into_iter().find(|w| {
            let l = w.letters();
            shift.allows(l[len - 1], l[0])
        });
        if let Some(w) = first {
            return Some(w.into_letters());
        }
    }
    None
}

/// Builds `m_n` from words of length `n` that start with `anchor` and may be
/// followed by `anchor†`, pairing each `a v` with `a v†`.
pub fn build_kesten_walk(
    ext: &ExtensionSystem,
    anchor: &[usize],
    n: usize,
    xi: Option<&[usize]>,
) -> Result<KestenWalk, AmenabilityError> {
    let inv = ext.involution().ok_or(AmenabilityError::NotSymmetric)?;
    let shift = ext.shift();
    let group = ext.group();
    if n <= anchor.len() {
        return Err(AmenabilityError::AnchorTooLong {
            n,
            anchor: anchor.len(),
        });
    }
    if !anchor.is_empty() && ext.psi_n(anchor)? != group.identity() {
        return Err(AmenabilityError::AnchorNotTrivial);
    }
    let anchor_dagger = inv.dagger_letters(anchor);
    let xi_word = match xi {
        Some(x) => x.to_vec(),
        None => default_xi(ext, &anchor_dagger)
            .ok_or_else(|| AmenabilityError::InvalidXi("no periodic point in the anchor cylinder".into()))?,
    };
    validate_xi(ext, &xi_word, &anchor_dagger)?;
    let k = ext.potential().memory();
    let xi_ctx: Vec<usize> = (0..k - 1).map(|i| xi_word[i % xi_word.len()]).collect();
    let xi0 = xi_word[0];
    let potential = ext.potential();
    let phi = |w: &[usize]| -> f64 {
        if !shift.allows(w[w.len() - 1], xi0) {
            return 0.0;
        }
        potential
            .birkhoff_log_weight(w, TailContext::Follow(&xi_ctx))
            .map(f64::exp)
            .unwrap_or(0.0)
    };
    let prefix = if anchor.is_empty() { None } else { Some(anchor) };
    let end = anchor_dagger.first().copied();
    let words = shift.enumerate_words(n, prefix, end);
    if words.is_empty() {
        return Err(AmenabilityError::EmptyWordSet);
    }
    let a = anchor.len();
    let mut per_g: BTreeMap<GroupElement, Vec<f64>> = BTreeMap::new();
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    for w in &words {
        let w = w.letters();
        let pi = match cache.get(w) {
            Some(&x) => x,
            None => {
                let mut iw = w[..a].to_vec();
                iw.extend(inv.dagger_letters(&w[a..]));
                let x = 0.5 * (phi(w) + phi(&iw));
                cache.insert(iw, x);
                x
            }
        };
        per_g.entry(ext.psi_unchecked(w)).or_default().push(pi);
    }
    let sums: BTreeMap<GroupElement, f64> = per_g.into_iter().map(|(g, v)| (g, sorted_sum(v))).collect();
    let total = sorted_sum(sums.values().copied());
    if !(total > 0.0) {
        return Err(AmenabilityError::EmptyWordSet);
    }
    let weights = sums
        .into_iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(g, w)| (g, w / total))
        .collect();
    Ok(KestenWalk {
        group: group.clone(),
        weights,
        total,
        anchor: anchor.to_vec(),
        xi: xi_word,
        n,
    })
}

fn validate_xi(ext: &ExtensionSystem, xi: &[usize], prefix: &[usize]) -> Result<(), AmenabilityError> {
    let shift = ext.shift();
    let bad = |why: &str| AmenabilityError::InvalidXi(why.to_string());
    if xi.is_empty() {
        return Err(bad("empty word"));
    }
    if !shift.is_admissible(xi) || !shift.allows(xi[xi.len() - 1], xi[0]) {
        return Err(bad("repeating word is not a closed admissible word"));
    }
    if prefix.iter().enumerate().any(|(i, &c)| xi[i % xi.len()] != c) {
        return Err(bad("periodic point does not lie in the anchor-dagger cylinder"));
    }
    Ok(())
}

/// `max |⟨1_γ, P 1_γ*⟩ − ⟨P 1_γ, 1_γ*⟩|` over pairs in the ball of the
/// standard generators.
pub fn self_adjoint_check(walk: &KestenWalk, ball_radius: usize, cap: usize) -> Result<f64, AmenabilityError> {
    let g = &walk.group;
    let b = ball(g, ball_radius, &g.standard_generators(), cap)?;
    let inverses: Vec<GroupElement> = b.elements().iter().map(|x| g.inverse_unchecked(x)).collect();
    let worst = b
        .elements()
        .par_iter()
        .enumerate()
        .map(|(i, gamma)| {
            let mut w: f64 = 0.0;
            for (j, gamma_star) in b.elements().iter().enumerate() {
                let lhs = walk.weight(&g.multiply_unchecked(&inverses[j], gamma));
                let rhs = walk.weight(&g.multiply_unchecked(&inverses[i], gamma_star));
                w = w.max((lhs - rhs).abs());
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralMethod {
    /// Convolution powers restricted to a ball of the standard generators.
    Ball { radius: usize, cap: usize },
    /// Word-length recursion for the uniform walk on free generators.
    Radial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// `p_{2k} = ⟨1_id, P^{2k} 1_id⟩`, `k = 1..=k_max`.
    pub p_2k: Vec<f64>,
    /// `ρ̂_k = p_{2k}^{1/2k}`, nondecreasing.
    pub rho_hat: Vec<f64>,
    /// `(p_{2k+2}/p_{2k})^{1/2}`.
    pub rayleigh: Vec<f64>,
    /// Final `ρ̂`; a lower bound for the spectral radius of the normalized walk.
    pub lower_bound: f64,
    pub ball_size: Option<usize>,
    pub method: &'static str,
}

const MONOTONE_TOL: f64 = 1e-12;

/// Even return probabilities and the monotone sequence `ρ̂_k`.
pub fn spectral_radius_estimate(
    walk: &KestenWalk,
    k_max: usize,
    method: SpectralMethod,
) -> Result<SpectralEstimate, AmenabilityError> {
    let (p_2k, ball_size, tag) = match method {
        SpectralMethod::Radial => {
            let rank = radial_rank(walk)?;
            let p = radial_return_probabilities(rank, 2 * k_max + 2);
            let even: Vec<f64> = (1..=k_max + 1).map(|k| p[2 * k]).collect();
            (even, None, "radial")
        }
        SpectralMethod::Ball { radius, cap } => {
            let (p, size) = ball_returns(walk, k_max + 1, radius, cap)?;
            (p, Some(size), "ball")
        }
    };
    let mut rho_hat = Vec::with_capacity(k_max);
    let mut rayleigh = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let p = p_2k[k - 1];
        let r = if p > 0.0 { p.powf(1.0 / (2 * k) as f64) } else { 0.0 };
        if let Some(&prev) = rho_hat.last() {
            if r < prev * (1.0 - MONOTONE_TOL) {
                return Err(AmenabilityError::MonotonicityViolated { k, prev, next: r });
            }
        }
        rho_hat.push(r);
        let next = p_2k[k];
        rayleigh.push(if p > 0.0 { (next / p).sqrt() } else { 0.0 });
    }
    let lower_bound = rho_hat.last().copied().unwrap_or(0.0);
    Ok(SpectralEstimate {
        p_2k: p_2k[..k_max].to_vec(),
        rho_hat,
        rayleigh,
        lower_bound,
        ball_size,
        method: tag,
    })
}

fn radial_rank(walk: &KestenWalk) -> Result<usize, AmenabilityError> {
    let unsupported = || AmenabilityError::RadialUnsupported;
    let rank = match walk.group {
        GroupSpec::Free { rank } => rank,
        _ => return Err(unsupported()),
    };
    let gens = walk.group.standard_generators();
    let w = 1.0 / gens.len() as f64;
    let uniform = walk.weights.len() == gens.len() && gens.iter().all(|g| (walk.weight(g) - w).abs() <= 1e-15);
    if uniform {
        Ok(rank)
    } else {
        Err(unsupported())
    }
}

/// `‖Q^j δ_id‖²` for `j = 1..=steps`, with `Q` the walk restricted to the ball.
fn ball_returns(
    walk: &KestenWalk,
    steps: usize,
    radius: usize,
    cap: usize,
) -> Result<(Vec<f64>, usize), AmenabilityError> {
    let g = &walk.group;
    let b = ball(g, radius, &g.standard_generators(), cap)?;
    let support: Vec<(&GroupElement, f64)> = walk.weights.iter().map(|(s, &w)| (s, w)).collect();
    let inv_support: Vec<GroupElement> = support.iter().map(|(s, _)| g.inverse_unchecked(s)).collect();
    // pull[h][j]: index of h s_j^{-1}
    let pull = b.right_mult_table(g, &inv_support);
    let id = b.index_of(&g.identity()).expect("identity in ball");
    let mut v = vec![0.0; b.len()];
    v[id] = 1.0;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next: Vec<f64> = (0..b.len())
            .into_par_iter()
            .map(|h| {
                let mut s = 0.0;
                for (j, &(_, w)) in support.iter().enumerate() {
                    if let Some(src) = pull[h][j] {
                        s += w * v[src];
                    }
                }
                s
            })
            .collect();
        v = next;
        out.push(v.iter().map(|x| x * x).sum());
    }
    Ok((out, b.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use crate::sft::{Involution, Shift};

    fn f2_extension(weights: [f64; 4]) -> ExtensionSystem {
        let s = Shift::full(4).unwrap();
        let p = Potential::from_letter_weights(&s, &weights.map(f64::ln)).unwrap();
        let inv = Involution::new(&s, vec![2, 3, 0, 1]).unwrap();
        let images = (0..4u8).map(|l| GroupElement::Free(vec![l])).collect();
        ExtensionSystem::new(p, GroupSpec::free(2), images, Some(inv)).unwrap()
    }

    #[test]
    fn uniform_one_step_walk() {
        let e = f2_extension([0.25; 4]);
        let w = build_kesten_walk(&e, &[], 1, None).unwrap();
        assert_eq!(w.weights.len(), 4);
        for &p in w.weights.values() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_cocycle_concentrates() {
        let s = Shift::full(2).unwrap();
        let p = Potential::constant(&s, -(2f64.ln())).unwrap();
        let inv = Involution::new(&s, vec![1, 0]).unwrap();
        let e = ExtensionSystem::new(
            p,
            GroupSpec::lattice(1),
            vec![GroupElement::Lattice(vec![0]); 2],
            Some(inv),
        )
        .unwrap();
        let w = build_kesten_walk(&e, &[0], 4, None).unwrap();
        assert_eq!(w.weights.len(), 1);
        assert_eq!(w.weight(&GroupElement::Lattice(vec![0])), 1.0);
    }

    #[test]
    fn weighted_walk_is_exactly_symmetric() {
        let e = f2_extension([0.4, 0.1, 0.3, 0.2]);
        for n in 2..=6 {
            let w = build_kesten_walk(&e, &[], n, None).unwrap();
            assert_eq!(w.symmetry_defect(), 0.0);
            let s: f64 = w.weights.values().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn anchor_checks() {
        let e = f2_extension([0.25; 4]);
        assert!(matches!(
            build_kesten_walk(&e, &[0], 3, None),
            Err(AmenabilityError::AnchorNotTrivial)
        ));
        assert!(matches!(
            build_kesten_walk(&e, &[0, 2], 2, None),
            Err(AmenabilityError::AnchorTooLong { .. })
        ));
        let w = build_kesten_walk(&e, &[0, 2], 4, None).unwrap();
        assert_eq!(w.xi, vec![0, 2]);
        assert!(matches!(
            build_kesten_walk(&e, &[0, 2], 4, Some(&[1])),
            Err(AmenabilityError::InvalidXi(_))
        ));
    }

    #[test]
    fn corrupted_weights_are_detected() {
        let mut w = KestenWalk::simple(GroupSpec::lattice(1)).unwrap();
        assert_eq!(self_adjoint_check(&w, 4, 1000).unwrap(), 0.0);
        w.weights.insert(GroupElement::Lattice(vec![1]), 0.7);
        w.weights.insert(GroupElement::Lattice(vec![-1]), 0.3);
        assert!(self_adjoint_check(&w, 4, 1000).unwrap() > 0.3);
    }

    #[test]
    fn z_return_probability() {
        let w = KestenWalk::simple(GroupSpec::lattice(1)).unwrap();
        let est = spectral_radius_estimate(&w, 20, SpectralMethod::Ball { radius: 25, cap: 100 }).unwrap();
        let binom: f64 = (1..=20).fold(1.0, |acc, i| acc * (20 + i) as f64 / i as f64);
        let exact = (binom / 2f64.powi(40)).powf(1.0 / 40.0);
        assert!((est.rho_hat[19] - exact).abs() < 1e-12);
        assert!((exact - 0.9494).abs() < 5e-5);
    }

    #[test]
    fn radial_agrees_with_ball_on_free_group() {
        let w = KestenWalk::simple(GroupSpec::free(2)).unwrap();
        let r = spectral_radius_estimate(&w, 4, SpectralMethod::Radial).unwrap();
        let b = spectral_radius_estimate(&w, 4, SpectralMethod::Ball { radius: 5, cap: 10_000 }).unwrap();
        for (x, y) in r.p_2k.iter().zip(&b.p_2k) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn finite_group_tends_to_one() {
        let g = GroupSpec::finite(crate::group::FiniteGroup::cyclic(7));
        let w = KestenWalk::from_weights(
            g,
            [
                (GroupElement::Finite(1), 1.0),
                (GroupElement::Finite(6), 1.0),
                (GroupElement::Finite(0), 1.0),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let est = spectral_radius_estimate(&w, 200, SpectralMethod::Ball { radius: 7, cap: 100 }).unwrap();
        assert!(est.lower_bound > 0.99);
    }
}
