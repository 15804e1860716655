//! Search for finite sets with small relative boundary.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::AmenabilityError;
use crate::group::{ball, GroupElement, GroupError, GroupSpec};

/// A candidate set, explicit or a box `lower + [0, side)^d` in `ℤ^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FolnerSet {
    Explicit(Vec<GroupElement>),
    Box { lower: Vec<i64>, side: i64 },
}

impl FolnerSet {
    pub fn len(&self) -> u128 {
        match self {
            FolnerSet::Explicit(v) => v.len() as u128,
            FolnerSet::Box { lower, side } => (*side as u128).pow(lower.len() as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every element, canonical order. Boxes are materialized.
    pub fn elements(&self) -> Vec<GroupElement> {
        match self {
            FolnerSet::Explicit(v) => v.clone(),
            FolnerSet::Box { lower, side } => {
                let d = lower.len();
                let mut out = Vec::with_capacity(self.len() as usize);
                let mut idx = vec![0i64; d];
                loop {
                    out.push(GroupElement::Lattice(
                        lower.iter().zip(&idx).map(|(l, i)| l + i).collect(),
                    ));
                    let mut j = d;
                    loop {
                        if j == 0 {
                            out.sort();
                            return out;
                        }
                        j -= 1;
                        idx[j] += 1;
                        if idx[j] < *side {
                            break;
                        }
                        idx[j] = 0;
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FolnerCertificate {
    pub set: FolnerSet,
    pub size: u128,
    pub k: Vec<GroupElement>,
    /// `Σ_{h∈K} |Ah △ A| / |A|`.
    pub defect: f64,
    pub epsilon: f64,
    pub family: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum FolnerOutcome {
    Found(FolnerCertificate),
    NotFound {
        best_defect: f64,
        best_size: u128,
        best_family: &'static str,
        candidates: usize,
    },
}

impl FolnerOutcome {
    pub fn certificate(&self) -> Option<&FolnerCertificate> {
        match self {
            FolnerOutcome::Found(c) => Some(c),
            FolnerOutcome::NotFound { .. } => None,
        }
    }
}

/// Limits on the candidate families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FolnerBudget {
    pub max_radius: usize,
    pub max_size: usize,
    pub max_box_side: i64,
}

impl Default for FolnerBudget {
    fn default() -> Self {
        FolnerBudget {
            max_radius: 8,
            max_size: 200_000,
            max_box_side: 1 << 24,
        }
    }
}

/// `Σ_{h∈K} |Ah △ A| / |A|` with right multiplication.
pub fn folner_defect(spec: &GroupSpec, set: &FolnerSet, k: &[GroupElement]) -> f64 {
    match set {
        FolnerSet::Box { lower, side } => box_defect(lower.len(), *side, k),
        FolnerSet::Explicit(a) => {
            let members: HashSet<&GroupElement> = a.iter().collect();
            let mut boundary = 0usize;
            for h in k {
                boundary += a
                    .iter()
                    .filter(|x| !members.contains(&spec.multiply_unchecked(x, h)))
                    .count();
            }
            2.0 * boundary as f64 / a.len() as f64
        }
    }
}

/// Exact defect of `[0, L)^d`: `|A + h △ A| = 2 (L^d − Π max(0, L − |h_i|))`.
fn box_defect(d: usize, side: i64, k: &[GroupElement]) -> f64 {
    let vol = (side as f64).powi(d as i32);
    let mut total = 0.0;
    for h in k {
        if let GroupElement::Lattice(v) = h {
            let overlap: f64 = v.iter().map(|x| (side - x.abs()).max(0) as f64).product();
            total += 2.0 * (vol - overlap) / vol;
        }
    }
    total
}

/// One set examined during a search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FolnerCandidate {
    pub family: &'static str,
    pub size: u128,
    pub defect: f64,
}

struct Best {
    defect: f64,
    size: u128,
    family: &'static str,
    tried: usize,
    trace: Vec<FolnerCandidate>,
}

impl Best {
    fn new() -> Self {
        Best {
            defect: f64::INFINITY,
            size: 0,
            family: "none",
            tried: 0,
            trace: Vec::new(),
        }
    }

    fn offer(&mut self, defect: f64, size: u128, family: &'static str) {
        self.tried += 1;
        self.trace.push(FolnerCandidate { family, size, defect });
        if defect < self.defect {
            self.defect = defect;
            self.size = size;
            self.family = family;
        }
    }
}

/// Tries, in order: the whole group (finite backends), boxes (`ℤ^d`) or lamp
/// boxes (lamplighter), word-metric balls of `K`, then greedy growth from the
/// identity. Returns the first set with defect at most `epsilon`.
pub fn folner_search(
    spec: &GroupSpec,
    k: &[GroupElement],
    epsilon: f64,
    budget: FolnerBudget,
) -> Result<FolnerOutcome, AmenabilityError> {
    folner_search_traced(spec, k, epsilon, budget).map(|(out, _)| out)
}

/// [`folner_search`] together with every candidate it examined, in order.
pub fn folner_search_traced(
    spec: &GroupSpec,
    k: &[GroupElement],
    epsilon: f64,
    budget: FolnerBudget,
) -> Result<(FolnerOutcome, Vec<FolnerCandidate>), AmenabilityError> {
    if !(epsilon > 0.0) {
        return Err(AmenabilityError::InvalidFolnerRequest(
            "epsilon must be positive".into(),
        ));
    }
    if k.is_empty() {
        return Err(AmenabilityError::InvalidFolnerRequest("K must be nonempty".into()));
    }
    for h in k {
        let inv = spec.inverse(h)?;
        if !k.contains(&inv) {
            return Err(GroupError::GeneratorsNotSymmetric(spec.format_element(h)).into());
        }
    }
    let mut k: Vec<GroupElement> = k.to_vec();
    k.sort();
    k.dedup();
    let found = |set: FolnerSet, defect: f64, family: &'static str, k: &[GroupElement]| {
        FolnerOutcome::Found(FolnerCertificate {
            size: set.len(),
            set,
            k: k.to_vec(),
            defect,
            epsilon,
            family,
        })
    };
    let mut best = Best::new();

    if let Some(all) = spec.finite_elements() {
        let set = FolnerSet::Explicit(all);
        let d = folner_defect(spec, &set, &k);
        best.offer(d, set.len(), "whole_group");
        if d <= epsilon {
            return Ok((found(set, d, "whole_group", &k), best.trace));
        }
    }

    match spec.target() {
        GroupSpec::Lattice { dim } if *dim > 0 => {
            if let Some((side, d)) = smallest_box(*dim, &k, epsilon, budget.max_box_side, &mut best) {
                let set = FolnerSet::Box {
                    lower: vec![0; *dim],
                    side,
                };
                return Ok((found(set, d, "box", &k), best.trace));
            }
        }
        GroupSpec::Lamplighter => {
            let mut side = 1i64;
            while side < 63 && ((1u128 << side) * side as u128) <= budget.max_size as u128 {
                let set = FolnerSet::Explicit(lamp_box(side));
                let d = folner_defect(spec, &set, &k);
                best.offer(d, set.len(), "lamp_box");
                if d <= epsilon {
                    return Ok((found(set, d, "lamp_box", &k), best.trace));
                }
                side += 1;
            }
        }
        _ => {}
    }

    for radius in 0..=budget.max_radius {
        let b = match ball(spec, radius, &k, budget.max_size) {
            Ok(b) => b,
            Err(GroupError::BallTooLarge { .. }) => break,
            Err(e) => return Err(e.into()),
        };
        let mut elems = b.elements().to_vec();
        elems.sort();
        let set = FolnerSet::Explicit(elems);
        let d = folner_defect(spec, &set, &k);
        best.offer(d, set.len(), "ball");
        if d <= epsilon {
            return Ok((found(set, d, "ball", &k), best.trace));
        }
    }

    if let Some((set, d)) = greedy(spec, &k, epsilon, budget.max_size.min(GREEDY_LIMIT), &mut best) {
        return Ok((found(set, d, "greedy", &k), best.trace));
    }

    let out = FolnerOutcome::NotFound {
        best_defect: best.defect,
        best_size: best.size,
        best_family: best.family,
        candidates: best.tried,
    };
    Ok((out, best.trace))
}

const GREEDY_LIMIT: usize = 2_000;

/// Smallest side `L` with box defect at most `epsilon`; the defect is
/// nonincreasing in `L`, so doubling then bisection finds it.
fn smallest_box(d: usize, k: &[GroupElement], epsilon: f64, max_side: i64, best: &mut Best) -> Option<(i64, f64)> {
    let mut hi = 1i64;
    loop {
        let v = box_defect(d, hi, k);
        best.offer(v, (hi as u128).pow(d as u32), "box");
        if v <= epsilon {
            break;
        }
        if hi >= max_side {
            return None;
        }
        hi = (hi * 2).min(max_side);
    }
    let mut lo = hi / 2;
    // invariant: defect(lo) > epsilon (or lo == 0), defect(hi) <= epsilon
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if box_defect(d, mid, k) <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((hi, box_defect(d, hi, k)))
}

/// All `(f, t)` with `supp f ⊂ [0, L)` and `t ∈ [0, L)`.
fn lamp_box(side: i64) -> Vec<GroupElement> {
    let mut out = Vec::with_capacity((1usize << side) * side as usize);
    for mask in 0u64..(1u64 << side) {
        let lamps: Vec<i64> = (0..side).filter(|i| mask >> i & 1 == 1).collect();
        for position in 0..side {
            out.push(GroupElement::Lamplighter {
                lamps: lamps.clone(),
                position,
            });
        }
    }
    out.sort();
    out
}

/// Grows a set from the identity, each time adding the boundary element that
/// gives the smallest defect (ties by canonical order).
fn greedy(
    spec: &GroupSpec,
    k: &[GroupElement],
    epsilon: f64,
    max_size: usize,
    best: &mut Best,
) -> Option<(FolnerSet, f64)> {
    let k_inv: Vec<GroupElement> = k.iter().map(|h| spec.inverse_unchecked(h)).collect();
    let mut set: BTreeSet<GroupElement> = BTreeSet::new();
    // frontier keyed by (boundary change, element) so the first entry is the pick
    let mut queue: BTreeSet<(i64, GroupElement)> = BTreeSet::new();
    let mut score: HashMap<GroupElement, i64> = HashMap::new();
    // number of pairs (a, h) with a h outside the set
    let mut boundary: i64 = 0;
    let mut x = spec.identity();
    loop {
        boundary += delta(spec, k, &k_inv, &set, &x);
        set.insert(x.clone());
        // only neighbours of x see a different boundary change
        for (h, hi) in k.iter().zip(&k_inv) {
            for y in [spec.multiply_unchecked(&x, h), spec.multiply_unchecked(&x, hi)] {
                if set.contains(&y) {
                    continue;
                }
                if let Some(old) = score.get(&y) {
                    queue.remove(&(*old, y.clone()));
                }
                let d = delta(spec, k, &k_inv, &set, &y);
                score.insert(y.clone(), d);
                queue.insert((d, y));
            }
        }
        let d = 2.0 * boundary as f64 / set.len() as f64;
        best.offer(d, set.len() as u128, "greedy");
        if d <= epsilon {
            return Some((FolnerSet::Explicit(set.into_iter().collect()), d));
        }
        if set.len() >= max_size {
            return None;
        }
        let (_, next) = queue.pop_first()?;
        score.remove(&next);
        x = next;
    }
}

/// Change in the boundary count when `x` joins `set`.
fn delta(
    spec: &GroupSpec,
    k: &[GroupElement],
    k_inv: &[GroupElement],
    set: &BTreeSet<GroupElement>,
    x: &GroupElement,
) -> i64 {
    let mut d = 0i64;
    for (h, hi) in k.iter().zip(k_inv) {
        let out = spec.multiply_unchecked(x, h);
        if out != *x && !set.contains(&out) {
            d += 1;
        }
        if set.contains(&spec.multiply_unchecked(x, hi)) {
            d -= 1;
        }
    }
    d
}

/// Mirrors the inductive construction: stage `i` (counted from 1) searches for a
/// `(K_i ∪ B_{i−1} ∪ B_{i−1}⁻¹, ε_i)` set `B_i`.
pub fn folner_sequence(
    spec: &GroupSpec,
    k_schedule: &[Vec<GroupElement>],
    eps_schedule: &[f64],
    budget: FolnerBudget,
) -> Result<Vec<FolnerCertificate>, AmenabilityError> {
    if k_schedule.len() != eps_schedule.len() {
        return Err(AmenabilityError::InvalidFolnerRequest(
            "K and epsilon schedules differ in length".into(),
        ));
    }
    let mut out: Vec<FolnerCertificate> = Vec::new();
    for (i, (k, &eps)) in k_schedule.iter().zip(eps_schedule).enumerate() {
        let stage = i + 1;
        let mut kk: BTreeSet<GroupElement> = k.iter().cloned().collect();
        if let Some(prev) = out.last() {
            if prev.set.len() > budget.max_size as u128 {
                return Err(AmenabilityError::FolnerNotFound {
                    stage,
                    best_defect: f64::INFINITY,
                });
            }
            for b in prev.set.elements() {
                kk.insert(spec.inverse_unchecked(&b));
                kk.insert(b);
            }
        }
        let id = spec.identity();
        kk.remove(&id);
        if kk.is_empty() {
            kk.insert(id);
        }
        let kv: Vec<GroupElement> = kk.into_iter().collect();
        match folner_search(spec, &kv, eps, budget)? {
            FolnerOutcome::Found(c) => out.push(c),
            FolnerOutcome::NotFound { best_defect, .. } => {
                return Err(AmenabilityError::FolnerNotFound { stage, best_defect })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    #[test]
    fn z_interval() {
        let z = GroupSpec::lattice(1);
        let out = folner_search(&z, &z.standard_generators(), 0.5, FolnerBudget::default()).unwrap();
        let c = out.certificate().unwrap();
        assert_eq!(
            c.set,
            FolnerSet::Box {
                lower: vec![0],
                side: 8
            }
        );
        assert_eq!(c.defect, 0.5);
        // explicit recount agrees with the closed form
        let explicit = FolnerSet::Explicit(c.set.elements());
        assert_eq!(folner_defect(&z, &explicit, &c.k), 0.5);
    }

    #[test]
    fn box_formula_matches_explicit_count() {
        let z2 = GroupSpec::lattice(2);
        let k: Vec<GroupElement> = [(1, 2), (-1, -2), (0, 3), (0, -3), (1, 0), (-1, 0)]
            .iter()
            .map(|&(a, b)| GroupElement::Lattice(vec![a, b]))
            .collect();
        for side in 1..8 {
            let bx = FolnerSet::Box {
                lower: vec![0, 0],
                side,
            };
            let ex = FolnerSet::Explicit(bx.elements());
            assert!((folner_defect(&z2, &bx, &k) - folner_defect(&z2, &ex, &k)).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_group_whole() {
        let d = GroupSpec::finite(FiniteGroup::dihedral(5));
        let out = folner_search(&d, &d.standard_generators(), 0.1, FolnerBudget::default()).unwrap();
        let c = out.certificate().unwrap();
        assert_eq!(c.size, 10);
        assert_eq!(c.defect, 0.0);
    }

    #[test]
    fn lamplighter_lamp_box() {
        let l = GroupSpec::Lamplighter;
        let out = folner_search(&l, &l.standard_generators(), 0.5, FolnerBudget::default()).unwrap();
        let c = out.certificate().unwrap();
        assert_eq!(c.family, "lamp_box");
        assert_eq!(c.size, 8 * 256);
        assert!((c.defect - 0.5).abs() < 1e-12);
    }

    #[test]
    fn free_group_fails() {
        let f = GroupSpec::free(2);
        let out = folner_search(&f, &f.standard_generators(), 0.5, FolnerBudget::default()).unwrap();
        match out {
            FolnerOutcome::NotFound { best_defect, .. } => assert!(best_defect > 1.0),
            FolnerOutcome::Found(_) => panic!("free group has no Følner sets"),
        }
    }

    #[test]
    fn greedy_finds_intervals_in_z() {
        let z = GroupSpec::lattice(1);
        let mut best = Best::new();
        let (set, d) = greedy(&z, &z.standard_generators(), 0.5, 100, &mut best).unwrap();
        assert_eq!(set.len(), 8);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn sequence_grows() {
        let z = GroupSpec::lattice(1);
        let gens = z.standard_generators();
        let certs = folner_sequence(
            &z,
            &[gens.clone(), gens.clone(), gens],
            &[0.5, 0.5, 0.5],
            FolnerBudget::default(),
        )
        .unwrap();
        let sizes: Vec<u128> = certs.iter().map(|c| c.size).collect();
        assert!(sizes.windows(2).all(|p| p[0] < p[1]), "{sizes:?}");
    }
}
