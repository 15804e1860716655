//! Counting reduced words that map to the identity.

use std::collections::HashMap;

use serde::Serialize;

use super::AmenabilityError;
use crate::group::{free_inverse_letter, GroupElement, Homomorphism};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CogrowthSeries {
    pub rank: usize,
    /// `c_n` for `n = 1..=n_max`.
    pub counts: Vec<u128>,
}

impl CogrowthSeries {
    /// `(1/n) log c_n`, or `None` when `c_n = 0`.
    pub fn exponent(&self, n: usize) -> Option<f64> {
        let c = self.counts[n - 1];
        (c > 0).then(|| (c as f64).ln() / n as f64)
    }
}

/// `c_n = |{reduced w, |w| = n : hom(w) = id}|` by a dynamic program over
/// (last letter, image) states.
pub fn cogrowth_series(hom: &Homomorphism, n_max: usize, cap: usize) -> Result<CogrowthSeries, AmenabilityError> {
    let r = hom.rank();
    let q = 2 * r;
    let target = hom.target();
    let id = target.identity();
    let mut elems: Vec<GroupElement> = Vec::new();
    let mut counts: Vec<Vec<u128>> = Vec::new();
    let mut index: HashMap<GroupElement, usize> = HashMap::new();
    for l in 0..q as u8 {
        let g = hom.letter_image(l).clone();
        let i = *index.entry(g.clone()).or_insert_with(|| {
            elems.push(g);
            counts.push(vec![0; q]);
            elems.len() - 1
        });
        counts[i][l as usize] += 1;
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let c: u128 = index.get(&id).map_or(0, |&i| counts[i].iter().sum());
        out.push(c);
        if n == n_max {
            break;
        }
        let mut ne: Vec<GroupElement> = Vec::new();
        let mut nc: Vec<Vec<u128>> = Vec::new();
        let mut ni: HashMap<GroupElement, usize> = HashMap::new();
        for (g, row) in elems.iter().zip(&counts) {
            for (last, &cnt) in row.iter().enumerate() {
                if cnt == 0 {
                    continue;
                }
                let forbidden = free_inverse_letter(r, last as u8);
                for l in (0..q as u8).filter(|&l| l != forbidden) {
                    let h = target.multiply_unchecked(g, hom.letter_image(l));
                    let slot = match ni.get(&h) {
                        Some(&s) => s,
                        None => {
                            if ne.len() >= cap {
                                return Err(AmenabilityError::StateCapExceeded { cap });
                            }
                            ni.insert(h.clone(), ne.len());
                            ne.push(h);
                            nc.push(vec![0; q]);
                            ne.len() - 1
                        }
                    };
                    nc[slot][l as usize] += cnt;
                }
            }
        }
        elems = ne;
        counts = nc;
        index = ni;
    }
    Ok(CogrowthSeries { rank: r, counts: out })
}
