//! Extension fixtures shared by the integration tests.
#![allow(dead_code)]

use kestenlab::group::GroupElement;
use kestenlab::{ExtensionSystem, GroupSpec, Involution, Potential, Shift};

fn lattice(v: &[i64]) -> GroupElement {
    GroupElement::Lattice(v.to_vec())
}

/// Full 2-shift, weights 1/2, letters stepping `±1`.
pub fn z_extension() -> ExtensionSystem {
    let s = Shift::full(2).unwrap();
    let p = Potential::constant(&s, -(2f64.ln())).unwrap();
    let inv = Involution::new(&s, vec![1, 0]).unwrap();
    ExtensionSystem::new(p, GroupSpec::lattice(1), vec![lattice(&[1]), lattice(&[-1])], Some(inv)).unwrap()
}

/// Full 4-shift, weights 1/4, letters stepping `±e_1, ±e_2`.
pub fn z2_extension() -> ExtensionSystem {
    let s = Shift::full(4).unwrap();
    let p = Potential::constant(&s, -(4f64.ln())).unwrap();
    let inv = Involution::new(&s, vec![1, 0, 3, 2]).unwrap();
    let images = vec![lattice(&[1, 0]), lattice(&[-1, 0]), lattice(&[0, 1]), lattice(&[0, -1])];
    ExtensionSystem::new(p, GroupSpec::lattice(2), images, Some(inv)).unwrap()
}

/// Full 4-shift, weights 1/4, letters `a, b, A, B` of `F_2`.
pub fn f2_extension() -> ExtensionSystem {
    let s = Shift::full(4).unwrap();
    let p = Potential::constant(&s, -(4f64.ln())).unwrap();
    let inv = Involution::new(&s, vec![2, 3, 0, 1]).unwrap();
    let images = (0..4u8).map(|l| GroupElement::Free(vec![l])).collect();
    ExtensionSystem::new(p, GroupSpec::free(2), images, Some(inv)).unwrap()
}

/// Lazy lamplighter walk: letters `a, t, t⁻¹, e` with weights
/// `0.1, 0.1, 0.1, 0.7`.
pub fn lamplighter_extension() -> ExtensionSystem {
    let s = Shift::full(4).unwrap();
    let p = Potential::from_letter_weights(&s, &[0.1f64.ln(), 0.1f64.ln(), 0.1f64.ln(), 0.7f64.ln()]).unwrap();
    let inv = Involution::new(&s, vec![0, 2, 1, 3]).unwrap();
    let g = GroupSpec::Lamplighter;
    let mut images = g.standard_generators();
    images.push(g.identity());
    ExtensionSystem::new(p, g, images, Some(inv)).unwrap()
}

/// Exact central binomial `C(2m, m)`.
pub fn central_binomial(m: u64) -> u128 {
    (1..=m as u128).fold(1u128, |acc, i| acc * (m as u128 + i) / i)
}
