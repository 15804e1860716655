//! Fixtures shared by the benchmarks.

use kestenlab::group::GroupElement;
use kestenlab::{ExtensionSystem, GroupSpec, Involution, Potential, Shift};

/// Uniform walk on `ℤ^d` driven by the full `2d`-shift.
pub fn lattice_extension(d: usize) -> ExtensionSystem {
    let s = Shift::full(2 * d).unwrap();
    let p = Potential::constant(&s, -((2 * d) as f64).ln()).unwrap();
    let dagger = (0..2 * d).map(|l| l ^ 1).collect();
    let inv = Involution::new(&s, dagger).unwrap();
    let images = (0..2 * d)
        .map(|l| {
            let mut v = vec![0i64; d];
            v[l / 2] = if l % 2 == 0 { 1 } else { -1 };
            GroupElement::Lattice(v)
        })
        .collect();
    ExtensionSystem::new(p, GroupSpec::lattice(d), images, Some(inv)).unwrap()
}

/// Lazy lamplighter walk with holding weight 0.7.
pub fn lamplighter_extension() -> ExtensionSystem {
    let s = Shift::full(4).unwrap();
    let p = Potential::from_letter_weights(&s, &[0.1f64.ln(), 0.1f64.ln(), 0.1f64.ln(), 0.7f64.ln()]).unwrap();
    let inv = Involution::new(&s, vec![0, 2, 1, 3]).unwrap();
    let g = GroupSpec::Lamplighter;
    let mut images = g.standard_generators();
    images.push(g.identity());
    ExtensionSystem::new(p, g, images, Some(inv)).unwrap()
}
