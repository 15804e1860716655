//! Homomorphisms out of a free group.

use super::{GroupElement, GroupError, GroupSpec};

/// `F_rank → target`, fixed by the images of the `rank` free generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    rank: usize,
    target: GroupSpec,
    /// `2·rank` images; `images[i + rank]` is the inverse of `images[i]`.
    images: Vec<GroupElement>,
}

impl Homomorphism {
    pub fn new(rank: usize, target: GroupSpec, generator_images: Vec<GroupElement>) -> Result<Self, GroupError> {
        if generator_images.len() != rank {
            return Err(GroupError::InvalidHomomorphism(format!(
                "expected {rank} generator images, got {}",
                generator_images.len()
            )));
        }
        let mut images = generator_images;
        for i in 0..rank {
            let inv = target
                .inverse(&images[i])
                .map_err(|e| GroupError::InvalidHomomorphism(e.to_string()))?;
            images.push(inv);
        }
        Ok(Homomorphism { rank, target, images })
    }

    /// The map `F_rank → F_rank` sending each generator to itself.
    pub fn identity(rank: usize) -> Self {
        let target = GroupSpec::free(rank);
        let images = (0..rank as u8).map(|l| GroupElement::Free(vec![l])).collect();
        Self::new(rank, target, images).expect("free generators")
    }

    /// Abelianization `F_rank → ℤ^rank`.
    pub fn abelianization(rank: usize) -> Self {
        let target = GroupSpec::lattice(rank);
        let images = (0..rank)
            .map(|i| {
                let mut v = vec![0; rank];
                v[i] = 1;
                GroupElement::Lattice(v)
            })
            .collect();
        Self::new(rank, target, images).expect("unit vectors")
    }

    /// Every generator to the identity of `target`.
    pub fn trivial(rank: usize, target: GroupSpec) -> Self {
        let images = vec![target.identity(); rank];
        Self::new(rank, target, images).expect("identity images")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    /// Images of all `2·rank` letters.
    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn letter_image(&self, letter: u8) -> &GroupElement {
        &self.images[letter as usize]
    }

    /// Letterwise product of images; the word need not be reduced.
    pub fn apply(&self, letters: &[u8]) -> GroupElement {
        let mut acc = self.target.identity();
        for &l in letters {
            acc = self.target.multiply_unchecked(&acc, &self.images[l as usize]);
        }
        acc
    }
}

/// Image of a free-group word (reduced or not).
pub fn apply_hom(hom: &Homomorphism, letters: &[u8]) -> GroupElement {
    hom.apply(letters)
}
