//! Word-metric balls.

use std::collections::HashMap;

use super::{GroupElement, GroupError, GroupSpec};

/// Elements of word length at most `radius`, in breadth-first order: by
/// length, then by discovery through the generator list.
#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    elements: Vec<GroupElement>,
    lengths: Vec<usize>,
    index: HashMap<GroupElement, usize>,
}

/// Enumerates the ball of the given radius; fails once more than `cap`
/// elements are found.
pub fn ball(spec: &GroupSpec, radius: usize, generators: &[GroupElement], cap: usize) -> Result<Ball, GroupError> {
    for g in generators {
        let inv = spec.inverse(g)?;
        if !generators.contains(&inv) {
            return Err(GroupError::GeneratorsNotSymmetric(spec.format_element(g)));
        }
    }
    let id = spec.identity();
    let mut elements = vec![id.clone()];
    let mut lengths = vec![0];
    let mut index = HashMap::from([(id, 0)]);
    if cap == 0 {
        return Err(GroupError::BallTooLarge { radius, cap });
    }
    let mut start = 0;
    for r in 1..=radius {
        let end = elements.len();
        for i in start..end {
            for s in generators {
                let g = spec.multiply_unchecked(&elements[i], s);
                if !index.contains_key(&g) {
                    if elements.len() == cap {
                        return Err(GroupError::BallTooLarge { radius, cap });
                    }
                    index.insert(g.clone(), elements.len());
                    elements.push(g);
                    lengths.push(r);
                }
            }
        }
        if elements.len() == end {
            break;
        }
        start = end;
    }
    Ok(Ball {
        radius,
        elements,
        lengths,
        index,
    })
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.lengths[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    /// `table[i][j]` is the index of `elements[i] · multipliers[j]` when it
    /// stays inside the ball.
    pub fn right_mult_table(&self, spec: &GroupSpec, multipliers: &[GroupElement]) -> Vec<Vec<Option<usize>>> {
        self.elements
            .iter()
            .map(|g| {
                multipliers
                    .iter()
                    .map(|h| self.index_of(&spec.multiply_unchecked(g, h)))
                    .collect()
            })
            .collect()
    }

    /// Number of elements at each word length `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &l in &self.lengths {
            out[l] += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    #[test]
    fn small_balls() {
        let z = GroupSpec::lattice(1);
        assert_eq!(ball(&z, 3, &z.standard_generators(), 100).unwrap().len(), 7);
        let f2 = GroupSpec::free(2);
        assert_eq!(ball(&f2, 2, &f2.standard_generators(), 100).unwrap().len(), 17);
        let z2 = GroupSpec::lattice(2);
        let b = ball(&z2, 2, &z2.standard_generators(), 100).unwrap();
        // diamond |x| + |y| <= 2
        let oracle = (-2i64..=2)
            .flat_map(|x| (-2i64..=2).map(move |y| (x, y)))
            .filter(|(x, y)| x.abs() + y.abs() <= 2)
            .count();
        assert_eq!(b.len(), oracle);
        assert_eq!(b.len(), 13);
    }

    #[test]
    fn cap_and_symmetry_errors() {
        let f2 = GroupSpec::free(2);
        assert_eq!(
            ball(&f2, 3, &f2.standard_generators(), 20).unwrap_err(),
            GroupError::BallTooLarge { radius: 3, cap: 20 }
        );
        let z = GroupSpec::lattice(1);
        assert!(matches!(
            ball(&z, 2, &[GroupElement::Lattice(vec![1])], 10),
            Err(GroupError::GeneratorsNotSymmetric(_))
        ));
    }

    #[test]
    fn finite_ball_saturates() {
        let d = GroupSpec::finite(FiniteGroup::dihedral(4));
        let b = ball(&d, 10, &d.standard_generators(), 100).unwrap();
        assert_eq!(b.len(), 8);
    }

    #[test]
    fn lamplighter_sphere_one() {
        let l = GroupSpec::Lamplighter;
        let b = ball(&l, 1, &l.standard_generators(), 100).unwrap();
        assert_eq!(b.sphere_sizes(), vec![1, 3]);
    }
}
