//! Countable group backends with canonical element forms.
//!
//! Every element is stored in a normal form, so structural equality and
//! hashing coincide with equality in the group.

mod ball;
mod finite;
mod free;
mod hom;
mod lamplighter;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use ball::{ball, Ball};
pub use finite::FiniteGroup;
pub use free::{free_inverse_letter, free_sphere_size, radial_return_probabilities, reduce_free};
pub use hom::{apply_hom, Homomorphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element {element} does not belong to the {backend} backend")]
    BackendMismatch { backend: String, element: String },
    #[error("ball of radius {radius} exceeds the cap of {cap} elements")]
    BallTooLarge { radius: usize, cap: usize },
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("cannot parse group element {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("generator list is not closed under inverses: {0} has no inverse in the list")]
    GeneratorsNotSymmetric(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),
    #[error("invalid group parameters: {0}")]
    InvalidSpec(String),
}

/// A group element in canonical form.
///
/// * `Finite(i)` indexes a multiplication table.
/// * `Lattice(v)` is a vector in `ℤ^d`.
/// * `Free(w)` is a freely reduced word over `2r` letters where letter `i + r`
///   is the inverse of letter `i`.
/// * `Lamplighter` is a finite set of lit lamps (sorted) and a lamp position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupElement {
    Finite(u32),
    Lattice(Vec<i64>),
    Free(Vec<u8>),
    Lamplighter { lamps: Vec<i64>, position: i64 },
}

/// A group backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Finite(Arc<FiniteGroup>),
    Lattice {
        dim: usize,
    },
    Free {
        rank: usize,
    },
    /// The lamplighter group `ℤ₂ ≀ ℤ`.
    Lamplighter,
    /// The image of a free group under a homomorphism; elements live in the
    /// target backend.
    Quotient(Arc<Homomorphism>),
}

impl GroupSpec {
    pub fn finite(group: FiniteGroup) -> Self {
        GroupSpec::Finite(Arc::new(group))
    }

    pub fn lattice(dim: usize) -> Self {
        GroupSpec::Lattice { dim }
    }

    pub fn free(rank: usize) -> Self {
        GroupSpec::Free { rank }
    }

    pub fn quotient(hom: Homomorphism) -> Self {
        GroupSpec::Quotient(Arc::new(hom))
    }

    /// The backend elements actually live in.
    pub fn target(&self) -> &GroupSpec {
        match self {
            GroupSpec::Quotient(h) => h.target().target(),
            other => other,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GroupSpec::Finite(g) => format!("finite({})", g.order()),
            GroupSpec::Lattice { dim } => format!("Z^{dim}"),
            GroupSpec::Free { rank } => format!("F_{rank}"),
            GroupSpec::Lamplighter => "lamplighter".to_string(),
            GroupSpec::Quotient(h) => format!("quotient(F_{} -> {})", h.rank(), h.target().name()),
        }
    }

    /// Order of the group when it is a finite backend.
    pub fn finite_order(&self) -> Option<usize> {
        match self.target() {
            GroupSpec::Finite(g) => Some(g.order()),
            GroupSpec::Lattice { dim: 0 } => Some(1),
            _ => None,
        }
    }

    /// All elements of a finite backend, in canonical order.
    pub fn finite_elements(&self) -> Option<Vec<GroupElement>> {
        match self.target() {
            GroupSpec::Finite(g) => Some((0..g.order() as u32).map(GroupElement::Finite).collect()),
            GroupSpec::Lattice { dim: 0 } => Some(vec![GroupElement::Lattice(Vec::new())]),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.target() {
            GroupSpec::Finite(g) => GroupElement::Finite(g.identity()),
            GroupSpec::Lattice { dim } => GroupElement::Lattice(vec![0; *dim]),
            GroupSpec::Free { .. } => GroupElement::Free(Vec::new()),
            GroupSpec::Lamplighter => GroupElement::Lamplighter {
                lamps: Vec::new(),
                position: 0,
            },
            GroupSpec::Quotient(_) => unreachable!("target is never a quotient"),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self.target(), g) {
            (GroupSpec::Finite(t), GroupElement::Finite(i)) => (*i as usize) < t.order(),
            (GroupSpec::Lattice { dim }, GroupElement::Lattice(v)) => v.len() == *dim,
            (GroupSpec::Free { rank }, GroupElement::Free(w)) => {
                w.iter().all(|&l| (l as usize) < 2 * rank) && reduce_free(*rank, w) == *w
            }
            (GroupSpec::Lamplighter, GroupElement::Lamplighter { lamps, .. }) => lamps.windows(2).all(|p| p[0] < p[1]),
            _ => false,
        }
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::BackendMismatch {
                backend: self.name(),
                element: format!("{g:?}"),
            })
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.multiply_unchecked(g, h))
    }

    /// Product of two elements already known to belong to this backend.
    pub fn multiply_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (self.target(), g, h) {
            (GroupSpec::Finite(t), GroupElement::Finite(a), GroupElement::Finite(b)) => {
                GroupElement::Finite(t.multiply(*a, *b))
            }
            (GroupSpec::Lattice { .. }, GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                GroupElement::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupSpec::Free { rank }, GroupElement::Free(a), GroupElement::Free(b)) => {
                GroupElement::Free(free::multiply(*rank, a, b))
            }
            (
                GroupSpec::Lamplighter,
                GroupElement::Lamplighter { lamps: f, position: t },
                GroupElement::Lamplighter { lamps: g, position: s },
            ) => {
                let (lamps, position) = lamplighter::multiply(f, *t, g, *s);
                GroupElement::Lamplighter { lamps, position }
            }
            _ => panic!("multiply_unchecked called with elements from another backend"),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        Ok(self.inverse_unchecked(g))
    }

    pub fn inverse_unchecked(&self, g: &GroupElement) -> GroupElement {
        match (self.target(), g) {
            (GroupSpec::Finite(t), GroupElement::Finite(a)) => GroupElement::Finite(t.inverse(*a)),
            (GroupSpec::Lattice { .. }, GroupElement::Lattice(a)) => {
                GroupElement::Lattice(a.iter().map(|x| -x).collect())
            }
            (GroupSpec::Free { rank }, GroupElement::Free(a)) => {
                GroupElement::Free(a.iter().rev().map(|&l| free_inverse_letter(*rank, l)).collect())
            }
            (GroupSpec::Lamplighter, GroupElement::Lamplighter { lamps, position }) => {
                let (lamps, position) = lamplighter::inverse(lamps, *position);
                GroupElement::Lamplighter { lamps, position }
            }
            _ => panic!("inverse_unchecked called with an element from another backend"),
        }
    }

    /// Product of a sequence of elements, left to right.
    pub fn product<'a, I>(&self, items: I) -> Result<GroupElement, GroupError>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut acc = self.identity();
        for g in items {
            acc = self.multiply(&acc, g)?;
        }
        Ok(acc)
    }

    /// Default symmetric generating set.
    ///
    /// `±e_i` for `ℤ^d`, the `2r` letters for `F_r`, `a, t, t⁻¹` for the
    /// lamplighter, every non-identity element for a finite group and the
    /// images of the free letters for a quotient.
    pub fn standard_generators(&self) -> Vec<GroupElement> {
        match self {
            GroupSpec::Finite(g) => (0..g.order() as u32)
                .filter(|&i| i != g.identity())
                .map(GroupElement::Finite)
                .collect(),
            GroupSpec::Lattice { dim } => {
                let mut out = Vec::with_capacity(2 * dim);
                for i in 0..*dim {
                    for s in [1, -1] {
                        let mut v = vec![0; *dim];
                        v[i] = s;
                        out.push(GroupElement::Lattice(v));
                    }
                }
                out
            }
            GroupSpec::Free { rank } => (0..2 * *rank as u8).map(|l| GroupElement::Free(vec![l])).collect(),
            GroupSpec::Lamplighter => lamplighter::generators(),
            GroupSpec::Quotient(h) => h.images().to_vec(),
        }
    }

    /// Parses an element literal for this backend.
    ///
    /// Finite: `"3"`. Lattice: `"1,-2"` or `"(1,-2)"`. Free: `"abA"` with
    /// uppercase for inverses and `"e"` or `""` for the identity.
    /// Lamplighter: `"{0,2}@1"`.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement, GroupError> {
        let err = |reason: &str| GroupError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        let g = match self.target() {
            GroupSpec::Finite(_) => GroupElement::Finite(t.parse().map_err(|_| err("expected an index"))?),
            GroupSpec::Lattice { dim } => {
                let inner = t.trim_start_matches('(').trim_end_matches(')').trim();
                let v: Vec<i64> = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|s| s.trim().parse::<i64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| err("expected comma-separated integers"))?
                };
                if v.len() != *dim {
                    return Err(err(&format!("expected {dim} coordinates")));
                }
                GroupElement::Lattice(v)
            }
            GroupSpec::Free { rank } => {
                if t == "e" || t.is_empty() {
                    GroupElement::Free(Vec::new())
                } else {
                    let mut letters = Vec::with_capacity(t.len());
                    for c in t.chars() {
                        letters.push(free::letter_from_char(*rank, c).ok_or_else(|| err("bad letter"))?);
                    }
                    GroupElement::Free(reduce_free(*rank, &letters))
                }
            }
            GroupSpec::Lamplighter => {
                let (lamps, pos) = lamplighter::parse(t).ok_or_else(|| err("expected {i,j,...}@p"))?;
                GroupElement::Lamplighter { lamps, position: pos }
            }
            GroupSpec::Quotient(_) => unreachable!("target is never a quotient"),
        };
        self.check(&g)?;
        Ok(g)
    }

    /// Inverse of [`GroupSpec::parse_element`].
    pub fn format_element(&self, g: &GroupElement) -> String {
        match (self.target(), g) {
            (GroupSpec::Free { rank }, GroupElement::Free(w)) => free::format(*rank, w),
            _ => g.to_string(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Finite(i) => write!(f, "{i}"),
            GroupElement::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Free(w) => {
                if w.is_empty() {
                    write!(f, "e")
                } else {
                    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                    write!(f, "[{}]", parts.join(" "))
                }
            }
            GroupElement::Lamplighter { lamps, position } => {
                let parts: Vec<String> = lamps.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}@{}", parts.join(","), position)
            }
        }
    }
}
