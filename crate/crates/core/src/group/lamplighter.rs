//! `ℤ₂ ≀ ℤ` as (sorted lamp support, lamp position).

use super::GroupElement;

/// `(f, t)(g, s) = (f ⊕ g(· − t), t + s)`.
pub(crate) fn multiply(f: &[i64], t: i64, g: &[i64], s: i64) -> (Vec<i64>, i64) {
    (sym_diff(f, g, t), t + s)
}

pub(crate) fn inverse(f: &[i64], t: i64) -> (Vec<i64>, i64) {
    (f.iter().map(|x| x - t).collect(), -t)
}

/// `f △ (g + shift)` on sorted supports.
fn sym_diff(f: &[i64], g: &[i64], shift: i64) -> Vec<i64> {
    let mut out = Vec::with_capacity(f.len() + g.len());
    let (mut i, mut j) = (0, 0);
    while i < f.len() || j < g.len() {
        let gj = g.get(j).map(|x| x + shift);
        match (f.get(i), gj) {
            (Some(&a), Some(b)) if a == b => {
                i += 1;
                j += 1;
            }
            (Some(&a), Some(b)) if a < b => {
                out.push(a);
                i += 1;
            }
            (Some(_), Some(b)) | (None, Some(b)) => {
                out.push(b);
                j += 1;
            }
            (Some(&a), None) => {
                out.push(a);
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// `a` (toggle the lamp at the current position), `t`, `t⁻¹`.
pub(crate) fn generators() -> Vec<GroupElement> {
    vec![
        GroupElement::Lamplighter {
            lamps: vec![0],
            position: 0,
        },
        GroupElement::Lamplighter {
            lamps: Vec::new(),
            position: 1,
        },
        GroupElement::Lamplighter {
            lamps: Vec::new(),
            position: -1,
        },
    ]
}

pub(crate) fn parse(text: &str) -> Option<(Vec<i64>, i64)> {
    let (set, pos) = text.split_once('@')?;
    let inner = set.trim().strip_prefix('{')?.strip_suffix('}')?.trim();
    let mut lamps: Vec<i64> = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?
    };
    lamps.sort_unstable();
    if lamps.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    Some((lamps, pos.trim().parse().ok()?))
}
