//! Free groups as reduced words, plus the radial return-probability recursion.

/// Inverse letter in `F_rank`: `i ↔ i + rank`.
#[inline]
pub fn free_inverse_letter(rank: usize, l: u8) -> u8 {
    let r = rank as u8;
    if l < r {
        l + r
    } else {
        l - r
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce_free(rank: usize, letters: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last().is_some_and(|&p| p == free_inverse_letter(rank, l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub(crate) fn multiply(rank: usize, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut k = 0;
    while k < a.len() && k < b.len() && a[a.len() - 1 - k] == free_inverse_letter(rank, b[k]) {
        k += 1;
    }
    let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
    out.extend_from_slice(&a[..a.len() - k]);
    out.extend_from_slice(&b[k..]);
    out
}

pub(crate) fn letter_from_char(rank: usize, c: char) -> Option<u8> {
    let (base, offset) = if c.is_ascii_lowercase() {
        (c as u8 - b'a', 0)
    } else if c.is_ascii_uppercase() {
        (c as u8 - b'A', rank as u8)
    } else {
        return None;
    };
    ((base as usize) < rank).then_some(base + offset)
}

pub(crate) fn format(rank: usize, w: &[u8]) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    w.iter()
        .map(|&l| {
            let r = rank as u8;
            if l < r {
                (b'a' + l) as char
            } else {
                (b'A' + l - r) as char
            }
        })
        .collect()
}

/// Number of reduced words of length `n` in `F_rank`.
pub fn free_sphere_size(rank: usize, n: usize) -> u128 {
    if n == 0 {
        1
    } else {
        2 * rank as u128 * (2 * rank as u128 - 1).pow(n as u32 - 1)
    }
}

/// Return probabilities `p_n = P(X_n = id)` for the simple random walk on
/// `F_rank`, `n = 0..=n_max`, via the word-length chain.
pub fn radial_return_probabilities(rank: usize, n_max: usize) -> Vec<f64> {
    let q = 2.0 * rank as f64;
    let up = (q - 1.0) / q;
    let down = 1.0 / q;
    let mut dist = vec![0.0; n_max + 2];
    dist[0] = 1.0;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    for step in 1..=n_max {
        let mut next = vec![0.0; n_max + 2];
        let top = step.min(n_max);
        for d in 0..top {
            let p = dist[d];
            if p == 0.0 {
                continue;
            }
            if d == 0 {
                next[1] += p;
            } else {
                next[d + 1] += p * up;
                next[d - 1] += p * down;
            }
        }
        dist = next;
        out.push(dist[0]);
    }
    out
}
