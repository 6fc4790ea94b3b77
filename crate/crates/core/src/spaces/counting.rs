//! Exact class counts and ball sizes in checked `u128` arithmetic.

use crate::error::{Error, Result};

/// Unsigned Stirling number of the first kind `c(n, k)`: permutations of `n`
/// elements with exactly `k` cycles.
pub fn stirling_first(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    // row[j] = c(m, j)
    let mut row = vec![0u128; n + 1];
    row[0] = 1;
    for m in 1..=n {
        // columns below `lo` never feed into c(n, k)
        let lo = k.saturating_sub(n - m).max(1);
        for j in (lo..=m).rev() {
            let grown = row[j]
                .checked_mul((m - 1) as u128)
                .and_then(|v| v.checked_add(row[j - 1]))
                .ok_or(Error::Overflow("stirling number"))?;
            row[j] = grown;
        }
        row[0] = 0;
    }
    Ok(row[k])
}

/// Number of permutations of `n` elements at Cayley distance at most `radius`
/// from a fixed one: `Σ_{j ≤ radius} c(n, n − j)`.
///
/// Runs the recurrence along diagonals `d(m, j) = c(m, m − j)`, where
/// `d(m, j) = d(m − 1, j) + (m − 1)·d(m − 1, j − 1)`, so only `radius + 1`
/// values per row are kept and large `n` stays cheap.
pub fn permutation_ball_size(n: usize, radius: usize) -> Result<u128> {
    let r = radius.min(n.saturating_sub(1));
    let mut diag = vec![0u128; r + 1];
    diag[0] = 1;
    for m in 1..=n {
        for j in (1..=r).rev() {
            diag[j] = diag[j - 1]
                .checked_mul((m - 1) as u128)
                .and_then(|v| v.checked_add(diag[j]))
                .ok_or(Error::Overflow("permutation ball size"))?;
        }
    }
    diag.iter()
        .try_fold(0u128, |acc, &v| acc.checked_add(v))
        .ok_or(Error::Overflow("permutation ball size"))
}

pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::Overflow("binomial"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// `Σ_{k ≤ radius} C(n, k)(q − 1)^k`.
pub fn hamming_ball_size(q: u32, n: usize, radius: usize) -> Result<u128> {
    let mut total = 0u128;
    for k in 0..=radius.min(n) {
        let term = binomial(n, k)?
            .checked_mul(
                (q as u128 - 1)
                    .checked_pow(k as u32)
                    .ok_or(Error::Overflow("hamming ball size"))?,
            )
            .ok_or(Error::Overflow("hamming ball size"))?;
        total = total
            .checked_add(term)
            .ok_or(Error::Overflow("hamming ball size"))?;
    }
    Ok(total)
}

pub fn factorial(n: usize) -> Result<u128> {
    (1..=n as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .ok_or(Error::Overflow("factorial"))
}
