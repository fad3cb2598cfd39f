//! Integer codeword lengths as an action family.
//!
//! Choosing a code book is an action with payoff `−ℓ(x)` when letter `x`
//! occurs. Restricting lengths to integers makes the induced `F` piecewise
//! linear.

use super::actions::ActionFamily;
use crate::error::{Error, Result};

/// Upper bound on the number of length vectors [`code_length_family`] will
/// enumerate.
pub const MAX_CANDIDATES: u128 = 1_000_000;

/// `Σ 2^(−ℓᵢ)`.
pub fn kraft_sum(lengths: &[u32]) -> Result<f64> {
    if lengths.is_empty() {
        return Err(Error::Empty("code lengths"));
    }
    if lengths.contains(&0) {
        return Err(Error::InvalidArgument("code lengths must be positive".into()));
    }
    Ok(lengths.iter().map(|&l| (-(l as f64)).exp2()).sum())
}

/// Exact Kraft check in integer arithmetic.
fn satisfies_kraft(lengths: &[u32], maxlen: u32) -> bool {
    let total: u128 = lengths.iter().map(|&l| 1u128 << (maxlen - l)).sum();
    total <= 1u128 << maxlen
}

/// Every length vector over `alphabet` letters with entries in
/// `1..=maxlen` that satisfies the Kraft inequality, in lexicographic order.
pub fn code_length_vectors(maxlen: u32, alphabet: usize) -> Result<Vec<Vec<u32>>> {
    if maxlen < 1 || maxlen > 64 {
        return Err(Error::InvalidArgument(format!("maxlen {maxlen} outside 1..=64")));
    }
    if !(2..=5).contains(&alphabet) {
        return Err(Error::InvalidArgument(format!("alphabet size {alphabet} outside 2..=5")));
    }
    let count = (maxlen as u128).checked_pow(alphabet as u32).unwrap_or(u128::MAX);
    if count > MAX_CANDIDATES {
        return Err(Error::CandidateExplosion {
            count,
            limit: MAX_CANDIDATES,
        });
    }

    let mut out = Vec::new();
    let mut current = vec![1u32; alphabet];
    loop {
        if satisfies_kraft(&current, maxlen) {
            out.push(current.clone());
        }
        // Odometer increment, last position fastest.
        let mut pos = alphabet;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if current[pos] < maxlen {
                current[pos] += 1;
                break;
            }
            current[pos] = 1;
        }
    }
}

/// Action family with payoffs `aₓ = −ℓₓ` for every admissible length vector.
pub fn code_length_family(maxlen: u32, alphabet: usize) -> Result<ActionFamily> {
    let actions = code_length_vectors(maxlen, alphabet)?
        .into_iter()
        .map(|ls| ls.into_iter().map(|l| -(l as f64)).collect())
        .collect();
    ActionFamily::new(actions)
}
