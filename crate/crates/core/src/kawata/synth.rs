use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::KawataError;
use crate::blockdata::CartanMatrix;
use crate::exactmat::IntMatrix;

/// Builds an exact Cartan matrix carrying the pattern `T = {0, …, n−2}`,
/// `s = n−1`. `filler` becomes the trailing block starting at `(n−1, n−1)`,
/// so `filler[0][0]` is `C[s][s]`; its size fixes the total.
pub fn synth_pattern_matrix(n: usize, filler: &IntMatrix) -> Result<CartanMatrix, KawataError> {
    if n < 2 {
        return Err(KawataError::InvalidArgument(format!(
            "n = {n}, need n >= 2"
        )));
    }
    match filler.is_symmetric() {
        Ok(true) => {}
        Ok(false) => return Err(KawataError::InvalidFiller("not symmetric".into())),
        Err(e) => return Err(KawataError::InvalidFiller(e.to_string())),
    }
    if filler.is_empty() {
        return Err(KawataError::InvalidFiller("empty".into()));
    }
    if filler.entries().iter().any(Signed::is_negative) {
        return Err(KawataError::InvalidFiller("negative entry".into()));
    }
    if *filler.get(0, 0) < BigInt::from(2) {
        return Err(KawataError::InvalidFiller(format!(
            "C[s][s] = {} is below 2",
            filler.get(0, 0)
        )));
    }
    let s = n - 1;
    let total = s + filler.rows();
    let m = IntMatrix::from_fn(total, total, |i, j| match (i < s, j < s) {
        (true, true) if i == j => BigInt::from(2),
        (true, true) => BigInt::one(),
        (true, false) | (false, true) if i == s || j == s => BigInt::one(),
        (false, false) => filler.get(i - s, j - s).clone(),
        _ => BigInt::default(),
    });
    CartanMatrix::exact(m).map_err(|e| KawataError::InvalidFiller(e.to_string()))
}
