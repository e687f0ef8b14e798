//! Counting simple modules across a normal subgroup of prime index `q`, and
//! the periodicity divisibility test.
//!
//! For `|G/N| = q` prime and `1_B = 1_b`, simple `B`-modules split into `m`
//! orbits of size `q` (restricting to the same simple `b`-module) and `ell`
//! modules whose restriction splits into `q` conjugates. Hence
//! `|IBr(B)| = m·q + ell` and `|IBr(b)| = m + ell·q`.

use serde::Serialize;
use thiserror::Error;

use crate::arith::{is_prime, p_valuation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliffordCounts {
    pub m: u64,
    pub ell: u64,
    pub q: u64,
    /// Set when `m = 0`: the counts solve the linear system, but the
    /// structure result asserts `m >= 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advisory: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliffordError {
    #[error("q = {0} is not a prime")]
    NotPrime(u64),
    #[error("inconsistent counts: |IBr(B)| = {n_big}, |IBr(b)| = {n_small}, q = {q}: {reason}")]
    InconsistentCounts {
        n_big: u64,
        n_small: u64,
        q: u64,
        reason: String,
    },
}

/// Solves `n_big = m·q + ell`, `n_small = m + ell·q` for nonnegative
/// integers `m`, `ell`.
pub fn clifford_counts(n_big: u64, n_small: u64, q: u64) -> Result<CliffordCounts, CliffordError> {
    if !is_prime(q) {
        return Err(CliffordError::NotPrime(q));
    }
    let (nb, ns, qq) = (i128::from(n_big), i128::from(n_small), i128::from(q));
    let denom = qq * qq - 1;
    let m_num = qq * nb - ns;
    let ell_num = qq * ns - nb;
    let inconsistent = |reason: String| CliffordError::InconsistentCounts {
        n_big,
        n_small,
        q,
        reason,
    };
    if m_num < 0 || ell_num < 0 {
        return Err(inconsistent(format!(
            "negative solution m = {m_num}/{denom}, ell = {ell_num}/{denom}"
        )));
    }
    if m_num % denom != 0 || ell_num % denom != 0 {
        return Err(inconsistent(format!(
            "non-integral solution m = {m_num}/{denom}, ell = {ell_num}/{denom}"
        )));
    }
    let m = u64::try_from(m_num / denom).expect("m <= n_big");
    let ell = u64::try_from(ell_num / denom).expect("ell <= n_small");
    let advisory = (m == 0).then(|| {
        "m = 0: no simple B-module restricts irreducibly; the counting lemma states m >= 1"
            .to_string()
    });
    Ok(CliffordCounts {
        m,
        ell,
        q,
        advisory,
    })
}

/// `true` when `ν_p(dim) < p_rank − 1`, which rules out `Ω`-periodicity of a
/// simple module of that dimension. `false` only means "no certificate".
pub fn nonperiodicity_certificate(dim: u64, p: u64, p_rank: u32) -> bool {
    if dim == 0 {
        return false;
    }
    i64::from(p_valuation(dim, p)) < i64::from(p_rank) - 1
}
