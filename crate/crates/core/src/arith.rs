//! Small integer helpers shared by the block checks and the family classifier.

/// `ν_p(n)`, the exponent of `p` in `n`. `n` must be nonzero and `p >= 2`.
pub fn p_valuation(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    assert!(p >= 2, "valuation base must be at least 2");
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `Some((p, k))` when `q = p^k` with `p` prime and `k >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // no factor up to sqrt(q): q itself is prime
        return Some((q, 1));
    }
    let k = p_valuation(q, p);
    if p.checked_pow(k) == Some(q) {
        Some((p, k))
    } else {
        None
    }
}
