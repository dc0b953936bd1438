use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Exact binomial coefficient.
///
/// Zero when `k < 0` or `0 <= n < k`. Negative `n` uses the extension
/// `C(n, k) = (-1)^k C(k - n - 1, k)`, so `C(-1, 0) = 1`; Hilbert-series
/// coefficients `C(r + j, j)` with `r = -1` need this.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if n < 0 {
        let v = binomial(k - n - 1, k);
        return if k % 2 == 0 { v } else { -v };
    }
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial as a machine integer. Panics on overflow, which never happens
/// for the dimensions this crate handles.
pub fn binomial_u64(n: i64, k: i64) -> u64 {
    binomial(n, k)
        .to_u64()
        .expect("binomial coefficient out of u64 range")
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}
