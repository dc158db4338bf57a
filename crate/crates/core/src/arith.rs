//! Integer helpers under the order convention used throughout the crate:
//! an order value of `0` stands for "unbounded", and every positive integer
//! is a proper divisor of `0`.

/// `d` divides `n`, with every `d` dividing `0` and `0` dividing only `0`.
pub fn divides(d: u64, n: u64) -> bool {
    if d == 0 {
        n == 0
    } else {
        n.is_multiple_of(d)
    }
}

/// `d` is a proper divisor of `n`: `d | n`, `d >= 1` and `d != n`.
pub fn is_proper_divisor(d: u64, n: u64) -> bool {
    d >= 1 && d != n && divides(d, n)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Least common multiple with `0` absorbing.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    let g = gcd(a, b);
    (a / g)
        .checked_mul(b)
        .expect("order value overflow in lcm")
}

/// Exponent of `p` in `n`; `u32::MAX` stands in for `v_p(0) = infinity`.
pub fn valuation(p: u64, n: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut n = n;
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Same as [`valuation`] but for signed integers (`v_p(0)` infinite).
pub fn valuation_i(p: u64, n: i64) -> u32 {
    valuation(p, n.unsigned_abs())
}

/// Exponent of `p` in a nonzero big integer.
pub fn valuation_big(p: u64, n: &num_bigint::BigInt) -> u32 {
    use num_integer::Integer;
    use num_traits::Zero;
    assert!(!n.is_zero(), "valuation of zero");
    let p = num_bigint::BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn pow(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power overflow")
}

pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation `[(p, e)]` sorted by prime. `factor(1)` is empty.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor 0");
    let mut out = Vec::new();
    let mut n = n;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n >= 1`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of prime factors counted with multiplicity.
pub fn big_omega(n: u64) -> u32 {
    factor(n).iter().map(|&(_, e)| e).sum()
}

/// Extended Euclid on signed integers: `(g, x, y)` with `a*x + b*y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Inverse of `a` modulo `m` when `gcd(a, m) = 1`.
pub fn mod_inverse(a: i128, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m as i128), m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

/// Smallest primes in increasing order.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 2;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_convention() {
        assert!(divides(5, 0));
        assert!(!divides(0, 5));
        assert!(divides(0, 0));
        assert!(is_proper_divisor(7, 0));
        assert!(!is_proper_divisor(6, 6));
        assert_eq!(lcm(4, 0), 0);
        assert_eq!(gcd(0, 6), 6);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(big_omega(12), 3);
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(3, 8), Some(3));
        assert_eq!(mod_inverse(-1, 8), Some(7));
        assert_eq!(mod_inverse(2, 8), None);
        let (g, x, y) = ext_gcd(12, 18);
        assert_eq!(g, 6);
        assert_eq!(12 * x + 18 * y, 6);
    }
}
