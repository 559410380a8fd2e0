//! Small exact-arithmetic helpers: gcd/lcm, divisors, binomials, divisor
//! sums and Bernoulli numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    num_integer::lcm(a, b)
}

/// Positive divisors of `n > 0`, ascending.
pub fn divisors(n: i64) -> Vec<i64> {
    assert!(n > 0, "divisors of non-positive {n}");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// sigma_0(n): number of positive divisors.
pub fn sigma0(n: i64) -> i64 {
    divisors(n).len() as i64
}

/// sigma_1(n): sum of positive divisors.
pub fn sigma1(n: i64) -> i64 {
    divisors(n).iter().sum()
}

/// sigma_{k}(n) as a big integer.
pub fn sigma_big(n: i64, k: u32) -> BigInt {
    divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d).pow(k))
        .sum()
}

/// Exact binomial coefficient C(n, k) for integer n (possibly negative is
/// not needed; callers pass n >= 0) and k >= 0.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Parity of C(n, k) via Lucas: odd iff the bits of k are a subset of n's.
pub fn binomial_odd(n: u64, k: u64) -> bool {
    k <= n && (k & (n - k)) == 0
}

/// q^exp as a rational with exp possibly negative.
pub fn rat_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mut acc = BigRational::one();
    let b = if exp < 0 { base.recip() } else { base.clone() };
    for _ in 0..exp.unsigned_abs() {
        acc *= &b;
    }
    acc
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// True if the rational is an integer.
pub fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// Bernoulli number B_n (B_1 = -1/2), via the standard recurrence
/// sum_{j=0}^{n} C(n+1, j) B_j = 0.
pub fn bernoulli(n: u32) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(n as usize + 1);
    for m in 0..=n as i64 {
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binomial(m + 1, j as i64)) * bj;
        }
        let bm = if m == 0 {
            BigRational::one()
        } else {
            -acc / BigRational::from_integer(BigInt::from(m + 1))
        };
        b.push(bm);
    }
    b.pop().unwrap()
}

/// v = 2^beta * w with w odd; returns (beta, w). Requires v >= 1.
pub fn two_adic_split(v: i64) -> (u32, i64) {
    assert!(v >= 1);
    let beta = v.trailing_zeros();
    (beta, v >> beta)
}

/// Largest d with d*d <= n.
pub fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Sign of a big rational as -1, 0, 1.
pub fn rat_sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(sigma0(12), 6);
        assert_eq!(sigma1(12), 28);
        assert_eq!(sigma0(1), 1);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(binomial(4, 7), BigInt::zero());
        for n in 0..64u64 {
            for k in 0..=n {
                let odd = binomial(n as i64, k as i64) % BigInt::from(2) == BigInt::one();
                assert_eq!(odd, binomial_odd(n, k), "C({n},{k})");
            }
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(3), BigRational::zero());
    }

    #[test]
    fn two_adic() {
        assert_eq!(two_adic_split(1), (0, 1));
        assert_eq!(two_adic_split(8), (3, 1));
        assert_eq!(two_adic_split(12), (2, 3));
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..2000 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }
}
