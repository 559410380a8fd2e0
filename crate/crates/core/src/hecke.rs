//! Level-raising Hecke operators `V_m` and the Gritsenko lift.
//!
//! On Fourier coefficients,
//!
//! ```text
//! c(n, r; phi|V_m) = sum_{d | (n, r, m)} d^(k-1) c(n m / d^2, r / d; phi),
//! ```
//!
//! which maps index-t objects to index-(t m).  At weight 0 the factor
//! `d^(k-1) = 1/d` is rational; everything stays exact.  The Gritsenko lift
//! of `phi` of weight k and index t is the Fourier-Jacobi expansion with
//! entry `phi|V_m` attached to `e(m t omega)`, plus an Eisenstein term
//! `c(0,0) G_k` when `k` is even and `>= 4`.

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{self, bernoulli, divisors, rat_int};
use crate::error::{Error, Result};
use crate::series::{FJSeries, Rat};

/// A Fourier-Jacobi expansion: entry `m` is the coefficient series attached
/// to `e(m t omega)`, a Jacobi-form-like object of index `m * t`.
#[derive(Clone, Debug)]
pub struct FJExpansion {
    /// index scale: entry m sits at xi^(m t)
    pub t: i64,
    /// weight of the expanded object
    pub weight: i64,
    /// sorted by index, no duplicates
    pub entries: Vec<(i64, FJSeries)>,
}

impl FJExpansion {
    pub fn entry(&self, m: i64) -> Option<&FJSeries> {
        self.entries
            .binary_search_by_key(&m, |(i, _)| *i)
            .ok()
            .map(|ix| &self.entries[ix].1)
    }

    pub fn indices(&self) -> Vec<i64> {
        self.entries.iter().map(|(i, _)| *i).collect()
    }
}

/// `d^(k-1)` as an exact rational; k may be 0 or negative.
fn power_weight(d: i64, k: i64) -> Rat {
    arith::rat_pow(&rat_int(d), k - 1)
}

/// Check that a series has integer q- and zeta-exponents; returns the
/// normalized (qden = 1) form.
fn require_integral_exponents(phi: &FJSeries) -> Result<FJSeries> {
    let n = phi.normalize();
    if n.qden() != 1 {
        return Err(Error::FractionalExponent(format!(
            "q-exponents have denominator {}",
            n.qden()
        )));
    }
    for (&q, row) in n.rows() {
        if let Some((&z2, _)) = row.iter().find(|(&z, _)| z % 2 != 0) {
            return Err(Error::FractionalExponent(format!(
                "zeta-exponent {z2}/2 at q^{q}"
            )));
        }
    }
    Ok(n)
}

/// `phi|V_m` for `m >= 1`.  The input window must extend to `m` times the
/// target order; the result window is `floor(phi.trunc / m)`.
pub fn apply_vm(phi: &FJSeries, k: i64, m: i64) -> Result<FJSeries> {
    if m < 1 {
        return Err(Error::InvalidArgument(format!("V_{m}")));
    }
    let phi = require_integral_exponents(phi)?;
    if m == 1 {
        return Ok(phi);
    }
    let out_trunc = phi.trunc().div_euclid(m);
    let mut out = FJSeries::zero(1, out_trunc);
    // scatter: the input point (n', r') contributes d^(k-1) c(n', r') at
    // (n' d^2 / m, r' d) for every d | m with n integral and d | n.
    for d in divisors(m) {
        let w = power_weight(d, k);
        let dd = d * d;
        for (&np, row) in phi.rows() {
            let num = np * dd;
            if num % m != 0 {
                continue;
            }
            let n = num / m;
            if n > out_trunc {
                // rows ascend, later ones only larger
                break;
            }
            if d > 1 && n % d != 0 {
                continue;
            }
            for (&z2, c) in row.iter() {
                out.add_term(n, z2 * d, c * &w);
            }
        }
    }
    Ok(out)
}

/// Fourier coefficient of the lift at the matrix `(n, r/2; r/2, t m)`:
/// the divisor sum over `d | (n, r, m)`.  Errors if a needed coefficient of
/// `phi` lies beyond its window.
pub fn grit_coefficient(phi: &FJSeries, k: i64, n: i64, r: i64, m: i64) -> Result<Rat> {
    if m < 1 {
        return Err(Error::InvalidArgument(format!(
            "lift coefficient needs m >= 1, got {m}"
        )));
    }
    let phi = require_integral_exponents(phi)?;
    // gcd(0, 0, m) = m
    let g = arith::gcd(arith::gcd(n.abs(), r.abs()), m);
    let mut acc = Rat::zero();
    for d in divisors(g) {
        let nn = n * m / (d * d);
        let rr = r / d;
        acc += power_weight(d, k) * phi.coeff(nn, 2 * rr)?;
    }
    Ok(acc)
}

/// Weight-k Eisenstein series `-B_k/(2k) + sum_{n>=1} sigma_{k-1}(n) q^n`
/// as a pure-q series (qden 1).  Defined for even k >= 4.
pub fn eisenstein_gk(k: i64, trunc: i64) -> Result<FJSeries> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::EisensteinBranch { k });
    }
    let mut s = FJSeries::zero(1, trunc);
    let constant = -bernoulli(k as u32) / rat_int(2 * k);
    s.add_term(0, 0, constant);
    for n in 1..=trunc.max(0) {
        s.add_term(
            n,
            0,
            BigRational::from_integer(arith::sigma_big(n, (k - 1) as u32)),
        );
    }
    Ok(s)
}

/// The Gritsenko-lift Fourier-Jacobi expansion of `phi` (weight k, index t):
/// entries `m = 1..=fjmax` are `phi|V_m` within the window `trunc`; when
/// `c(0,0) != 0` and k is even and >= 4, entry `m = 0` is `c(0,0) * G_k`.
/// A nonzero constant term at any other weight is an error.
pub fn grit_fj_expansion(
    phi: &FJSeries,
    k: i64,
    t: i64,
    fjmax: i64,
    trunc: i64,
) -> Result<FJExpansion> {
    if fjmax < 1 {
        return Err(Error::InvalidArgument("fjmax >= 1 required".into()));
    }
    let phi = require_integral_exponents(phi)?;
    if phi.trunc() < fjmax * trunc {
        return Err(Error::WindowTooSmall {
            needed: fjmax * trunc,
            available: phi.trunc(),
        });
    }
    let c00 = if phi.trunc() >= 0 {
        phi.coeff(0, 0)?
    } else {
        Rat::zero()
    };
    let mut entries = Vec::new();
    if !c00.is_zero() {
        if k % 2 != 0 || k < 4 {
            return Err(Error::EisensteinBranch { k });
        }
        entries.push((0, eisenstein_gk(k, trunc)?.scale(&c00)));
    }
    for m in 1..=fjmax {
        entries.push((m, apply_vm(&phi, k, m)?.truncated(trunc)));
    }
    Ok(FJExpansion {
        t,
        weight: k,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::blocks::{build_theta_block, ThetaBlockSpec};

    fn synthetic_phi() -> FJSeries {
        // three-term phi: 2 q + 3 q^2 z + 5 q^4 z^2, window q^4
        let mut f = FJSeries::zero(1, 4);
        f.add_term(1, 0, rat_int(2));
        f.add_term(2, 2, rat_int(3));
        f.add_term(4, 4, rat_int(5));
        f
    }

    #[test]
    fn v1_is_identity() {
        let f = synthetic_phi();
        let g = apply_vm(&f, 3, 1).unwrap();
        assert!(f.agrees_with(&g, 4).unwrap());
    }

    #[test]
    fn v2_by_hand() {
        // k = 3: c(n,r; phi|V_2) = c(2n, r) + 4 c(n/2, r/2) when 2 | (n, r)
        let f = synthetic_phi();
        let g = apply_vm(&f, 3, 2).unwrap();
        assert_eq!(g.trunc(), 2);
        assert_eq!(g.coeff_int(1, 0).unwrap(), rat_int(0)); // c(2,0;phi) = 0
        assert_eq!(g.coeff_int(1, 1).unwrap(), rat_int(3)); // c(2,1;phi) = 3
        assert_eq!(g.coeff_int(2, 2).unwrap(), rat_int(5)); // c(4,2) + 4c(1,1) = 5
        assert_eq!(g.coeff_int(2, 0).unwrap(), rat_int(8)); // c(4,0) + 4c(1,0) = 8
        assert_eq!(g.coeff_int(0, 0).unwrap(), rat_int(0));
    }

    #[test]
    fn gcd_term_present() {
        // c(2,2; phi|V_2) includes the d=2 term 2^(k-1) c(1,1; phi)
        let mut f = FJSeries::zero(1, 4);
        f.add_term(1, 2, rat_int(7)); // c(1,1) = 7
        let g = apply_vm(&f, 3, 2).unwrap();
        // d=1 gives c(4,2) = 0, d=2 gives 2^2 * c(1,1) = 28
        assert_eq!(g.coeff_int(2, 2).unwrap(), rat_int(28));
    }

    #[test]
    fn weight_zero_divisor_weights() {
        let mut f = FJSeries::zero(1, 9);
        f.add_term(1, 0, rat_int(1));
        let g = apply_vm(&f, 0, 3).unwrap();
        // d | gcd(3,0,3): d=1 gives c(9,0) = 0; d=3 gives 3^(-1) c(1,0) = 1/3
        assert_eq!(g.coeff_int(3, 0).unwrap(), rat(1, 3));
    }

    #[test]
    fn fractional_exponents_rejected() {
        let f = FJSeries::monomial(1, 0, rat_int(1), 24, 48);
        assert!(matches!(
            apply_vm(&f, 2, 2),
            Err(Error::FractionalExponent(_))
        ));
        let g = FJSeries::monomial(1, 1, rat_int(1), 1, 4); // zeta^(1/2)
        assert!(matches!(
            apply_vm(&g, 2, 2),
            Err(Error::FractionalExponent(_))
        ));
    }

    #[test]
    fn grit_coefficient_two_routes() {
        let spec = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let phi = build_theta_block(&spec, 1, 24).unwrap().normalize();
        for m in 1..=3i64 {
            let vm = apply_vm(&phi, 10, m).unwrap();
            for n in 0..=vm.trunc() {
                for r in -8..=8i64 {
                    let a = grit_coefficient(&phi, 10, n, r, m).unwrap();
                    let b = vm.coeff_int(n, r).unwrap();
                    assert_eq!(a, b, "triple ({n},{r},{m})");
                }
            }
        }
        // T = (1,1,1): single term c(1,1; phi) = 1
        assert_eq!(grit_coefficient(&phi, 10, 1, 1, 1).unwrap(), rat_int(1));
    }

    #[test]
    fn vm_preserves_support_condition() {
        // 4 t n - r^2 >= 0 on supp(phi) implies 4 (t m) n - r^2 >= 0 on
        // supp(phi|V_m)
        let spec = ThetaBlockSpec::new(12, vec![1, 1, 1, 1]).unwrap(); // t = 2
        let phi = build_theta_block(&spec, 1, 12).unwrap().normalize();
        for m in 2..=3i64 {
            let vm = apply_vm(&phi, 8, m).unwrap();
            for (&n, row) in vm.rows() {
                for (&z2, _) in row.iter() {
                    let r = z2 / 2;
                    assert!(4 * 2 * m * n - r * r >= 0, "V_{m} support at ({n},{r})");
                }
            }
        }
    }

    #[test]
    fn eisenstein_constants() {
        // G_4 = 1/240 + q + 9q^2 + 28q^3 + ...; G_6 = -1/504 + ...
        let g4 = eisenstein_gk(4, 3).unwrap();
        assert_eq!(g4.coeff_int(0, 0).unwrap(), rat(1, 240));
        assert_eq!(g4.coeff_int(1, 0).unwrap(), rat_int(1));
        assert_eq!(g4.coeff_int(2, 0).unwrap(), rat_int(9));
        assert_eq!(g4.coeff_int(3, 0).unwrap(), rat_int(28));
        let g6 = eisenstein_gk(6, 1).unwrap();
        assert_eq!(g6.coeff_int(0, 0).unwrap(), rat(-1, 504));
        assert!(eisenstein_gk(5, 2).is_err());
        assert!(eisenstein_gk(2, 2).is_err());
    }

    #[test]
    fn eisenstein_constant_matches_zeta_numerically() {
        // (2 pi i)^(-k) (k-1)! zeta(k) agrees with -B_k/(2k) for even k;
        // i^(-k) = (-1)^(k/2), so for k = 4 compare zeta(4) 3! / (2 pi)^4
        // with 1/240 in floating point.
        let zeta4: f64 = (1..200).map(|n: i64| 1.0 / ((n * n * n * n) as f64)).sum();
        let lhs = zeta4 * 6.0 / (2.0 * std::f64::consts::PI).powi(4);
        assert!((lhs - 1.0 / 240.0).abs() < 1e-9);
    }

    #[test]
    fn grit_expansion_shape() {
        let spec = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let phi = build_theta_block(&spec, 1, 12).unwrap().normalize();
        let exp = grit_fj_expansion(&phi, 10, 1, 3, 4).unwrap();
        assert_eq!(exp.indices(), vec![1, 2, 3]);
        // v >= 1 blocks have c(0,0) = 0: no m = 0 entry
        assert!(exp.entry(0).is_none());
        // entry 1 is phi itself
        assert!(exp
            .entry(1)
            .unwrap()
            .agrees_with(&phi.truncated(4), 4)
            .unwrap());
        // entry 2 is phi|V_2
        let v2 = apply_vm(&phi, 10, 2).unwrap().truncated(4);
        assert!(exp.entry(2).unwrap().agrees_with(&v2, 4).unwrap());
        // window too small for fjmax * trunc
        assert!(matches!(
            grit_fj_expansion(&phi, 10, 1, 4, 4),
            Err(Error::WindowTooSmall { .. })
        ));
    }
}
