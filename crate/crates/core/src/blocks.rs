//! Eta powers, theta factors, theta blocks `eta^u * prod theta_{d_i}` and
//! theta quarks, with the exact vanishing-order criterion.
//!
//! For a block with weight `k = (ell+u)/2` the function
//! `ord(x) = k/12 + 1/2 sum_i B2bar(d_i x)` is continuous, 1-periodic and
//! piecewise quadratic with positive leading coefficient; its exact minimum
//! over [0,1] decides cuspidality (`> 0`) and holomorphy (`>= 0`).  The
//! minimum is found by enumerating the breakpoints `j/L`, `L = lcm(d_i)`,
//! and the interior vertex of each quadratic piece.  No floating point.

use num_traits::{One, Signed, Zero};

use crate::arith::{lcm, rat, rat_int};
use crate::error::{Error, Result};
use crate::series::{expand_atom_product, AtomFactor, FJSeries, Rat, ZetaPoly};

/// The data `(u; d_1..d_ell)` of a theta block without theta denominator.
/// `ell + u` must be even so the weight is integral; `u` may be negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaBlockSpec {
    u: i64,
    d: Vec<i64>,
}

impl ThetaBlockSpec {
    pub fn new(u: i64, mut d: Vec<i64>) -> Result<Self> {
        if d.iter().any(|&x| x <= 0) {
            return Err(Error::InvalidArgument(
                "theta arguments must be positive".into(),
            ));
        }
        let ell = d.len() as i64;
        if (ell + u) % 2 != 0 {
            return Err(Error::OddWeight(ell + u));
        }
        d.sort_unstable();
        Ok(ThetaBlockSpec { u, d })
    }

    pub fn u(&self) -> i64 {
        self.u
    }

    pub fn d(&self) -> &[i64] {
        &self.d
    }

    pub fn ell(&self) -> i64 {
        self.d.len() as i64
    }

    /// Weight k = (ell + u) / 2.
    pub fn weight(&self) -> i64 {
        (self.ell() + self.u) / 2
    }

    /// 2t = sum d_i^2.
    pub fn two_t(&self) -> i64 {
        self.d.iter().map(|&x| x * x).sum()
    }

    /// Index t; errors when sum d_i^2 is odd (half-integral index).
    pub fn index(&self) -> Result<i64> {
        let tt = self.two_t();
        if tt % 2 != 0 {
            return Err(Error::FractionalExponent(format!(
                "sum d_i^2 = {tt} is odd, index is half-integral"
            )));
        }
        Ok(tt / 2)
    }

    /// 24 * (vanishing order in q) = u + 3 ell.
    pub fn v24(&self) -> i64 {
        self.u + 3 * self.ell()
    }

    /// Vanishing order v, defined only when 24 | (u + 3 ell).
    pub fn vanishing_order(&self) -> Result<i64> {
        let v24 = self.v24();
        if v24 % 24 != 0 {
            return Err(Error::NotIntegralOrder { v24 });
        }
        Ok(v24 / 24)
    }

    /// Multiplier data (a mod 24, b mod 2) of eta^a-type and Heisenberg
    /// characters; (0, 0) means trivial.
    pub fn character_exponents(&self) -> (i64, i64) {
        let a = self.v24().rem_euclid(24);
        let b = self.d.iter().sum::<i64>().rem_euclid(2);
        (a, b)
    }
}

/// Exact `B2(x - floor(x))` with `B2(x) = x^2 - x + 1/6`.
pub fn bar_b2(x: &Rat) -> Rat {
    let f = x - x.floor();
    &f * &f - f + rat(1, 6)
}

/// The exact minimum of `ord` over [0,1], every point where it is attained,
/// and the breakpoint grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdProfile {
    pub minimum: Rat,
    pub argmin: Vec<Rat>,
    pub breakpoints: Vec<Rat>,
}

/// `ord(x) = k/12 + 1/2 sum_i B2bar(d_i x)` evaluated exactly.
pub fn ord_at(spec: &ThetaBlockSpec, x: &Rat) -> Rat {
    let mut acc = rat(spec.weight(), 12);
    for &d in spec.d() {
        acc += bar_b2(&(rat_int(d) * x)) * rat(1, 2);
    }
    acc
}

/// Exact global minimum of `ord` on [0,1] by breakpoint/vertex enumeration.
pub fn ord_profile(spec: &ThetaBlockSpec) -> OrdProfile {
    let ell = spec.ell();
    let l = spec.d().iter().fold(1i64, |a, &b| lcm(a, b)).max(1);
    let breakpoints: Vec<Rat> = (0..=l).map(|j| rat(j, l)).collect();
    if ell == 0 {
        let m = rat(spec.weight(), 12);
        return OrdProfile {
            minimum: m,
            argmin: breakpoints.clone(),
            breakpoints,
        };
    }

    let mut candidates: Vec<Rat> = breakpoints.clone();
    // On (j/L, (j+1)/L) each B2bar(d x) is one quadratic; the piece of ord is
    //   t x^2 + bx + c  with t = (sum d_i^2)/2 > 0,
    // so the only interior candidate is the vertex x* = -b / (2t).
    for j in 0..l {
        let left = rat(j, l);
        // floor(d * x) is constant on the open interval; sample its value at
        // the midpoint to stay clear of the endpoints.
        let mid = rat(2 * j + 1, 2 * l);
        let mut b = Rat::zero();
        for &d in spec.d() {
            let m = (rat_int(d) * &mid).floor();
            // 1/2 d^2 x^2 - d(m + 1/2) x + ... : linear coefficient
            b += rat_int(d) * (-m - rat(1, 2));
        }
        let t2 = rat_int(spec.two_t()); // 2t = sum d_i^2, quadratic coeff = t
        let vertex = -b / t2;
        if vertex > left && vertex < rat(j + 1, l) {
            candidates.push(vertex);
        }
    }

    let mut minimum: Option<Rat> = None;
    let mut argmin: Vec<Rat> = Vec::new();
    for x in candidates {
        let val = ord_at(spec, &x);
        match &minimum {
            None => {
                minimum = Some(val);
                argmin = vec![x];
            }
            Some(m) => {
                if &val < m {
                    minimum = Some(val);
                    argmin = vec![x];
                } else if &val == m {
                    argmin.push(x);
                }
            }
        }
    }
    argmin.sort();
    argmin.dedup();
    OrdProfile {
        minimum: minimum.unwrap(),
        argmin,
        breakpoints,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Cusp,
    Holomorphic,
    Weak,
    WeaklyHolomorphic,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Cusp => "cusp",
            Classification::Holomorphic => "holomorphic",
            Classification::Weak => "weak",
            Classification::WeaklyHolomorphic => "weakly-holomorphic",
        };
        write!(f, "{s}")
    }
}

/// Classify by the ord-minimum criterion: cusp iff min > 0, holomorphic iff
/// min >= 0, weak iff the q-support starts at order >= 0.
pub fn classify_theta_block(spec: &ThetaBlockSpec) -> Result<Classification> {
    let v = spec.vanishing_order()?;
    let profile = ord_profile(spec);
    Ok(if profile.minimum.is_positive() {
        Classification::Cusp
    } else if !profile.minimum.is_negative() {
        Classification::Holomorphic
    } else if v >= 0 {
        Classification::Weak
    } else {
        Classification::WeaklyHolomorphic
    })
}

/// `prod_i (zeta^(d_i/2) - zeta^(-d_i/2))` as a Laurent polynomial.
pub fn leading_laurent(d: &[i64]) -> ZetaPoly {
    let mut lead = ZetaPoly::one();
    for &di in d {
        let factor = ZetaPoly::from_terms([(di, Rat::one()), (-di, -Rat::one())]);
        lead = lead.mul(&factor);
    }
    lead
}

/// The atoms of the infinite-product form of `eta^u prod theta_{d_i}`:
/// `(1-q^j)^(2k)` and `(1 - q^j zeta^{+-d_i})`, for `j*qden <= trunc`.
fn block_atoms(two_k: i64, d: &[i64], qden: i64, trunc: i64) -> Vec<AtomFactor> {
    let mut factors = Vec::new();
    let mut j = 1i64;
    while j.saturating_mul(qden) <= trunc {
        factors.push(AtomFactor::new(-1, j * qden, 0, two_k));
        for &di in d {
            factors.push(AtomFactor::new(-1, j * qden, 2 * di, 1));
            factors.push(AtomFactor::new(-1, j * qden, -2 * di, 1));
        }
        j += 1;
    }
    factors
}

/// Truncated expansion of `eta^u prod_i theta_{d_i}` for arbitrary `u`, `d`;
/// the q-order is `(u + 3 ell)/24`, which need not be an integer, so `qden`
/// must make it representable.
pub fn theta_block_series(u: i64, d: &[i64], qden: i64, trunc: i64) -> Result<FJSeries> {
    let ell = d.len() as i64;
    let v24 = u + 3 * ell;
    if (v24 * qden) % 24 != 0 {
        return Err(Error::IncompatibleDenominator {
            exp: v24,
            qden: 24,
            new_qden: qden,
        });
    }
    let v_scaled = v24 * qden / 24;
    let two_k = u + ell;
    let inner_trunc = trunc - v_scaled;
    let product = expand_atom_product(&block_atoms(two_k, d, qden, inner_trunc), qden, inner_trunc)?;
    let mut lead_series = FJSeries::zero(qden, inner_trunc);
    lead_series.set_row(0, leading_laurent(d));
    Ok(product.mul(&lead_series)?.shift(v_scaled, 0))
}

/// THBK(u; d): requires `24 | (u + 3 ell)`.  The lowest q-exponent is the
/// vanishing order `v` and the lowest coefficient is
/// `prod (zeta^(d_i/2) - zeta^(-d_i/2))`.
pub fn build_theta_block(spec: &ThetaBlockSpec, qden: i64, trunc: i64) -> Result<FJSeries> {
    spec.vanishing_order()?;
    theta_block_series(spec.u(), spec.d(), qden, trunc)
}

/// eta^u as a series; needs `qden * u` divisible by 24.
pub fn eta_power(u: i64, qden: i64, trunc: i64) -> Result<FJSeries> {
    theta_block_series(u, &[], qden, trunc)
}

/// theta_d as a series; needs `8 | qden`.
pub fn theta_factor(d: i64, qden: i64, trunc: i64) -> Result<FJSeries> {
    theta_block_series(0, &[d], qden, trunc)
}

/// Sparse form of theta_d from the triple-product identity:
/// `sum_m (-1)^m q^((2m+1)^2/8) zeta^(d(2m+1)/2)`.
pub fn theta_sparse(d: i64, qden: i64, trunc: i64) -> Result<FJSeries> {
    if qden % 8 != 0 {
        return Err(Error::IncompatibleDenominator {
            exp: 1,
            qden: 8,
            new_qden: qden,
        });
    }
    let mut s = FJSeries::zero(qden, trunc);
    let step = qden / 8;
    let mut m = 0i64;
    loop {
        let odd = 2 * m + 1;
        let qexp = odd * odd * step;
        if qexp > trunc {
            break;
        }
        let sign = if m % 2 == 0 { Rat::one() } else { -Rat::one() };
        s.add_term(qexp, d * odd, sign.clone());
        s.add_term(qexp, -d * odd, -sign);
        m += 1;
    }
    Ok(s)
}

/// Sparse eta^3 from `sum_{m>=0} (-1)^m (2m+1) q^((2m+1)^2/8)`.
pub fn eta_cube_sparse(qden: i64, trunc: i64) -> Result<FJSeries> {
    if qden % 8 != 0 {
        return Err(Error::IncompatibleDenominator {
            exp: 1,
            qden: 8,
            new_qden: qden,
        });
    }
    let mut s = FJSeries::zero(qden, trunc);
    let step = qden / 8;
    let mut m = 0i64;
    loop {
        let odd = 2 * m + 1;
        let qexp = odd * odd * step;
        if qexp > trunc {
            break;
        }
        let c = if m % 2 == 0 { rat_int(odd) } else { rat_int(-odd) };
        s.add_term(qexp, 0, c);
        m += 1;
    }
    Ok(s)
}

/// Theta quark `theta_a theta_b theta_{a+b} / eta`, a weight-1 Jacobi form
/// of index `a^2 + ab + b^2`; its q-order is `1/3`, so 3 | qden is needed
/// (24 works).
pub fn build_theta_quark(a: i64, b: i64, qden: i64, trunc: i64) -> Result<FJSeries> {
    if a < 1 || b < 1 {
        return Err(Error::InvalidArgument("quark parameters must be >= 1".into()));
    }
    theta_block_series(-1, &[a, b, a + b], qden, trunc)
}

/// Index of the quark `theta_{a,b}`.
pub fn quark_index(a: i64, b: i64) -> i64 {
    a * a + a * b + b * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    #[test]
    fn bar_b2_values() {
        assert_eq!(bar_b2(&rat_int(0)), rat(1, 6));
        assert_eq!(bar_b2(&rat(1, 2)), rat(-1, 12));
        assert_eq!(bar_b2(&rat(5, 4)), rat(-1, 48));
        assert_eq!(bar_b2(&rat(-1, 4)), bar_b2(&rat(3, 4)));
    }

    #[test]
    fn spec_validation() {
        assert!(ThetaBlockSpec::new(18, vec![1, 1, 3]).is_err()); // ell+u odd
        let s = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        assert_eq!(s.weight(), 10);
        assert_eq!(s.index().unwrap(), 1);
        assert_eq!(s.vanishing_order().unwrap(), 1);
    }

    #[test]
    fn ord_profile_level_one() {
        // u=18, d=(1,1): min = 3/4 at x = 1/2
        let spec = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let p = ord_profile(&spec);
        assert_eq!(p.minimum, rat(3, 4));
        assert_eq!(p.argmin, vec![rat(1, 2)]);
    }

    #[test]
    fn ord_profile_eight_thetas() {
        // theta_1^8: min = 0 (holomorphic, not cusp)
        let spec = ThetaBlockSpec::new(0, vec![1; 8]).unwrap();
        let p = ord_profile(&spec);
        assert_eq!(p.minimum, rat_int(0));
        assert_eq!(
            classify_theta_block(&spec).unwrap(),
            Classification::Holomorphic
        );
    }

    #[test]
    fn ord_profile_weight_two_block() {
        let spec = ThetaBlockSpec::new(-6, vec![1, 1, 1, 2, 2, 2, 3, 3, 4, 5]).unwrap();
        assert_eq!(spec.weight(), 2);
        assert_eq!(spec.index().unwrap(), 37);
        assert_eq!(spec.vanishing_order().unwrap(), 1);
        let p = ord_profile(&spec);
        assert!(p.minimum.is_positive());
        assert_eq!(classify_theta_block(&spec).unwrap(), Classification::Cusp);
    }

    #[test]
    fn classifications_from_low_levels() {
        for (u, d, want) in [
            (18, vec![1, 1], Classification::Cusp),
            (12, vec![1, 1, 1, 1], Classification::Cusp),
            (0, vec![1; 8], Classification::Holomorphic),
        ] {
            let spec = ThetaBlockSpec::new(u, d).unwrap();
            assert_eq!(classify_theta_block(&spec).unwrap(), want);
        }
    }

    #[test]
    fn block_leading_terms() {
        // eta^18 theta_1^2 = q (z - 2 + z^-1) + O(q^2)
        let spec = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let f = build_theta_block(&spec, 1, 4).unwrap();
        assert_eq!(f.min_q(), Some(1));
        assert_eq!(f.coeff_int(1, 1).unwrap(), rat_int(1));
        assert_eq!(f.coeff_int(1, 0).unwrap(), rat_int(-2));
        assert_eq!(f.coeff_int(1, -1).unwrap(), rat_int(1));
    }

    #[test]
    fn delta_expansion() {
        // eta^24: q - 24 q^2 + 252 q^3 - 1472 q^4 + ...
        let spec = ThetaBlockSpec::new(24, vec![]).unwrap();
        let f = build_theta_block(&spec, 1, 5).unwrap();
        assert_eq!(f.min_q(), Some(1));
        assert_eq!(f.coeff_int(2, 0).unwrap(), rat_int(-24));
        assert_eq!(f.coeff_int(3, 0).unwrap(), rat_int(252));
        assert_eq!(f.coeff_int(4, 0).unwrap(), rat_int(-1472));
    }

    #[test]
    fn nonintegral_order_rejected() {
        let spec = ThetaBlockSpec::new(16, vec![1, 1]).unwrap();
        assert!(matches!(
            build_theta_block(&spec, 1, 4),
            Err(Error::NotIntegralOrder { .. })
        ));
        assert!(matches!(
            spec.vanishing_order(),
            Err(Error::NotIntegralOrder { .. })
        ));
    }

    #[test]
    fn theta_coefficients() {
        // theta = q^(1/8)(z^(1/2) - z^(-1/2)) + ...
        let th = theta_factor(1, 8, 3 * 8).unwrap();
        assert_eq!(th.coeff(1, 1).unwrap(), rat_int(1));
        assert_eq!(th.coeff(1, -1).unwrap(), rat_int(-1));
        assert!(th.coeff(100, 1).is_err());
    }

    #[test]
    fn sparse_forms_match_products() {
        let w = 24 * 8;
        for d in 1..=3 {
            let a = theta_factor(d, 24, w).unwrap();
            let b = theta_sparse(d, 24, w).unwrap();
            assert!(a.agrees_with(&b, w).unwrap(), "theta_{d}");
        }
        let a = eta_power(3, 24, w).unwrap();
        let b = eta_cube_sparse(24, w).unwrap();
        assert!(a.agrees_with(&b, w).unwrap());
    }

    #[test]
    fn eta_power_multiplicativity() {
        let w = 24 * 6;
        let e1 = eta_power(1, 24, w).unwrap();
        let e23 = eta_power(23, 24, w).unwrap();
        let e24 = eta_power(24, 24, w).unwrap();
        let prod = e1.mul(&e23).unwrap();
        assert!(prod.agrees_with(&e24, w).unwrap());
        let e12 = eta_power(12, 24, w).unwrap();
        let quot = e24.exact_div(&e12, None).unwrap();
        let win = quot.trunc().min(e12.trunc());
        assert!(quot.agrees_with(&e12, win).unwrap());
    }

    #[test]
    fn quark_block_consistency() {
        // theta_{1,1}^3 equals the direct product theta_1^6 theta_2^3 eta^-3
        let w = 24 * 5;
        let quark = build_theta_quark(1, 1, 24, w).unwrap();
        assert_eq!(quark_index(1, 1), 3);
        assert_eq!(quark.min_q(), Some(8)); // q^(1/3)
        let cube = quark.pow(3).unwrap();
        let direct = theta_block_series(-3, &[1, 1, 1, 1, 1, 1, 2, 2, 2], 24, w).unwrap();
        let win = cube.trunc().min(direct.trunc());
        assert!(cube.agrees_with(&direct, win).unwrap());
        assert_eq!(quark_index(1, 2), 7);
    }

    #[test]
    fn block_multiplicativity() {
        // THBK(u1+u2, d1 ++ d2) = THBK(u1,d1) * THBK(u2,d2)
        let w = 10;
        let a = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let b = ThetaBlockSpec::new(12, vec![1, 1, 1, 1]).unwrap();
        let ab = ThetaBlockSpec::new(30, vec![1, 1, 1, 1, 1, 1]).unwrap();
        let fa = build_theta_block(&a, 1, w).unwrap();
        let fb = build_theta_block(&b, 1, w).unwrap();
        let fab = build_theta_block(&ab, 1, w).unwrap();
        let prod = fa.mul(&fb).unwrap();
        let win = prod.trunc().min(fab.trunc());
        assert!(prod.agrees_with(&fab, win).unwrap());
    }

    #[test]
    fn support_symmetry_and_discriminant() {
        // c(n, r) = (-1)^ell c(n, -r); cusp blocks have 4tn - r^2 > 0 on
        // support
        for (u, d) in [(18i64, vec![1i64, 1]), (15, vec![1, 1, 2]), (9, vec![1, 1, 1, 1, 2])] {
            let spec = ThetaBlockSpec::new(u, d).unwrap();
            let t = spec.index().unwrap();
            let sign = if spec.ell() % 2 == 0 { 1 } else { -1 };
            let f = build_theta_block(&spec, 1, 6).unwrap();
            let cusp = classify_theta_block(&spec).unwrap() == Classification::Cusp;
            for (&n, row) in f.rows() {
                for (&z2, c) in row.iter() {
                    assert_eq!(z2 % 2, 0);
                    let r = z2 / 2;
                    let mirrored = row.coeff(-z2);
                    assert_eq!(c * rat_int(sign), mirrored, "symmetry at ({n},{r})");
                    if cusp {
                        assert!(4 * t * n - r * r > 0, "cusp support at ({n},{r})");
                    } else {
                        assert!(4 * t * n - r * r >= 0);
                    }
                }
            }
        }
    }

    #[test]
    fn ord_profile_matches_support_minimum() {
        // ord(phi; x) = min over support of (n + r x + t x^2), checked at
        // each argmin within the window
        for (u, d) in [(18i64, vec![1i64, 1]), (12, vec![1, 1, 1, 1]), (6, vec![1; 6])] {
            let spec = ThetaBlockSpec::new(u, d).unwrap();
            let t = spec.index().unwrap();
            let f = build_theta_block(&spec, 1, 8).unwrap();
            let p = ord_profile(&spec);
            for x in &p.argmin {
                let mut best: Option<Rat> = None;
                for (&n, row) in f.rows() {
                    for (&z2, _) in row.iter() {
                        let val = rat_int(n) + rat_int(z2 / 2) * x + rat_int(t) * x * x;
                        best = Some(match best {
                            None => val,
                            Some(b) => b.min(val),
                        });
                    }
                }
                assert_eq!(best.unwrap(), p.minimum, "at x = {x}");
            }
        }
    }
}
