//! The weight-zero quotient `psi = (-1)^v (phi|V_2)/phi` of a theta block,
//! its singular data, Humbert divisors, and the Borcherds Fourier-Jacobi
//! expansion `theta block * exp(-Grit(psi))`.
//!
//! `psi` is built by two independent routes:
//!
//! 1. division: `phi|V_2` divided exactly by `phi`;
//! 2. closed product:
//!    `(-1)^v 2^(k-1) q^v prod (1+q^j)^(2k) prod (zeta^(d_i/2)+zeta^(-d_i/2))
//!     prod (1+q^j zeta^(+-d_i))`
//!    plus the symmetrized odd-j half-integer products, of which only the
//!    powers `q^(m/2 - v/2)` with `m = v mod 2` survive.
//!
//! From the singular part of `psi` come the product data
//! `24A = sum c(0,l)`, `2B = sum_{l>0} l c(0,l)`, `4C = sum l^2 c(0,l)`,
//! `D0 = sum_{n<0} sigma_0(-n) c(n,0)`, `D1 = sum_{n<0,r} sigma_1(-n) c(n,r)`,
//! the weight `k' = c(0,0)/2`, the exact identity `tA - tD1 - C = 0`, the
//! character-triviality predicate and the symmetry flag `D0 mod 2`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, binomial_odd, is_integer, rat, rat_int, two_adic_split};
use crate::blocks::{build_theta_block, leading_laurent, ThetaBlockSpec};
use crate::error::{Error, Result};
use crate::hecke::{apply_vm, FJExpansion};
use crate::series::{expand_atom_product, AtomFactor, FJSeries, Rat, ZetaPoly};

// ---------------------------------------------------------------------------
// psi by two routes
// ---------------------------------------------------------------------------

/// `psi = (-1)^v (phi|V_2) / phi` through scaled q-order `window`, by exact
/// division.  The theta block is expanded to order `2(window + v)` so that
/// `phi|V_2` and the quotient are sound through `window`.
pub fn build_psi_division(spec: &ThetaBlockSpec, window: i64) -> Result<FJSeries> {
    let v = spec.vanishing_order()?;
    if v < 1 {
        return Err(Error::InvalidArgument(format!(
            "vanishing order v = {v} must be >= 1"
        )));
    }
    let k = spec.weight();
    let phi_trunc = 2 * (window + v).max(0) + 1;
    let phi = build_theta_block(spec, 1, phi_trunc)?.normalize();
    let num = apply_vm(&phi, k, 2)?;
    let psi = num.exact_div(&phi, Some(window))?;
    let sign = if v % 2 == 0 { Rat::one() } else { -Rat::one() };
    Ok(psi.scale(&sign).truncated(window))
}

/// `psi` through scaled q-order `window` from the closed product formula;
/// no division is involved.
pub fn build_psi_product(spec: &ThetaBlockSpec, window: i64) -> Result<FJSeries> {
    let v = spec.vanishing_order()?;
    if v < 1 {
        return Err(Error::InvalidArgument(format!(
            "vanishing order v = {v} must be >= 1"
        )));
    }
    if spec.d().iter().sum::<i64>() % 2 != 0 {
        return Err(Error::FractionalExponent(
            "sum of theta arguments must be even".into(),
        ));
    }
    let k = spec.weight();
    let two_k = 2 * k;
    let sign = if v % 2 == 0 { Rat::one() } else { -Rat::one() };

    // first term: (-1)^v 2^(k-1) q^v prod_j (1+q^j)^2k prod_i
    // (zeta^(d_i/2) + zeta^(-d_i/2)) prod_{i,j} (1+q^j zeta^(+-d_i))
    let inner = window - v;
    let mut term1 = FJSeries::zero(1, window.max(0));
    if inner >= 0 {
        let mut factors = Vec::new();
        for j in 1..=inner.max(0) {
            factors.push(AtomFactor::new(1, j, 0, two_k));
            for &d in spec.d() {
                factors.push(AtomFactor::new(1, j, 2 * d, 1));
                factors.push(AtomFactor::new(1, j, -2 * d, 1));
            }
        }
        let product = expand_atom_product(&factors, 1, inner)?;
        let mut lead = ZetaPoly::one();
        for &d in spec.d() {
            lead = lead.mul(&ZetaPoly::from_terms([
                (d, Rat::one()),
                (-d, Rat::one()),
            ]));
        }
        let mut lead_series = FJSeries::zero(1, inner);
        lead_series.set_row(0, lead);
        let scale = &sign * arith::rat_pow(&rat_int(2), k - 1);
        term1 = product.mul(&lead_series)?.shift(v, 0).scale(&scale);
    }

    // half-integer part: P = prod_{odd j} (1+x^j)^2k prod_i (1+x^j zeta^(+-d_i))
    // with x = q^(1/2); the combination (-1)^v P(-x) + P(x) keeps exactly the
    // monomials x^m with m = v (mod 2), each doubled, so
    // 1/2 q^(-v/2) [ ... ] = sum over those m of coeff * q^((m-v)/2).
    let x_window = v + 2 * window.max(0);
    let mut factors = Vec::new();
    let mut j = 1i64;
    while j <= x_window {
        factors.push(AtomFactor::new(1, j, 0, two_k));
        for &d in spec.d() {
            factors.push(AtomFactor::new(1, j, 2 * d, 1));
            factors.push(AtomFactor::new(1, j, -2 * d, 1));
        }
        j += 2;
    }
    let p = expand_atom_product(&factors, 1, x_window)?;
    let mut term2 = FJSeries::zero(1, window.max(0));
    for (&m, row) in p.rows() {
        if (m - v).rem_euclid(2) == 0 {
            term2.set_row((m - v) / 2, row.clone());
        }
    }

    let psi = term1.add(&term2)?;
    // pole bound from the q^(-v/2) prefactor
    let n0 = v / 2;
    if psi.min_q() != Some(-n0) {
        return Err(Error::Inconsistency(format!(
            "psi lowest exponent {:?} differs from -floor(v/2) = {}",
            psi.min_q(),
            -n0
        )));
    }
    Ok(psi)
}

// ---------------------------------------------------------------------------
// Singular table
// ---------------------------------------------------------------------------

/// Canonical representative of `r` modulo `2t` in `(-t, t]`.
pub fn canonical_r(r: i64, t: i64) -> i64 {
    let mut rr = r.rem_euclid(2 * t);
    if rr > t {
        rr -= 2 * t;
    }
    rr
}

/// Singular Fourier coefficients of a weight-zero `psi` of index `t`, keyed
/// by class: discriminant `D = 4tn - r^2 <= 0` and `r` mod `2t` in `(-t,t]`.
/// Coefficients must be integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularTable {
    pub t: i64,
    /// pole order bound: support has n >= -n0
    pub n0: i64,
    pub rows: BTreeMap<(i64, i64), BigInt>,
}

impl SingularTable {
    /// Coefficient of any singular point (n, r) via class reduction;
    /// zero when the class is absent.
    pub fn coeff(&self, n: i64, r: i64) -> BigInt {
        let d = 4 * self.t * n - r * r;
        debug_assert!(d <= 0, "({n},{r}) is not singular");
        let rbar = canonical_r(r, self.t);
        self.rows.get(&(d, rbar)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Most negative discriminant present, if any.
    pub fn min_disc(&self) -> Option<i64> {
        self.rows.keys().map(|&(d, _)| d).min()
    }

    /// Rows as (n, r, coeff) with `r >= 0` canonical and `n` the canonical
    /// row `(D + r^2)/(4t)`, sorted; mirror classes are merged.
    pub fn display_rows(&self) -> Vec<(i64, i64, BigInt)> {
        let mut out = Vec::new();
        for (&(d, rbar), c) in &self.rows {
            if rbar < 0 {
                continue; // mirror of a nonnegative class
            }
            let n = (d + rbar * rbar) / (4 * self.t);
            out.push((n, rbar, c.clone()));
        }
        out.sort();
        out
    }

    /// The classes that carry weight, character and divisor information:
    /// strictly negative discriminant, plus the constant term `(0,0)`.
    /// This matches the usual "representative singular part" listings, which
    /// omit discriminant-zero classes with `r != 0`.
    pub fn representative_rows(&self) -> Vec<(i64, i64, BigInt)> {
        self.display_rows()
            .into_iter()
            .filter(|&(n, r, _)| 4 * self.t * n - r * r < 0 || (n == 0 && r == 0))
            .collect()
    }

    /// Discriminant-zero classes with `r != 0`.  These touch the boundary
    /// `4tn = r^2`; they may carry negative coefficients, but the matrices
    /// they would correspond to are degenerate, so no Humbert surface and no
    /// product datum sees them.  Reported prominently rather than assumed
    /// away.
    pub fn boundary_rows(&self) -> Vec<(i64, i64, BigInt)> {
        self.display_rows()
            .into_iter()
            .filter(|&(n, r, _)| 4 * self.t * n - r * r == 0 && r != 0)
            .collect()
    }
}

/// Extract the complete singular table of `psi`.  The window must cover
/// `n <= floor(t/4)`, where every canonical representative lives.
pub fn singular_table(psi: &FJSeries, t: i64, n0: i64) -> Result<SingularTable> {
    let psi = psi.normalize();
    if psi.qden() != 1 {
        return Err(Error::FractionalExponent("psi must have integer exponents".into()));
    }
    let needed = t.div_euclid(4);
    if psi.trunc() < needed {
        return Err(Error::WindowTooSmall {
            needed,
            available: psi.trunc(),
        });
    }
    if let Some(m) = psi.min_q() {
        if m < -n0 {
            return Err(Error::Inconsistency(format!(
                "pole order {} exceeds bound {n0}",
                -m
            )));
        }
    }
    let mut rows: BTreeMap<(i64, i64), BigInt> = BTreeMap::new();
    for (&n, row) in psi.rows() {
        for (&z2, c) in row.iter() {
            if z2 % 2 != 0 {
                return Err(Error::FractionalExponent(format!(
                    "zeta-exponent {z2}/2 in psi"
                )));
            }
            let r = z2 / 2;
            let d = 4 * t * n - r * r;
            if d > 0 {
                continue;
            }
            if !is_integer(c) {
                return Err(Error::NonIntegralCoefficient(format!(
                    "singular c({n},{r}) = {c}"
                )));
            }
            let rbar = canonical_r(r, t);
            let coeff = c.to_integer();
            // every point of a class must carry the same coefficient
            if let Some(prev) = rows.insert((d, rbar), coeff.clone()) {
                if prev != coeff {
                    return Err(Error::Inconsistency(format!(
                        "class (D={d}, r={rbar}) seen with {prev} and {coeff}"
                    )));
                }
            }
        }
    }
    Ok(SingularTable { t, n0, rows })
}

// ---------------------------------------------------------------------------
// Product data
// ---------------------------------------------------------------------------

/// Weight, character and divisor data of the Borcherds lift of `psi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorcherdsData {
    pub t: i64,
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d0: BigInt,
    pub d1: BigInt,
    /// k' = c(0,0)/2
    pub weight: Rat,
    pub character_trivial: bool,
    /// D0 even
    pub symmetric: bool,
    /// no negative coefficient on a class of strictly negative discriminant
    pub holomorphic: bool,
    /// discriminant-zero classes with negative coefficients, as canonical
    /// (n, r, c); harmless for holomorphy (degenerate classes) but reported
    pub boundary_negatives: Vec<(i64, i64, BigInt)>,
}

/// Compute `A, B, C, D0, D1`, the weight and the flags from `psi`.
/// The identity `tA - tD1 - C = 0` is asserted; its failure is an internal
/// inconsistency, not a data condition.
pub fn borcherds_data(psi: &FJSeries, t: i64, v: i64) -> Result<BorcherdsData> {
    let psi = psi.normalize();
    let n0 = v.div_euclid(2);
    let table = singular_table(&psi, t, n0)?;
    if psi.trunc() < 0 {
        return Err(Error::WindowTooSmall {
            needed: 0,
            available: psi.trunc(),
        });
    }

    let mut sum_c = Rat::zero(); // 24 A
    let mut sum_lc = Rat::zero(); // 2 B
    let mut sum_l2c = Rat::zero(); // 4 C
    let row0 = psi.row(0);
    for (&z2, c) in row0.iter() {
        let l = z2 / 2;
        sum_c += c;
        if l > 0 {
            sum_lc += rat_int(l) * c;
        }
        sum_l2c += rat_int(l * l) * c;
    }
    let a = sum_c / rat_int(24);
    let b = sum_lc / rat_int(2);
    let c_val = sum_l2c / rat_int(4);

    let mut d0 = BigInt::zero();
    let mut d1 = BigInt::zero();
    for (&n, row) in psi.rows() {
        if n >= 0 {
            break;
        }
        for (&z2, coeff) in row.iter() {
            if !is_integer(coeff) {
                return Err(Error::NonIntegralCoefficient(format!(
                    "polar c({n},{}) = {coeff}",
                    z2 / 2
                )));
            }
            let ci = coeff.to_integer();
            if z2 == 0 {
                d0 += BigInt::from(arith::sigma0(-n)) * &ci;
            }
            d1 += BigInt::from(arith::sigma1(-n)) * &ci;
        }
    }

    let weight = psi.coeff(0, 0)? / rat_int(2);

    let identity = rat_int(t) * (&a - Rat::from_integer(d1.clone())) - &c_val;
    if !identity.is_zero() {
        return Err(Error::Inconsistency(format!(
            "tA - tD1 - C = {identity} != 0"
        )));
    }

    let character_trivial =
        is_integer(&a) && is_integer(&c_val) && (c_val.numer() % BigInt::from(t)).is_zero();
    let symmetric = (&d0 % BigInt::from(2)).is_zero();
    let holomorphic = table
        .rows
        .iter()
        .all(|(&(d, _), c)| d == 0 || !c.is_negative());
    let boundary_negatives = table
        .boundary_rows()
        .into_iter()
        .filter(|(_, _, c)| c.is_negative())
        .collect();

    Ok(BorcherdsData {
        t,
        a,
        b,
        c: c_val,
        d0,
        d1,
        weight,
        character_trivial,
        symmetric,
        holomorphic,
        boundary_negatives,
    })
}

// ---------------------------------------------------------------------------
// Humbert divisors
// ---------------------------------------------------------------------------

/// One Humbert surface class: positive discriminant `D`, `r` mod `2t`
/// (canonical, folded to `r >= 0`), and the multiplicity
/// `sum_{n>=1} c(n^2 n0 m0, n r0)` over the primitive representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HumbertClass {
    pub disc: i64,
    pub r: i64,
    pub multiplicity: BigInt,
}

/// All Humbert classes with nonzero multiplicity, from a complete singular
/// table.  Classes are keyed by `(D, r)` with `r` in `[0, t]`; the mirror
/// `(D, -r)` names the same surface.
pub fn humbert_divisor(table: &SingularTable) -> Vec<HumbertClass> {
    let t = table.t;
    let max_neg = match table.min_disc() {
        Some(d) if d < 0 => -d,
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    for disc in 1..=max_neg {
        for rbar in 0..=t {
            // a primitive T0 = (n0, r0, m0) with r0 = rbar, m0 = 1,
            // n0 = (rbar^2 - D)/(4t) exists iff 4t | rbar^2 - D
            if (rbar * rbar - disc).rem_euclid(4 * t) != 0 {
                continue;
            }
            let p = (rbar * rbar - disc) / (4 * t);
            let mut mult = BigInt::zero();
            let mut lam = 1i64;
            while lam * lam * disc <= max_neg {
                // point (lam^2 n0 m0, lam r0) = (lam^2 p, lam rbar)
                mult += table.coeff(lam * lam * p, lam * rbar);
                lam += 1;
            }
            if !mult.is_zero() {
                out.push(HumbertClass {
                    disc,
                    r: rbar,
                    multiplicity: mult,
                });
            }
        }
    }
    out.sort_by_key(|h| (-h.disc, h.r));
    out
}

// ---------------------------------------------------------------------------
// Borcherds Fourier-Jacobi expansion
// ---------------------------------------------------------------------------

/// Read the leading theta block off row 0 of `psi`:
/// `eta^(c(0,0)) prod (theta_l / eta)^(c(0,l))`, i.e. THBK with
/// `u = c(0,0) - sum_{l>0} c(0,l)` and `d = {l repeated c(0,l) times}`.
/// A negative `c(0,l)` for `l > 0` is a theta denominator and is rejected.
pub fn leading_block_spec(psi: &FJSeries) -> Result<ThetaBlockSpec> {
    let psi = psi.normalize();
    let row0 = psi.row(0);
    let mut u = row0.coeff(0);
    if !is_integer(&u) {
        return Err(Error::NonIntegralCoefficient(format!("c(0,0) = {u}")));
    }
    let mut d = Vec::new();
    for (&z2, c) in row0.iter() {
        if z2 <= 0 {
            continue;
        }
        if z2 % 2 != 0 {
            return Err(Error::FractionalExponent(format!("zeta-exponent {z2}/2")));
        }
        let l = z2 / 2;
        if !is_integer(c) {
            return Err(Error::NonIntegralCoefficient(format!("c(0,{l}) = {c}")));
        }
        let e = c.to_integer();
        if e.is_negative() {
            return Err(Error::ThetaDenominator {
                ell: l,
                exponent: i64::try_from(&e).unwrap_or(i64::MIN),
            });
        }
        let e64 = i64::try_from(&e).map_err(|_| {
            Error::InvalidArgument(format!("c(0,{l}) = {e} too large for a block"))
        })?;
        for _ in 0..e64 {
            d.push(l);
        }
        u -= Rat::from_integer(e);
    }
    ThetaBlockSpec::new(i64::try_from(&u.to_integer()).unwrap(), d)
}

/// Borcherds product Fourier-Jacobi expansion through `fjmax` steps:
/// entries at xi-exponents `C, C+t, ..., C+fjmax*t`, keyed by the exponent
/// divided by `t`.  Entry `C/t + m` is  `Theta * E_m` where `Theta` is the
/// leading theta block and `sum E_m X^m = exp(-sum_{j>=1} (psi|V_j) X^j)`
/// with weight-zero `V_j`.  All final coefficients must be integers.
///
/// Window bookkeeping: with pole order `n0`, the factor `psi|V_j` reaches
/// down to order `-n0 j`, so each `E_m` loses up to `n0 m` of window in the
/// products.  Everything is therefore computed with margin `n0 * fjmax` and
/// cut back to `window` at the end; `psi` must be exact through
/// `fjmax * (window + n0 * fjmax)` and through `floor(t/4)`.
pub fn borch_fj_expansion(psi: &FJSeries, t: i64, fjmax: i64, window: i64) -> Result<FJExpansion> {
    if fjmax < 0 || window < 0 {
        return Err(Error::InvalidArgument(
            "fjmax and window must be >= 0".into(),
        ));
    }
    let psi = psi.normalize();
    let n0 = psi.min_q().map(|m| (-m).max(0)).unwrap_or(0);
    let wprime = window + n0 * fjmax;
    let needed = (fjmax.max(1) * wprime).max(t.div_euclid(4));
    if psi.trunc() < needed {
        return Err(Error::WindowTooSmall {
            needed,
            available: psi.trunc(),
        });
    }

    let spec = leading_block_spec(&psi)?;
    let data = borcherds_data(&psi, t, 2 * n0)?;
    if !is_integer(&data.c) {
        return Err(Error::NonIntegralCoefficient(format!("C = {}", data.c)));
    }
    let c_int = data.c.to_integer();
    let c_i64 = i64::try_from(&c_int)
        .map_err(|_| Error::InvalidArgument(format!("C = {c_int} out of range")))?;
    if c_i64 % t != 0 {
        return Err(Error::Inconsistency(format!(
            "t = {t} does not divide C = {c_i64}"
        )));
    }
    let base_index = c_i64 / t;

    // leading block with its bookkeeping checks: q-order = A, top zeta
    // degree = 2B
    let theta = build_theta_block(&spec, 1, wprime)?.normalize().truncated(wprime);
    let a_i64 = i64::try_from(&data.a.to_integer()).unwrap_or(i64::MIN);
    if !is_integer(&data.a) || theta.min_q() != Some(a_i64) {
        return Err(Error::Inconsistency(format!(
            "leading block q-order {:?} != A = {}",
            theta.min_q(),
            data.a
        )));
    }
    let lead_top = leading_laurent(spec.d()).max_z2().unwrap_or(0);
    if rat_int(lead_top) != &data.b * rat_int(2) {
        return Err(Error::Inconsistency(format!(
            "leading block zeta-order {lead_top}/2 != B = {}",
            data.b
        )));
    }

    // E_m by the exponential recurrence m E_m = sum_j j a_j E_{m-j},
    // a_j = -(psi|V_j) at weight zero.
    let mut vms: Vec<FJSeries> = Vec::new();
    for j in 1..=fjmax {
        vms.push(apply_vm(&psi, 0, j)?.truncated(wprime).neg());
    }
    let mut e: Vec<FJSeries> = vec![FJSeries::one(1, wprime)];
    for m in 1..=fjmax {
        let mut acc: Option<FJSeries> = None;
        for j in 1..=m {
            let term = vms[(j - 1) as usize]
                .scale(&rat_int(j))
                .mul(&e[(m - j) as usize])?;
            acc = Some(match acc {
                None => term,
                Some(prev) => prev.add(&term)?,
            });
        }
        e.push(acc.unwrap().scale(&rat(1, m)));
    }

    let mut entries = Vec::new();
    for (m, em) in e.iter().enumerate() {
        let entry = theta.mul(em)?;
        if entry.trunc() < window {
            return Err(Error::Inconsistency(format!(
                "entry {m} window {} fell below {window}",
                entry.trunc()
            )));
        }
        let entry = entry.truncated(window);
        if !entry.is_integral() {
            return Err(Error::NonIntegralCoefficient(format!(
                "entry {} of the product expansion",
                base_index + m as i64
            )));
        }
        entries.push((base_index + m as i64, entry));
    }
    let weight = i64::try_from(&data.weight.to_integer()).unwrap_or(0);
    Ok(FJExpansion { t, weight, entries })
}

// ---------------------------------------------------------------------------
// Fourier-Jacobi comparison
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FjVerdict {
    /// coefficients agree exactly through the stated scaled window
    Equal { window: i64 },
    /// first differing coefficient (scaled q-exponent, z2, left, right)
    Mismatch { q: i64, z2: i64, left: Rat, right: Rat },
    MissingLeft,
    MissingRight,
}

#[derive(Clone, Debug)]
pub struct FjComparison {
    pub index: i64,
    pub verdict: FjVerdict,
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub all_equal: bool,
    pub per_index: Vec<FjComparison>,
}

/// Exact equality verdict per Fourier-Jacobi index `<= up_to`, with the
/// first discrepancy located when there is one.
pub fn compare_fj(a: &FJExpansion, b: &FJExpansion, up_to: i64) -> Result<CompareReport> {
    if a.t != b.t {
        return Err(Error::InvalidArgument(format!(
            "comparing expansions of different index scales {} vs {}",
            a.t, b.t
        )));
    }
    let mut indices: Vec<i64> = a
        .indices()
        .into_iter()
        .chain(b.indices())
        .filter(|&i| i <= up_to)
        .collect();
    indices.sort_unstable();
    indices.dedup();
    let mut per_index = Vec::new();
    let mut all_equal = true;
    for i in indices {
        let verdict = match (a.entry(i), b.entry(i)) {
            (None, _) => FjVerdict::MissingLeft,
            (_, None) => FjVerdict::MissingRight,
            (Some(x), Some(y)) => {
                let x = x.normalize();
                let y = y.normalize();
                if x.qden() != y.qden() {
                    // incompatible exponent lattices: compare via a common
                    // denominator
                    let l = arith::lcm(x.qden(), y.qden());
                    let xx = x.rescale(l)?;
                    let yy = y.rescale(l)?;
                    compare_entry(&xx, &yy)
                } else {
                    compare_entry(&x, &y)
                }
            }
        };
        if !matches!(verdict, FjVerdict::Equal { .. }) {
            all_equal = false;
        }
        per_index.push(FjComparison { index: i, verdict });
    }
    Ok(CompareReport {
        all_equal,
        per_index,
    })
}

fn compare_entry(x: &FJSeries, y: &FJSeries) -> FjVerdict {
    let window = x.trunc().min(y.trunc());
    match x.first_difference(y, window) {
        None => FjVerdict::Equal { window },
        Some((q, z2, left, right)) => FjVerdict::Mismatch { q, z2, left, right },
    }
}

// ---------------------------------------------------------------------------
// Parity of D0
// ---------------------------------------------------------------------------

/// Two-route parity of `D0` as a function of the vanishing order `v`:
/// the closed criterion (odd iff `v = 2^beta` with beta odd) and the
/// combinatorial sum
/// `D0 = sum_{n>=1} sum_{(r_1,r_3,...) in T((v-2n^2)/2)} prod C(12v, r_i)`
/// mod 2, where `T_h` indexes partitions of `h` into odd parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityReduction {
    pub v: i64,
    pub beta: u32,
    pub w: i64,
    /// `mu` with `w = 1 + 8 mu`, when `w = 1 mod 8`
    pub mu: Option<i64>,
    /// true = odd (antisymmetric)
    pub parity_odd: bool,
}

/// Partitions of `h` into odd parts, as multiplicity tuples; the summand
/// `prod_i C(top, a_i)` is accumulated mod 2 via Lucas.
fn t_sum_parity(h: i64, top: u64) -> bool {
    fn rec(h: i64, min_part: i64, top: u64) -> u64 {
        if h == 0 {
            return 1;
        }
        let mut total = 0u64;
        let mut part = min_part;
        while part <= h {
            // choose multiplicity a >= 1 of this odd part
            let mut a = 1i64;
            while a * part <= h {
                if binomial_odd(top, a as u64) {
                    total += rec(h - a * part, part + 2, top);
                }
                a += 1;
            }
            part += 2;
        }
        total & 1
    }
    if h < 0 {
        return false;
    }
    rec(h, 1, top) & 1 == 1
}

/// Parity of `D0` by the closed criterion and by the reduced combinatorial
/// sum; both routes must agree.
pub fn d0_parity_reduced(v: i64) -> Result<ParityReduction> {
    if v < 1 {
        return Err(Error::InvalidArgument(format!("v = {v} must be >= 1")));
    }
    let (beta, w) = two_adic_split(v);
    let closed = beta % 2 == 1 && w == 1;

    // combinatorial route: D0 = sum_{n >= 1} [T((v - 2n^2)/2) sum] mod 2
    let mut comb = false;
    let mut n = 1i64;
    while 2 * n * n <= v {
        let num = v - 2 * n * n;
        if num % 2 == 0 {
            comb ^= t_sum_parity(num / 2, (12 * v) as u64);
        }
        n += 1;
    }

    if comb != closed {
        return Err(Error::Inconsistency(format!(
            "parity routes disagree at v = {v}: closed {closed}, combinatorial {comb}"
        )));
    }
    let mu = if w % 8 == 1 { Some((w - 1) / 8) } else { None };
    Ok(ParityReduction {
        v,
        beta,
        w,
        mu,
        parity_odd: closed,
    })
}

// ---------------------------------------------------------------------------
// Subset-sum identities (brute force)
// ---------------------------------------------------------------------------

/// Signed list `e_i = sgn(i) d_|i|` over `L = {-l..-1, 1..l}`.
fn signed_entries(d: &[i64]) -> Vec<i64> {
    let l = d.len();
    let mut e = Vec::with_capacity(2 * l);
    for i in (1..=l).rev() {
        e.push(-d[i - 1]);
    }
    for i in 1..=l {
        e.push(d[i - 1]);
    }
    e
}

/// Exhaustively verify
/// `sum over size-a subsets S of L of e_S^2 = C(2l-2, a-1) sum e_i^2`.
pub fn subset_square_sum_identity(d: &[i64], a: usize) -> bool {
    let e = signed_entries(d);
    let n = e.len();
    if a == 0 || a > n {
        return false;
    }
    let mut lhs: i64 = 0;
    // iterate subsets of size a
    let mut idx: Vec<usize> = (0..a).collect();
    loop {
        let s: i64 = idx.iter().map(|&i| e[i]).sum();
        lhs += s * s;
        // next combination
        let mut i = a;
        loop {
            if i == 0 {
                idx.clear();
                break;
            }
            i -= 1;
            if idx[i] != i + n - a {
                idx[i] += 1;
                for j in i + 1..a {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if idx.is_empty() {
            break;
        }
    }
    let sum_sq: i64 = e.iter().map(|&x| x * x).sum();
    let rhs = arith::binomial(n as i64 - 2, a as i64 - 1) * BigInt::from(sum_sq);
    BigInt::from(lhs) == rhs
}

/// Exhaustively verify that
/// `sum over (S_1..S_beta), |S_i| = b_i, of (sum_i e_{S_i})^2` is an
/// integral multiple of `sum e_i^2`.
pub fn subset_profile_divisibility(d: &[i64], b_profile: &[usize]) -> bool {
    let e = signed_entries(d);
    let n = e.len();
    if b_profile.iter().any(|&b| b == 0 || b > n) {
        return false;
    }
    // precompute e_S for all subsets of each requested size
    let mut sums_by_size: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    for &b in b_profile {
        sums_by_size.entry(b).or_insert_with(|| {
            let mut sums = Vec::new();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize == b {
                    let s: i64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| e[i]).sum();
                    sums.push(s);
                }
            }
            sums
        });
    }
    fn rec(profile: &[usize], sums: &BTreeMap<usize, Vec<i64>>, acc: i64, total: &mut i64) {
        match profile.first() {
            None => *total += acc * acc,
            Some(&b) => {
                for &s in &sums[&b] {
                    rec(&profile[1..], sums, acc + s, total);
                }
            }
        }
    }
    let mut total = 0i64;
    rec(b_profile, &sums_by_size, 0, &mut total);
    let sum_sq: i64 = e.iter().map(|&x| x * x).sum();
    total % sum_sq == 0
}

// ---------------------------------------------------------------------------
// Convenience: table-1-style families
// ---------------------------------------------------------------------------

/// The level-one family member of vanishing order v: `u = 24v - 6`,
/// `d = (1,1)` (Delta^(v-1) eta^18 theta_1^2).
pub fn level_one_family(v: i64) -> ThetaBlockSpec {
    ThetaBlockSpec::new(24 * v - 6, vec![1, 1]).expect("ell+u even")
}

/// Row-0 and polar data of the family psi via the fast closed product;
/// `window` rows of nonnegative order are produced.
pub fn family_psi(v: i64, window: i64) -> Result<FJSeries> {
    build_psi_product(&level_one_family(v), window)
}
