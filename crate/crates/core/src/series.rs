//! Truncated exact Fourier-Jacobi series.
//!
//! An [`FJSeries`] is a finite map from scaled q-exponents to Laurent
//! polynomials in `zeta`.  The q-exponent of a stored key `e` is `e / qden`;
//! zeta-exponents are stored doubled (`z2`), so half-integer exponents are
//! exact.  Coefficients are arbitrary-precision rationals.
//!
//! Truncation bookkeeping: every coefficient with scaled q-exponent
//! `<= trunc` is exact, i.e. equal to the corresponding coefficient of the
//! untruncated object.  Multiplication and division shrink `trunc`
//! conservatively so that no inexact coefficient is ever stored.  Zero
//! coefficients are pruned after every operation, so support queries see the
//! true support.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Truncation value meaning "known at every order" (finite objects such as
/// Laurent polynomials).  Kept far from `i64::MAX` so saturating arithmetic
/// never wraps.
pub const FULL: i64 = i64::MAX / 4;

fn sat_add(a: i64, b: i64) -> i64 {
    a.saturating_add(b).min(FULL)
}

// ---------------------------------------------------------------------------
// ZetaPoly
// ---------------------------------------------------------------------------

/// Laurent polynomial in `zeta` with half-integer exponents; keys are twice
/// the exponent.  No stored value is zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ZetaPoly {
    terms: BTreeMap<i64, Rat>,
}

impl ZetaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(0, c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    /// Monomial `c * zeta^(z2/2)`.
    pub fn monomial(z2: i64, c: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(z2, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (z2, c) in it {
            p.add_term(z2, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, z2: i64) -> Rat {
        self.terms.get(&z2).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn min_z2(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_z2(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, z2: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(z2) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &ZetaPoly) {
        for (&z2, c) in &other.terms {
            self.add_term(z2, c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &ZetaPoly) {
        for (&z2, c) in &other.terms {
            self.add_term(z2, -c.clone());
        }
    }

    pub fn neg(&self) -> ZetaPoly {
        ZetaPoly {
            terms: self.terms.iter().map(|(&z, c)| (z, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> ZetaPoly {
        if s.is_zero() {
            return ZetaPoly::zero();
        }
        ZetaPoly {
            terms: self.terms.iter().map(|(&z, c)| (z, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &ZetaPoly) -> ZetaPoly {
        let mut out = ZetaPoly::zero();
        for (&za, ca) in &self.terms {
            for (&zb, cb) in &other.terms {
                out.add_term(za + zb, ca * cb);
            }
        }
        out
    }

    /// Accumulate `self += a * b` without building a temporary.
    fn add_mul(&mut self, a: &ZetaPoly, b: &ZetaPoly) {
        for (&za, ca) in &a.terms {
            for (&zb, cb) in &b.terms {
                self.add_term(za + zb, ca * cb);
            }
        }
    }

    /// Substitute `zeta -> zeta^b` (b >= 1): multiplies every exponent by b.
    pub fn dilate(&self, b: i64) -> ZetaPoly {
        ZetaPoly {
            terms: self.terms.iter().map(|(&z, c)| (z * b, c.clone())).collect(),
        }
    }

    /// Exact Laurent-polynomial division; `Err` if a nonzero remainder is
    /// left.  Division proceeds by ascending exponent.
    pub fn exact_div(&self, den: &ZetaPoly) -> std::result::Result<ZetaPoly, ()> {
        if den.is_zero() {
            return Err(());
        }
        if self.is_zero() {
            return Ok(ZetaPoly::zero());
        }
        let dmin = den.min_z2().unwrap();
        let dmax = den.max_z2().unwrap();
        let dlead = den.coeff(dmin);
        let mut rem = self.clone();
        let mut quo = ZetaPoly::zero();
        while !rem.is_zero() {
            let rmin = rem.min_z2().unwrap();
            let rmax = rem.max_z2().unwrap();
            // degree check: quotient exponent range must stay consistent
            if rmax - rmin < dmax - dmin {
                return Err(());
            }
            let qexp = rmin - dmin;
            let qc = rem.coeff(rmin) / &dlead;
            for (&z2, c) in &den.terms {
                rem.add_term(z2 + qexp, -(c * &qc));
            }
            quo.add_term(qexp, qc);
        }
        Ok(quo)
    }

    /// True if all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    /// True if all coefficients are >= 0.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

impl fmt::Display for ZetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&z2, c) in self.terms.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if z2 == 0 {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                if z2 % 2 == 0 {
                    write!(f, "z^{}", z2 / 2)?;
                } else {
                    write!(f, "z^({z2}/2)")?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// FJSeries
// ---------------------------------------------------------------------------

/// Truncated exact Fourier-Jacobi series: map from scaled q-exponent to
/// [`ZetaPoly`].  See module docs for the truncation contract.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FJSeries {
    qden: i64,
    trunc: i64,
    rows: BTreeMap<i64, ZetaPoly>,
}

impl FJSeries {
    pub fn zero(qden: i64, trunc: i64) -> Self {
        assert!(qden > 0, "qden must be positive");
        FJSeries {
            qden,
            trunc,
            rows: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat, qden: i64, trunc: i64) -> Self {
        let mut s = Self::zero(qden, trunc);
        s.set_row(0, ZetaPoly::constant(c));
        s
    }

    pub fn one(qden: i64, trunc: i64) -> Self {
        Self::constant(Rat::one(), qden, trunc)
    }

    /// Monomial `c * q^(qexp/qden) * zeta^(z2/2)`.
    pub fn monomial(qexp: i64, z2: i64, c: Rat, qden: i64, trunc: i64) -> Self {
        let mut s = Self::zero(qden, trunc);
        if qexp <= trunc {
            s.set_row(qexp, ZetaPoly::monomial(z2, c));
        }
        s
    }

    pub fn qden(&self) -> i64 {
        self.qden
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of stored (q, z2) coefficients.
    pub fn term_count(&self) -> usize {
        self.rows.values().map(ZetaPoly::len).sum()
    }

    /// Lowest scaled q-exponent with a nonzero row.
    pub fn min_q(&self) -> Option<i64> {
        self.rows.keys().next().copied()
    }

    pub fn rows(&self) -> impl DoubleEndedIterator<Item = (&i64, &ZetaPoly)> {
        self.rows.iter()
    }

    pub fn row(&self, qexp: i64) -> ZetaPoly {
        self.rows.get(&qexp).cloned().unwrap_or_default()
    }

    pub fn row_ref(&self, qexp: i64) -> Option<&ZetaPoly> {
        self.rows.get(&qexp)
    }

    /// Insert a row, pruning zeros; rows beyond the window are dropped.
    pub fn set_row(&mut self, qexp: i64, row: ZetaPoly) {
        if qexp > self.trunc || row.is_zero() {
            self.rows.remove(&qexp);
        } else {
            self.rows.insert(qexp, row);
        }
    }

    fn add_into_row(&mut self, qexp: i64, poly: &ZetaPoly) {
        if qexp > self.trunc {
            return;
        }
        let row = self.rows.entry(qexp).or_default();
        row.add_assign(poly);
        if row.is_zero() {
            self.rows.remove(&qexp);
        }
    }

    /// Add `c * q^(qexp/qden) * zeta^(z2/2)`; silently ignored beyond the
    /// window (the window already accounts for unknown terms there).
    pub fn add_term(&mut self, qexp: i64, z2: i64, c: Rat) {
        if qexp > self.trunc || c.is_zero() {
            return;
        }
        let row = self.rows.entry(qexp).or_default();
        row.add_term(z2, c);
        if row.is_zero() {
            self.rows.remove(&qexp);
        }
    }

    /// Exact coefficient of `q^(qexp/qden) * zeta^(z2/2)`; errors for
    /// exponents beyond the window rather than silently returning 0.
    pub fn coeff(&self, qexp: i64, z2: i64) -> Result<Rat> {
        if qexp > self.trunc {
            return Err(Error::BeyondTruncation {
                requested: qexp,
                trunc: self.trunc,
            });
        }
        Ok(self
            .rows
            .get(&qexp)
            .map(|r| r.coeff(z2))
            .unwrap_or_else(Rat::zero))
    }

    /// Coefficient lookup for integer-exponent series (`qden` must be 1);
    /// `n` is the q-exponent, `r` the zeta-exponent.
    pub fn coeff_int(&self, n: i64, r: i64) -> Result<Rat> {
        debug_assert_eq!(self.qden, 1);
        self.coeff(n, 2 * r)
    }

    fn check_qden(&self, other: &FJSeries) -> Result<()> {
        if self.qden != other.qden {
            return Err(Error::DenominatorMismatch {
                left: self.qden,
                right: other.qden,
            });
        }
        Ok(())
    }

    /// Coefficient-wise sum; the result window is the smaller of the two.
    pub fn add(&self, other: &FJSeries) -> Result<FJSeries> {
        self.check_qden(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = FJSeries::zero(self.qden, trunc);
        for (&q, row) in &self.rows {
            if q <= trunc {
                out.set_row(q, row.clone());
            }
        }
        for (&q, row) in &other.rows {
            out.add_into_row(q, row);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FJSeries) -> Result<FJSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FJSeries {
        FJSeries {
            qden: self.qden,
            trunc: self.trunc,
            rows: self.rows.iter().map(|(&q, r)| (q, r.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> FJSeries {
        if s.is_zero() {
            return FJSeries::zero(self.qden, self.trunc);
        }
        FJSeries {
            qden: self.qden,
            trunc: self.trunc,
            rows: self.rows.iter().map(|(&q, r)| (q, r.scale(s))).collect(),
        }
    }

    /// Multiply by the monomial `q^(qexp/qden) * zeta^(z2/2)`; the window
    /// shifts with the exponent.
    pub fn shift(&self, qexp: i64, z2: i64) -> FJSeries {
        FJSeries {
            qden: self.qden,
            trunc: sat_add(self.trunc, qexp),
            rows: self
                .rows
                .iter()
                .map(|(&q, r)| {
                    (
                        q + qexp,
                        if z2 == 0 {
                            r.clone()
                        } else {
                            ZetaPoly {
                                terms: r.iter().map(|(&z, c)| (z + z2, c.clone())).collect(),
                            }
                        },
                    )
                })
                .collect(),
        }
    }

    /// Window of the product `self * other`: a coefficient at scaled order n
    /// is exact iff no unknown order of either factor can reach n, i.e.
    /// n <= min(f.trunc + min_q(g), g.trunc + min_q(f)).
    fn mul_trunc(&self, other: &FJSeries) -> i64 {
        let fm = self.min_q().unwrap_or(FULL);
        let gm = other.min_q().unwrap_or(FULL);
        sat_add(self.trunc, gm).min(sat_add(other.trunc, fm))
    }

    /// Cauchy product.  Every retained coefficient equals the coefficient of
    /// the untruncated product.
    pub fn mul(&self, other: &FJSeries) -> Result<FJSeries> {
        self.check_qden(other)?;
        let trunc = self.mul_trunc(other);
        let mut out = FJSeries::zero(self.qden, trunc);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        // parallelize over rows of the larger factor when the work is big
        let work = self.term_count().saturating_mul(other.term_count());
        if work > 2_000_000 {
            let (big, small) = if self.term_count() >= other.term_count() {
                (self, other)
            } else {
                (other, self)
            };
            let rows: Vec<(&i64, &ZetaPoly)> = big.rows.iter().collect();
            let partials: Vec<BTreeMap<i64, ZetaPoly>> = rows
                .par_chunks(rows.len().div_ceil(rayon::current_num_threads().max(1)))
                .map(|chunk| {
                    let mut acc: BTreeMap<i64, ZetaPoly> = BTreeMap::new();
                    for (&qa, pa) in chunk {
                        for (&qb, pb) in &small.rows {
                            let q = qa + qb;
                            if q > trunc {
                                break;
                            }
                            acc.entry(q).or_default().add_mul(pa, pb);
                        }
                    }
                    acc
                })
                .collect();
            for part in partials {
                for (q, poly) in part {
                    out.add_into_row(q, &poly);
                }
            }
        } else {
            for (&qa, pa) in &self.rows {
                for (&qb, pb) in &other.rows {
                    let q = qa + qb;
                    if q > trunc {
                        break;
                    }
                    out.rows.entry(q).or_default().add_mul(pa, pb);
                }
            }
        }
        out.rows.retain(|_, r| !r.is_zero());
        Ok(out)
    }

    /// `self^e` for `e >= 0` by repeated squaring.
    pub fn pow(&self, e: u32) -> Result<FJSeries> {
        let mut result = FJSeries::one(self.qden, self.trunc);
        if e == 0 {
            return Ok(result);
        }
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(result)
    }

    /// Exact division, q-order by q-order.  At each step the accumulated
    /// zeta-polynomial must be exactly divisible by the divisor's lowest
    /// row; a remainder signals that the quotient is not a series with
    /// Laurent-polynomial coefficients.
    ///
    /// `cap` bounds the result window; it is required when both operands are
    /// fully known (otherwise the quotient would be an infinite object).
    pub fn exact_div(&self, den: &FJSeries, cap: Option<i64>) -> Result<FJSeries> {
        self.check_qden(den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dmin = den.min_q().unwrap();
        let dlead = den.row_ref(dmin).unwrap().clone();
        let derived = if let Some(nmin) = self.min_q() {
            self.trunc.min(sat_add(den.trunc, nmin - dmin)) - dmin
        } else {
            self.trunc - dmin
        };
        let trunc = match cap {
            Some(c) => derived.min(c),
            None => derived,
        };
        if trunc > FULL / 2 {
            return Err(Error::UnboundedWindow);
        }
        let mut out = FJSeries::zero(self.qden, trunc);
        let qmin = match self.min_q() {
            Some(m) => m - dmin,
            None => return Ok(out),
        };
        for m in qmin..=trunc {
            let mut acc = self.row(m + dmin);
            let hi = m + dmin - qmin;
            if hi > dmin {
                for (&dq, dp) in den.rows.range(dmin + 1..=hi) {
                    let qi = m + dmin - dq;
                    if let Some(qrow) = out.rows.get(&qi) {
                        let mut prod = ZetaPoly::zero();
                        prod.add_mul(qrow, dp);
                        acc.sub_assign(&prod);
                    }
                }
            }
            if acc.is_zero() {
                continue;
            }
            let q = acc
                .exact_div(&dlead)
                .map_err(|_| Error::InexactDivision { qexp: m })?;
            out.rows.insert(m, q);
        }
        Ok(out)
    }

    /// Exact division by a series in `q` alone.  Each zeta-column divides
    /// independently by the scalar series, which parallelizes and avoids
    /// polynomial division entirely.
    pub fn exact_div_pure_q(&self, den: &FJSeries, cap: Option<i64>) -> Result<FJSeries> {
        self.check_qden(den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut den_scalar: Vec<(i64, Rat)> = Vec::with_capacity(den.rows.len());
        for (&q, row) in &den.rows {
            if row.min_z2() != Some(0) || row.max_z2() != Some(0) {
                return Err(Error::InvalidArgument(
                    "divisor must be a series in q alone".into(),
                ));
            }
            den_scalar.push((q, row.coeff(0)));
        }
        let dmin = den_scalar[0].0;
        let dlead = den_scalar[0].1.clone();
        let derived = if let Some(nmin) = self.min_q() {
            self.trunc.min(sat_add(den.trunc, nmin - dmin)) - dmin
        } else {
            self.trunc - dmin
        };
        let trunc = match cap {
            Some(c) => derived.min(c),
            None => derived,
        };
        if trunc > FULL / 2 {
            return Err(Error::UnboundedWindow);
        }
        // split into zeta-columns
        let mut columns: BTreeMap<i64, Vec<(i64, Rat)>> = BTreeMap::new();
        for (&q, row) in &self.rows {
            for (&z2, c) in row.iter() {
                columns.entry(z2).or_default().push((q, c.clone()));
            }
        }
        let cols: Vec<(i64, Vec<(i64, Rat)>)> = columns.into_iter().collect();
        let quotient_cols: Vec<(i64, Vec<(i64, Rat)>)> = cols
            .into_par_iter()
            .map(|(z2, col)| {
                let mut out: BTreeMap<i64, Rat> = BTreeMap::new();
                let cmin = col[0].0 - dmin;
                let num: BTreeMap<i64, Rat> = col.into_iter().collect();
                for m in cmin..=trunc {
                    let mut acc = num.get(&(m + dmin)).cloned().unwrap_or_else(Rat::zero);
                    for (dq, dc) in den_scalar.iter().skip(1) {
                        if *dq > m + dmin - cmin {
                            break;
                        }
                        if let Some(qc) = out.get(&(m + dmin - dq)) {
                            acc -= qc * dc;
                        }
                    }
                    if !acc.is_zero() {
                        out.insert(m, acc / &dlead);
                    }
                }
                (z2, out.into_iter().collect())
            })
            .collect();
        let mut out = FJSeries::zero(self.qden, trunc);
        for (z2, col) in quotient_cols {
            for (q, c) in col {
                out.add_term(q, z2, c);
            }
        }
        Ok(out)
    }

    /// Exponent substitution `q -> q^a`, `zeta -> zeta^b`; coefficients
    /// unchanged.
    pub fn dilate(&self, a: i64, b: i64) -> Result<FJSeries> {
        if a < 1 || b < 1 {
            return Err(Error::InvalidArgument(format!("dilate({a},{b})")));
        }
        let trunc = self.trunc.saturating_mul(a).min(FULL);
        Ok(FJSeries {
            qden: self.qden,
            trunc,
            rows: self.rows.iter().map(|(&q, r)| (q * a, r.dilate(b))).collect(),
        })
    }

    /// Re-express with a different exponent denominator; exact or an error.
    pub fn rescale(&self, new_qden: i64) -> Result<FJSeries> {
        assert!(new_qden > 0);
        if new_qden == self.qden {
            return Ok(self.clone());
        }
        let mut rows = BTreeMap::new();
        for (&q, r) in &self.rows {
            let num = q.checked_mul(new_qden).ok_or_else(|| {
                Error::InvalidArgument("exponent overflow in rescale".into())
            })?;
            if num % self.qden != 0 {
                return Err(Error::IncompatibleDenominator {
                    exp: q,
                    qden: self.qden,
                    new_qden,
                });
            }
            rows.insert(num / self.qden, r.clone());
        }
        let trunc = if self.trunc >= FULL {
            FULL
        } else {
            // known through exponent trunc/qden
            (self.trunc.saturating_mul(new_qden)).div_euclid(self.qden)
        };
        Ok(FJSeries {
            qden: new_qden,
            trunc,
            rows,
        })
    }

    /// Reduce qden to the smallest denominator representing the support.
    /// Useful after assembling objects with integral exponents.
    pub fn normalize(&self) -> FJSeries {
        let mut g = self.qden;
        for &q in self.rows.keys() {
            g = num_integer::gcd(g, q);
            if g == 1 {
                break;
            }
        }
        if g <= 1 {
            return self.clone();
        }
        let trunc = if self.trunc >= FULL {
            FULL
        } else {
            self.trunc.div_euclid(g)
        };
        FJSeries {
            qden: self.qden / g,
            trunc,
            rows: self.rows.iter().map(|(&q, r)| (q / g, r.clone())).collect(),
        }
    }

    /// Forget everything above `trunc` (scaled).
    pub fn truncated(&self, trunc: i64) -> FJSeries {
        FJSeries {
            qden: self.qden,
            trunc: trunc.min(self.trunc),
            rows: self
                .rows
                .range(..=trunc)
                .map(|(&q, r)| (q, r.clone()))
                .collect(),
        }
    }

    /// True if every stored coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.rows.values().all(ZetaPoly::is_integral)
    }

    /// Support as (scaled q, z2) pairs.
    pub fn support(&self) -> Vec<(i64, i64)> {
        let mut pts = Vec::with_capacity(self.term_count());
        for (&q, row) in &self.rows {
            for (&z2, _) in row.iter() {
                pts.push((q, z2));
            }
        }
        pts
    }

    /// Equality of all coefficients up to scaled order `window` (inclusive);
    /// both series must be exact that far.
    pub fn agrees_with(&self, other: &FJSeries, window: i64) -> Result<bool> {
        self.check_qden(other)?;
        for s in [self, other] {
            if s.trunc < window {
                return Err(Error::WindowTooSmall {
                    needed: window,
                    available: s.trunc,
                });
            }
        }
        let a: BTreeMap<_, _> = self.rows.range(..=window).collect();
        let b: BTreeMap<_, _> = other.rows.range(..=window).collect();
        Ok(a == b)
    }

    /// First coefficient difference up to `window`, if any: (q, z2, lhs, rhs).
    pub fn first_difference(
        &self,
        other: &FJSeries,
        window: i64,
    ) -> Option<(i64, i64, Rat, Rat)> {
        let mut keys: Vec<(i64, i64)> = Vec::new();
        for (&q, row) in self.rows.range(..=window) {
            keys.extend(row.iter().map(|(&z2, _)| (q, z2)));
        }
        for (&q, row) in other.rows.range(..=window) {
            keys.extend(row.iter().map(|(&z2, _)| (q, z2)));
        }
        keys.sort_unstable();
        keys.dedup();
        for (q, z2) in keys {
            let a = self.rows.get(&q).map(|r| r.coeff(z2)).unwrap_or_else(Rat::zero);
            let b = other.rows.get(&q).map(|r| r.coeff(z2)).unwrap_or_else(Rat::zero);
            if a != b {
                return Some((q, z2, a, b));
            }
        }
        None
    }

    /// JSON per the wire schema: exact decimal strings, terms sorted by
    /// (q, z2).
    pub fn to_json(&self) -> Value {
        let mut terms = Vec::with_capacity(self.term_count());
        for (&q, row) in &self.rows {
            for (&z2, c) in row.iter() {
                terms.push(json!({
                    "q": q,
                    "z2": z2,
                    "num": c.numer().to_string(),
                    "den": c.denom().to_string(),
                }));
            }
        }
        json!({ "qden": self.qden, "trunc": self.trunc, "terms": terms })
    }
}

impl fmt::Display for FJSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            writeln!(f, "0 + O(q^{})", self.trunc + 1)?;
            return Ok(());
        }
        for (&q, row) in &self.rows {
            if q % self.qden == 0 {
                writeln!(f, "q^{}: {}", q / self.qden, row)?;
            } else {
                writeln!(f, "q^({}/{}): {}", q, self.qden, row)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Atom products
// ---------------------------------------------------------------------------

/// One factor `(1 + sign * q^(qexp/qden) * zeta^(z2/2))^power` of an
/// infinite product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtomFactor {
    pub sign: i8,
    /// scaled q-exponent, >= 0
    pub qexp: i64,
    /// twice the zeta-exponent
    pub z2: i64,
    pub power: i64,
}

impl AtomFactor {
    pub fn new(sign: i8, qexp: i64, z2: i64, power: i64) -> Self {
        AtomFactor {
            sign,
            qexp,
            z2,
            power,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::MalformedFactor(format!("sign {}", self.sign)));
        }
        if self.qexp < 0 {
            return Err(Error::MalformedFactor(format!(
                "negative q-exponent {}",
                self.qexp
            )));
        }
        if self.power < 0 && self.qexp == 0 {
            return Err(Error::MalformedFactor(
                "negative power needs positive q-exponent to invert".into(),
            ));
        }
        Ok(())
    }

    /// Truncated expansion by the generalized binomial series.
    fn expand(&self, qden: i64, trunc: i64) -> Result<FJSeries> {
        self.validate()?;
        let mut s = FJSeries::zero(qden, trunc);
        if self.power == 0 {
            return Ok(FJSeries::one(qden, trunc));
        }
        let sign = BigInt::from(self.sign);
        if self.power > 0 {
            let p = self.power;
            let mut coeff = BigInt::one();
            let mut i: i64 = 0;
            loop {
                if i > p || (self.qexp > 0 && i * self.qexp > trunc) {
                    break;
                }
                s.add_into_row(
                    i * self.qexp,
                    &ZetaPoly::monomial(i * self.z2, Rat::from_integer(coeff.clone())),
                );
                // next binomial C(p, i+1) * sign^(i+1)
                coeff = coeff * BigInt::from(p - i) * &sign / BigInt::from(i + 1);
                i += 1;
            }
        } else {
            // (1+x)^(-p) = sum_i C(p+i-1, i) (-x)^i
            let p = -self.power;
            let mut coeff = BigInt::one();
            let mut i: i64 = 0;
            loop {
                if i * self.qexp > trunc {
                    break;
                }
                s.add_into_row(
                    i * self.qexp,
                    &ZetaPoly::monomial(i * self.z2, Rat::from_integer(coeff.clone())),
                );
                coeff = coeff * BigInt::from(p + i) * (-&sign) / BigInt::from(i + 1);
                i += 1;
            }
        }
        Ok(s)
    }
}

/// Truncated product of atom factors.  Only factors with `qexp <= trunc`
/// affect the window, so infinite products are consulted finitely.
pub fn expand_atom_product(factors: &[AtomFactor], qden: i64, trunc: i64) -> Result<FJSeries> {
    let mut relevant: Vec<&AtomFactor> = Vec::new();
    for f in factors {
        f.validate()?;
        if f.qexp <= trunc || f.qexp == 0 {
            relevant.push(f);
        }
    }
    relevant.sort_by_key(|f| std::cmp::Reverse(f.qexp));
    let mut acc = FJSeries::one(qden, trunc);
    for f in relevant {
        acc = acc.mul(&f.expand(qden, trunc)?)?;
        // the accumulator stays a genuinely truncated object
        acc.trunc = trunc;
    }
    Ok(acc)
}
