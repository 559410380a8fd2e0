//! Support hulls as generalized valuations.
//!
//! The valuation of a series is the convex hull of its support in the
//! (n, r)-plane, with a recession ray along the positive n-axis for genuine
//! series (the ray absorbs high q-orders; for Laurent polynomials the plain
//! hull is used).  Multiplication of series adds valuations as Minkowski
//! sums; this is checked exactly on rational coordinates.
//!
//! With the ray, only the lower boundary in n matters: the hull is
//! `{(n, r): rmin <= r <= rmax, n >= env(r)}` for a convex piecewise-linear
//! envelope, and the extreme points are the envelope's vertices.

use num_rational::BigRational;

use crate::arith::rat_int;
use crate::error::{Error, Result};
use crate::series::{FJSeries, Rat};

/// Extreme points of a support hull, sorted by r; `recession` marks the ray
/// `{(s, 0): s >= 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportHull {
    /// (n, r) with exact rational coordinates
    pub extreme_points: Vec<(Rat, Rat)>,
    pub recession: bool,
}

/// cross product (b - a) x (c - a) over scaled integer coordinates
fn cross(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    let (ax, ay) = (a.0 as i128, a.1 as i128);
    let (bx, by) = (b.0 as i128, b.1 as i128);
    let (cx, cy) = (c.0 as i128, c.1 as i128);
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

/// Lower-convex chain of `min n per r` over (r, n) points; input sorted by r.
/// "Lower" means in the n-direction; strictly convex turns only.
fn lower_chain(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    // points are (z2, q); chain in the (z2, q)-plane keeping q minimal
    let mut chain: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        while chain.len() >= 2 && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0 {
            chain.pop();
        }
        chain.push(p);
    }
    chain
}

/// Full convex hull (monotone chain) of integer points; returns all hull
/// vertices, strictly (collinear points dropped).
fn full_hull(mut points: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    points.sort_unstable();
    points.dedup();
    let n = points.len();
    if n <= 2 {
        return points;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &points {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl SupportHull {
    fn from_scaled(points: Vec<(i64, i64)>, qden: i64, recession: bool) -> SupportHull {
        // scaled points are (q, z2); hull computed in (z2, q) coordinates
        let verts: Vec<(i64, i64)> = if recession {
            // minimal q for each z2, then the lower chain
            let mut min_q: std::collections::BTreeMap<i64, i64> = std::collections::BTreeMap::new();
            for (q, z2) in points {
                min_q
                    .entry(z2)
                    .and_modify(|m| *m = (*m).min(q))
                    .or_insert(q);
            }
            let pts: Vec<(i64, i64)> = min_q.into_iter().collect();
            lower_chain(&pts)
        } else {
            full_hull(points.into_iter().map(|(q, z2)| (z2, q)).collect())
        };
        let mut extreme_points: Vec<(Rat, Rat)> = verts
            .into_iter()
            .map(|(z2, q)| (BigRational::new(q.into(), qden.into()), BigRational::new(z2.into(), 2.into())))
            .collect();
        extreme_points.sort_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)));
        SupportHull {
            extreme_points,
            recession,
        }
    }
}

/// Exact convex hull of the (truncated) support of `f`, with the recession
/// ray when flagged.  Errors on the zero series.
pub fn hull_of_support(f: &FJSeries, with_recession: bool) -> Result<SupportHull> {
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    Ok(SupportHull::from_scaled(
        f.support(),
        f.qden(),
        with_recession,
    ))
}

/// Hull of pairwise sums of extreme points (plus the ray when present).
pub fn minkowski_sum(h1: &SupportHull, h2: &SupportHull) -> Result<SupportHull> {
    if h1.recession != h2.recession {
        return Err(Error::InvalidArgument(
            "mixing hulls with and without recession ray".into(),
        ));
    }
    // bring both to a common integer grid
    let mut den_q = num_bigint::BigInt::from(1);
    for (n, _) in h1.extreme_points.iter().chain(&h2.extreme_points) {
        den_q = num_integer::lcm(den_q, n.denom().clone());
    }
    let den_q_i: i64 = i64::try_from(&den_q).map_err(|_| {
        Error::InvalidArgument("hull coordinates too large for Minkowski sum".into())
    })?;
    let scale = |p: &(Rat, Rat)| -> (i64, i64) {
        let q = (&p.0 * rat_int(den_q_i)).to_integer();
        let z2 = (&p.1 * rat_int(2)).to_integer();
        (i64::try_from(&q).unwrap(), i64::try_from(&z2).unwrap())
    };
    let mut sums = Vec::with_capacity(h1.extreme_points.len() * h2.extreme_points.len());
    for a in &h1.extreme_points {
        let (qa, za) = scale(a);
        for b in &h2.extreme_points {
            let (qb, zb) = scale(b);
            sums.push((qa + qb, za + zb));
        }
    }
    Ok(SupportHull::from_scaled(sums, den_q_i, h1.recession))
}

/// `min over extreme points of (n + r x)`; the caller adds the `t x^2` term
/// of the full pairing.  Requires the recession ray so the minimum exists.
pub fn ord_via_hull(h: &SupportHull, x: &Rat) -> Result<Rat> {
    if !h.recession {
        return Err(Error::InvalidArgument(
            "ord needs a hull with recession ray".into(),
        ));
    }
    h.extreme_points
        .iter()
        .map(|(n, r)| n + r * x)
        .min()
        .ok_or(Error::ZeroSeries)
}

/// Valuation of a univariate polar series: the minimal exponent, as a
/// rational.  Errors if the series is zero or genuinely bivariate.
pub fn series_valuation_1d(f: &FJSeries) -> Result<Rat> {
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    for (&q, row) in f.rows() {
        for (&z2, _) in row.iter() {
            if z2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "series is not univariate: zeta^({z2}/2) at scaled q^{q}"
                )));
            }
        }
    }
    Ok(BigRational::new(
        f.min_q().unwrap().into(),
        f.qden().into(),
    ))
}

/// Convenience for tests: hull equality means equal extreme point sets and
/// matching recession flags.
pub fn hulls_equal(a: &SupportHull, b: &SupportHull) -> bool {
    a == b
}

/// Scale a hull by an integer factor (the Minkowski k-fold sum of a convex
/// set with itself).
pub fn hull_dilate(h: &SupportHull, qfactor: i64, rfactor: i64) -> SupportHull {
    let mut extreme_points: Vec<(Rat, Rat)> = h
        .extreme_points
        .iter()
        .map(|(n, r)| (n * rat_int(qfactor), r * rat_int(rfactor)))
        .collect();
    extreme_points.sort_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)));
    SupportHull {
        extreme_points,
        recession: h.recession,
    }
}

/// True if every extreme point of the hull is a support point of `f`.
pub fn extreme_points_in_support(h: &SupportHull, f: &FJSeries) -> bool {
    let supp: std::collections::BTreeSet<(i64, i64)> = f.support().into_iter().collect();
    h.extreme_points.iter().all(|(n, r)| {
        let q = n * rat_int(f.qden());
        let z2 = r * rat_int(2);
        q.is_integer()
            && z2.is_integer()
            && supp.contains(&(
                i64::try_from(&q.to_integer()).unwrap(),
                i64::try_from(&z2.to_integer()).unwrap(),
            ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use crate::blocks::{build_theta_block, ord_profile, ThetaBlockSpec};

    fn mono(q: i64, r: i64) -> FJSeries {
        FJSeries::monomial(q, 2 * r, rat_int(1), 1, 16)
    }

    #[test]
    fn single_monomial_hull() {
        let h = hull_of_support(&mono(3, -2), true).unwrap();
        assert_eq!(h.extreme_points, vec![(rat_int(3), rat_int(-2))]);
        assert!(h.recession);
    }

    #[test]
    fn segment_hull() {
        // zeta - zeta^-1 at q^0: extremes (0, -1), (0, 1)
        let f = mono(0, 1).add(&mono(0, -1).neg()).unwrap();
        let h = hull_of_support(&f, true).unwrap();
        assert_eq!(
            h.extreme_points,
            vec![(rat_int(0), rat_int(-1)), (rat_int(0), rat_int(1))]
        );
    }

    #[test]
    fn zero_series_rejected() {
        let f = FJSeries::zero(1, 4);
        assert!(matches!(hull_of_support(&f, true), Err(Error::ZeroSeries)));
    }

    #[test]
    fn phi10_hull_touches_corner() {
        let spec = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let f = build_theta_block(&spec, 1, 4).unwrap().normalize();
        let h = hull_of_support(&f, true).unwrap();
        assert!(h.extreme_points.contains(&(rat_int(1), rat_int(1))));
        assert!(h.extreme_points.contains(&(rat_int(1), rat_int(-1))));
    }

    #[test]
    fn minkowski_point_and_segment() {
        // {(0,0)} + h = h ; segment + itself doubles
        let point = hull_of_support(&mono(0, 0), true).unwrap();
        let seg_f = mono(0, 1).add(&mono(0, -1)).unwrap();
        let seg = hull_of_support(&seg_f, true).unwrap();
        assert_eq!(minkowski_sum(&point, &seg).unwrap(), seg);
        let double = minkowski_sum(&seg, &seg).unwrap();
        assert_eq!(
            double.extreme_points,
            vec![(rat_int(0), rat_int(-2)), (rat_int(0), rat_int(2))]
        );
        // flag mismatch
        let flat = hull_of_support(&seg_f, false).unwrap();
        assert!(minkowski_sum(&flat, &seg).is_err());
    }

    #[test]
    fn valuation_property_on_small_polys() {
        let f = mono(0, 2)
            .add(&mono(1, -1).scale(&rat_int(3)))
            .unwrap()
            .add(&mono(2, 0).neg())
            .unwrap();
        let g = mono(0, -1).add(&mono(3, 2).scale(&rat(7, 2))).unwrap();
        let fg = f.mul(&g).unwrap();
        for recession in [false, true] {
            let hf = hull_of_support(&f, recession).unwrap();
            let hg = hull_of_support(&g, recession).unwrap();
            let hfg = hull_of_support(&fg, recession).unwrap();
            assert_eq!(minkowski_sum(&hf, &hg).unwrap(), hfg);
        }
    }

    #[test]
    fn dilation_doubles_hull() {
        let f = mono(0, 1)
            .add(&mono(1, -2))
            .unwrap()
            .add(&mono(2, 2).scale(&rat_int(5)))
            .unwrap();
        let d = f.dilate(2, 2).unwrap();
        let h = hull_of_support(&f, true).unwrap();
        let hd = hull_of_support(&d, true).unwrap();
        assert_eq!(hull_dilate(&h, 2, 2), hd);
    }

    #[test]
    fn ord_via_hull_values() {
        // single point (v, 0) gives v
        let h = hull_of_support(&mono(5, 0), true).unwrap();
        assert_eq!(ord_via_hull(&h, &rat(1, 3)).unwrap(), rat_int(5));
        // phi10 at x = 1/2 plus t x^2 = 1/4 gives 3/4, matching the
        // piecewise-quadratic route
        let spec = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let f = build_theta_block(&spec, 1, 6).unwrap().normalize();
        let h = hull_of_support(&f, true).unwrap();
        let x = rat(1, 2);
        let total = ord_via_hull(&h, &x).unwrap() + rat_int(1) * &x * &x;
        assert_eq!(total, rat(3, 4));
        assert_eq!(ord_profile(&spec).minimum, rat(3, 4));
    }

    #[test]
    fn quotient_hull_stable_under_doubling_substitution() {
        // hull of phi(2 tau, 2 z) / phi(tau, z) equals hull of phi within
        // the window (checked for extreme points with n <= 4 at window 9)
        let spec = ThetaBlockSpec::new(18, vec![1, 1]).unwrap();
        let phi = build_theta_block(&spec, 1, 9).unwrap().normalize();
        let doubled = phi.dilate(2, 2).unwrap();
        let quot = doubled.exact_div(&phi, None).unwrap();
        let bound = rat_int(4);
        let hq = hull_of_support(&quot.truncated(9), true).unwrap();
        let hp = hull_of_support(&phi, true).unwrap();
        let low = |h: &SupportHull| -> Vec<(Rat, Rat)> {
            h.extreme_points
                .iter()
                .filter(|(n, _)| n <= &bound)
                .cloned()
                .collect()
        };
        assert_eq!(low(&hq), low(&hp));
    }

    #[test]
    fn extreme_points_are_support_points() {
        let spec = ThetaBlockSpec::new(12, vec![1, 1, 1, 1]).unwrap();
        let f = build_theta_block(&spec, 1, 7).unwrap().normalize();
        let h = hull_of_support(&f, true).unwrap();
        assert!(extreme_points_in_support(&h, &f));
    }

    #[test]
    fn univariate_valuation() {
        let spec = ThetaBlockSpec::new(24, vec![]).unwrap();
        let delta = build_theta_block(&spec, 1, 6).unwrap().normalize();
        assert_eq!(series_valuation_1d(&delta).unwrap(), rat_int(1));
        let f = mono(-3, 0).add(&mono(1, 0)).unwrap();
        assert_eq!(series_valuation_1d(&f).unwrap(), rat_int(-3));
        assert!(series_valuation_1d(&mono(0, 1)).is_err());
        // multiplicativity on random-ish pairs
        let g = mono(2, 0).add(&mono(5, 0).scale(&rat_int(-4))).unwrap();
        let fg = f.mul(&g).unwrap();
        assert_eq!(
            series_valuation_1d(&fg).unwrap(),
            series_valuation_1d(&f).unwrap() + series_valuation_1d(&g).unwrap()
        );
    }

    #[test]
    fn truncation_stability_of_extremes() {
        // hull at window Q and 2Q agree on extreme points with n < Q; the
        // boundary row n = Q itself can carry artificial corner vertices
        let spec = ThetaBlockSpec::new(15, vec![1, 1, 2]).unwrap();
        let q = 5i64;
        let f1 = build_theta_block(&spec, 1, q).unwrap().normalize();
        let f2 = build_theta_block(&spec, 1, 2 * q).unwrap().normalize();
        let h1 = hull_of_support(&f1, true).unwrap();
        let h2 = hull_of_support(&f2, true).unwrap();
        let cut = rat_int(q - 1);
        let low = |h: &SupportHull| -> Vec<(Rat, Rat)> {
            h.extreme_points
                .iter()
                .filter(|(n, _)| n <= &cut)
                .cloned()
                .collect()
        };
        assert_eq!(low(&h1), low(&h2));
    }
}
