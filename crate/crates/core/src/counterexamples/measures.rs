//! Measures other than volume for which `mu(B[k] / k)` fails to be
//! monotone, with `B` the axis spider.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::boxes::{union_volume, AxisBox};
use crate::combinatorics::{binomial, enumerate_layer};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `mu` at two consecutive indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurePair {
    pub m_low: u64,
    pub m_high: u64,
    #[serde(with = "crate::rational::as_str")]
    pub low: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub high: Rational,
    /// `low` equals the full orthant part `vol(C) / 2^d`.
    pub low_is_orthant: bool,
    pub strict_drop: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeMeasureReport {
    pub d: usize,
    pub k: u64,
    /// `vol(C)` for `C = [-1/d, 1/d]^d`.
    #[serde(with = "crate::rational::as_str")]
    pub cube_volume: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub orthant_volume: Rational,
    /// Indices `2k` and `2k + 1`.
    pub parity: MeasurePair,
    /// Indices `dk` and `dk + 1`.
    pub period: MeasurePair,
}

impl CubeMeasureReport {
    /// The even index attains `vol(C) / 2^d` and the odd one is smaller.
    pub fn parity_holds(&self) -> bool {
        self.parity.low_is_orthant && self.parity.strict_drop
    }
}

const MAX_PIECES: u128 = 200_000;

/// `vol(B[m] / m  ∩  [-1/d, 1/d]^d)`. The set lies in the positive orthant
/// and is the union of the boxes `prod [0, t_i / m]` over compositions with
/// every `t_i >= 1` (the others are flat); each is clipped to `[0, 1/d]^d`.
pub fn cube_measure(d: usize, m: u64) -> Result<Rational> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if m < d as u64 {
        return Ok(Rational::zero());
    }
    let pieces = binomial(m - 1, d as u64 - 1);
    if pieces.to_u128().is_none_or(|p| p > MAX_PIECES) {
        return Err(Error::OutOfDomain(format!("{pieces} staircase pieces exceed the exact-evaluation limit")));
    }
    let side = rational::rat(1, d as i64);
    let mm = Rational::from_integer(m.into());
    // Compositions of m with positive parts are (1,..,1) + compositions of m - d.
    let mut boxes: Vec<AxisBox> = enumerate_layer(d, m - d as u64)?
        .into_iter()
        .map(|x| {
            let hi = x
                .coords()
                .iter()
                .map(|&t| (Rational::from_integer((u64::from(t) + 1).into()) / &mm).min(side.clone()))
                .collect();
            AxisBox::new(vec![Rational::zero(); d], hi).expect("valid box")
        })
        .collect();
    boxes.sort_by(|a, b| a.hi.cmp(&b.hi));
    boxes.dedup();
    // Drop boxes inside another origin-anchored box.
    let kept: Vec<AxisBox> = boxes
        .iter()
        .filter(|b| !boxes.iter().any(|o| o != *b && o.hi.iter().zip(&b.hi).all(|(x, y)| x >= y)))
        .cloned()
        .collect();
    union_volume(&kept)
}

fn pair(d: usize, m_low: u64, orthant: &Rational) -> Result<MeasurePair> {
    let low = cube_measure(d, m_low)?;
    let high = cube_measure(d, m_low + 1)?;
    Ok(MeasurePair {
        m_low,
        m_high: m_low + 1,
        low_is_orthant: &low == orthant,
        strict_drop: low > high,
        low,
        high,
    })
}

pub fn cube_measure_check(d: usize, k: u64) -> Result<CubeMeasureReport> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if k == 0 {
        return Err(Error::OutOfDomain("k must be at least 1".into()));
    }
    let cube_volume = rational::pow(&rational::rat(2, d as i64), d as u32);
    let orthant_volume = rational::pow(&rational::rat(1, d as i64), d as u32);
    Ok(CubeMeasureReport {
        d,
        k,
        parity: pair(d, 2 * k, &orthant_volume)?,
        period: pair(d, d as u64 * k, &orthant_volume)?,
        cube_volume,
        orthant_volume,
    })
}

/// Bounds on `vol(B[m] / m ∩ E) / vol(E)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioBound {
    pub m: u64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseReport {
    pub k: u64,
    pub resolution: usize,
    /// Squared semi-axes of `x^2/p^2 + y^2/q^2 <= 1`.
    #[serde(with = "crate::rational::as_str")]
    pub p_squared: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub q_squared: Rational,
    pub ratio: RatioBound,
    pub ratio_next: RatioBound,
    /// `1/4` lies in the bracket for index `k`.
    pub quarter_within_tolerance: bool,
    /// The bracket for `k + 1` lies strictly below `1/4`.
    pub drop_certified: bool,
    /// Exact check that the quarter ellipse lies in `B[k] / k`, i.e. the
    /// ratio at `k` is exactly `1/4`.
    pub quarter_contained_exact: bool,
    /// Exact check that `(1 - 2/(k+1), 1/(k+1))` is interior to `E`.
    pub point_interior: bool,
}

/// Squared semi-axes of the axis-aligned ellipse centred at the origin
/// through `(1 - 1/k, 0)` and `(1 - 2/k, 1/k)`.
pub fn ellipse_axes(k: u64) -> Result<(Rational, Rational)> {
    if k < 2 {
        return Err(Error::DegenerateEllipse(format!("k = {k}: the two points do not determine an ellipse")));
    }
    let kk = Rational::from_integer(k.into());
    let one = rational::int(1);
    let p2 = rational::pow(&(&one - &one / &kk), 2);
    let x2 = rational::pow(&(&one - rational::int(2) / &kk), 2);
    let slack = &one - x2 / &p2;
    if slack <= Rational::zero() {
        return Err(Error::DegenerateEllipse(format!("k = {k}")));
    }
    let q2 = rational::pow(&(&one / &kk), 2) / slack;
    Ok((p2, q2))
}

fn inside_ellipse(x: &Rational, y: &Rational, p2: &Rational, q2: &Rational) -> Rational {
    x * x / p2 + y * y / q2
}

/// `ceil(m s i / n)` for `i = 0..=n`, where `s = sqrt(s2)`, exactly.
fn scaled_ceilings(m: u64, s2: &Rational, n: usize) -> Vec<i64> {
    let s = rational::to_f64(s2).sqrt();
    (0..=n)
        .map(|i| {
            // Smallest c >= 0 with m^2 s2 i^2 <= c^2 n^2.
            let target = Rational::from_integer(((m as i128 * i as i128).pow(2)).into()) * s2;
            let n2 = Rational::from_integer(((n as i128).pow(2)).into());
            let fits = |c: i64| Rational::from_integer((c as i128 * c as i128).into()) * &n2 >= target;
            let mut c = ((m as f64) * s * i as f64 / n as f64).ceil() as i64;
            c = c.max(0);
            while c > 0 && fits(c - 1) {
                c -= 1;
            }
            while !fits(c) {
                c += 1;
            }
            c
        })
        .collect()
}

fn ratio_bounds(m: u64, p2: &Rational, q2: &Rational, n: usize) -> RatioBound {
    // Coordinates x = p i / n, y = q j / n; E becomes the unit disc.
    let cx = scaled_ceilings(m, p2, n);
    let cy = scaled_ceilings(m, q2, n);
    let m = m as i64;
    let n2 = (n as i64) * (n as i64);
    let (mut lower, mut upper) = (0u64, 0u64);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (i as i64, j as i64);
            if a * a + b * b <= n2 && cx[i] + cy[j] <= m {
                upper += 1;
                if (a + 1) * (a + 1) + (b + 1) * (b + 1) <= n2 && cx[i + 1] + cy[j + 1] <= m {
                    lower += 1;
                }
            }
        }
    }
    let area = std::f64::consts::PI * (n as f64) * (n as f64);
    RatioBound { m: m as u64, lower: lower as f64 / area, upper: upper as f64 / area }
}

pub fn ellipse_measure_check(k: u64, resolution: usize) -> Result<EllipseReport> {
    let (p2, q2) = ellipse_axes(k)?;
    if resolution == 0 {
        return Err(Error::OutOfDomain("resolution must be positive".into()));
    }
    let ratio = ratio_bounds(k, &p2, &q2, resolution);
    let ratio_next = ratio_bounds(k + 1, &p2, &q2, resolution);
    let kk = Rational::from_integer(k.into());
    let one = rational::int(1);
    // Column ((i-1)/k, i/k] of B[k]/k has height (k-i)/k; the ellipse is
    // highest at its left end.
    let quarter_contained_exact = (1..=k).all(|i| {
        let x = Rational::from_integer((i - 1).into()) / &kk;
        let y = Rational::from_integer((k - i).into()) / &kk;
        &x * &x >= p2 || inside_ellipse(&x, &y, &p2, &q2) >= one
    });
    let k1 = Rational::from_integer((k + 1).into());
    let px = &one - rational::int(2) / &k1;
    let py = &one / &k1;
    let point_interior = inside_ellipse(&px, &py, &p2, &q2) < one;
    Ok(EllipseReport {
        k,
        resolution,
        quarter_within_tolerance: ratio.lower <= 0.25 && 0.25 <= ratio.upper,
        drop_certified: ratio_next.upper < 0.25,
        ratio,
        ratio_next,
        quarter_contained_exact,
        point_interior,
        p_squared: p2,
        q_squared: q2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn planar_cube_measure() {
        let r = cube_measure_check(2, 1).unwrap();
        assert_eq!(r.cube_volume, int(1));
        assert_eq!(r.parity.low, rat(1, 4));
        assert_eq!(r.parity.high, rat(2, 9));
        assert!(r.parity_holds());
        let r2 = cube_measure_check(2, 2).unwrap();
        assert_eq!(r2.parity.low, rat(1, 4));
        assert!(r2.parity_holds());
    }

    #[test]
    fn spatial_cube_measure_needs_multiple_of_d() {
        let r = cube_measure_check(3, 1).unwrap();
        assert_eq!(r.orthant_volume, rat(1, 27));
        // B[2] has empty interior in three dimensions.
        assert_eq!(r.parity.low, int(0));
        assert_eq!(r.parity.high, rat(1, 27));
        assert!(!r.parity_holds());
        assert!(r.period.low_is_orthant && r.period.strict_drop);
        let r3 = cube_measure_check(3, 3).unwrap();
        assert!(r3.parity_holds());
    }

    #[test]
    fn staircase_oracle() {
        // Grid count of points q in (0, 1/d]^d with sum ceil(m q_i) <= m.
        for (d, m) in [(2usize, 5u64), (3, 4), (3, 7)] {
            let n = 60i64;
            let side = n * d as i64;
            let mut count = 0u64;
            let mut idx = vec![0i64; d];
            loop {
                let ok = idx.iter().map(|&i| (m as i64 * (i + 1) + side - 1) / side).sum::<i64>() <= m as i64;
                count += u64::from(ok);
                let mut j = 0;
                while j < d {
                    idx[j] += 1;
                    if idx[j] < n {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == d {
                    break;
                }
            }
            // Top-right corners on the 1/(n d) lattice: a lower bound that is
            // exact when the lattice refines every 1/m step.
            let est = rat(count as i64, n.pow(d as u32)) * rational::pow(&rat(1, d as i64), d as u32);
            let exact = cube_measure(d, m).unwrap();
            assert!(est <= exact, "d={d} m={m}");
            assert!(rational::to_f64(&(exact - est)) < 0.1 * rational::to_f64(&rational::pow(&rat(1, d as i64), d as u32)));
        }
    }

    #[test]
    fn ellipse_axes_for_small_k() {
        assert_eq!(ellipse_axes(2).unwrap(), (rat(1, 4), rat(1, 4)));
        let (p2, q2) = ellipse_axes(3).unwrap();
        assert_eq!((p2, q2), (rat(4, 9), rat(4, 27)));
        assert!(ellipse_axes(1).is_err());
    }

    #[test]
    fn circle_case() {
        let r = ellipse_measure_check(2, 4096).unwrap();
        assert!(r.quarter_within_tolerance);
        assert!(r.quarter_contained_exact);
        assert!(r.point_interior);
        assert!(r.drop_certified);
        assert!(r.ratio_next.upper < 0.2495 && r.ratio_next.lower > 0.247);
    }

    #[test]
    fn larger_k() {
        for k in 3..=6 {
            let r = ellipse_measure_check(k, 512).unwrap();
            assert!(r.quarter_contained_exact, "k={k}");
            assert!(r.point_interior, "k={k}");
            assert!(r.quarter_within_tolerance, "k={k}");
        }
    }
}
