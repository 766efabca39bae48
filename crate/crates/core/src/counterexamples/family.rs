//! Lower-dimensional block sets `A1, A2, A3` whose pairwise sums violate
//! the three-set inequality
//! `vol(A1+A2+A3)^(1/d) >= (vol(A1+A2)^(1/d) + vol(A1+A3)^(1/d) + vol(A2+A3)^(1/d)) / 2`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::boxes::{box_union_volume, sum_unions, AxisBox};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `A1 = [0,1]^d1 x {0}^d2`, `A2 = {0}^d1 x [0,1]^d2`,
/// `A3 = ([0,a]^d1 x {0}^d2) U ({0}^d1 x [0,b]^d2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFamily {
    #[serde(with = "crate::rational::as_str")]
    pub a: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub b: Rational,
    pub d1: usize,
    pub d2: usize,
}

impl BlockFamily {
    pub fn new(a: Rational, b: Rational, d1: usize, d2: usize) -> Result<Self> {
        if a.is_negative() || b.is_negative() {
            return Err(Error::OutOfDomain("a and b must be non-negative".into()));
        }
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidDimension(d1.min(d2)));
        }
        Ok(Self { a, b, d1, d2 })
    }

    pub fn dim(&self) -> usize {
        self.d1 + self.d2
    }

    fn block(&self, first: &Rational, second: &Rational) -> AxisBox {
        let lo = vec![Rational::zero(); self.dim()];
        let hi = (0..self.dim()).map(|j| if j < self.d1 { first.clone() } else { second.clone() }).collect();
        AxisBox::new(lo, hi).expect("non-negative extents")
    }

    pub fn a1(&self) -> Vec<AxisBox> {
        vec![self.block(&rational::int(1), &Rational::zero())]
    }

    pub fn a2(&self) -> Vec<AxisBox> {
        vec![self.block(&Rational::zero(), &rational::int(1))]
    }

    pub fn a3(&self) -> Vec<AxisBox> {
        vec![self.block(&self.a, &Rational::zero()), self.block(&Rational::zero(), &self.b)]
    }

    /// Closed forms `(1, b^d2, a^d1, (a+1)^d1 + (b+1)^d2 - 1)`.
    pub fn closed_forms(&self) -> SumVolumes {
        let one = rational::int(1);
        SumVolumes {
            v12: one.clone(),
            v13: rational::pow(&self.b, self.d2 as u32),
            v23: rational::pow(&self.a, self.d1 as u32),
            v123: rational::pow(&(&self.a + &one), self.d1 as u32) + rational::pow(&(&self.b + &one), self.d2 as u32) - one,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumVolumes {
    #[serde(with = "crate::rational::as_str")]
    pub v12: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub v13: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub v23: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub v123: Rational,
}

/// Volumes of `A1+A2`, `A1+A3`, `A2+A3`, `A1+A2+A3`, each expanded into a
/// box union and measured exactly.
pub fn pairwise_sum_volumes(f: &BlockFamily) -> Result<SumVolumes> {
    let (a1, a2, a3) = (f.a1(), f.a2(), f.a3());
    Ok(SumVolumes {
        v12: box_union_volume(&sum_unions(&a1, &a2))?,
        v13: box_union_volume(&sum_unions(&a1, &a3))?,
        v23: box_union_volume(&sum_unions(&a2, &a3))?,
        v123: box_union_volume(&sum_unions(&sum_unions(&a1, &a2), &a3))?,
    })
}

/// An enclosure `[lo, hi]` of `v^(1/d)`, checked exactly: `lo^d <= v <= hi^d`.
pub fn root_interval(v: &Rational, d: usize) -> (f64, f64) {
    if v.is_zero() {
        return (0.0, 0.0);
    }
    let approx = rational::to_f64(v).powf(1.0 / d as f64);
    let mut rel = 1e-12;
    loop {
        let lo = approx * (1.0 - rel);
        let hi = approx * (1.0 + rel);
        let ok_lo = rational::from_f64(lo).is_some_and(|q| rational::pow(&q, d as u32) <= *v);
        let ok_hi = rational::from_f64(hi).is_some_and(|q| rational::pow(&q, d as u32) >= *v);
        if ok_lo && ok_hi {
            return (lo, hi);
        }
        rel *= 4.0;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub family: BlockFamily,
    pub volumes: SumVolumes,
    /// `v123^(1/d) - (v12^(1/d) + v13^(1/d) + v23^(1/d)) / 2`.
    pub gap: f64,
    pub gap_lower: f64,
    pub gap_upper: f64,
    /// The interval lies strictly below zero.
    pub certified_negative: bool,
}

pub fn conjecture2_gap(f: &BlockFamily) -> Result<GapReport> {
    let volumes = pairwise_sum_volumes(f)?;
    let d = f.dim();
    let r123 = root_interval(&volumes.v123, d);
    let pairs = [&volumes.v12, &volumes.v13, &volumes.v23].map(|v| root_interval(v, d));
    let half_lo: f64 = pairs.iter().map(|p| p.0).sum::<f64>() / 2.0;
    let half_hi: f64 = pairs.iter().map(|p| p.1).sum::<f64>() / 2.0;
    // One more relative ulp-scale margin for the float additions.
    let slack = 1e-14 * (r123.1 + half_hi).max(1.0);
    let gap_lower = r123.0 - half_hi - slack;
    let gap_upper = r123.1 - half_lo + slack;
    let mid = |p: (f64, f64)| (p.0 + p.1) / 2.0;
    let gap = mid(r123) - pairs.iter().map(|&p| mid(p)).sum::<f64>() / 2.0;
    Ok(GapReport {
        family: f.clone(),
        volumes,
        gap,
        gap_lower,
        gap_upper,
        certified_negative: gap_upper < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn published_parameters() {
        let f = BlockFamily::new(int(3), int(6), 4, 3).unwrap();
        let v = pairwise_sum_volumes(&f).unwrap();
        assert_eq!((v.v12.clone(), v.v13.clone(), v.v23.clone(), v.v123.clone()), (int(1), int(216), int(81), int(598)));
        assert_eq!(v, f.closed_forms());
        let g = conjecture2_gap(&f).unwrap();
        assert!(g.certified_negative);
        assert!((g.gap + 0.0216).abs() < 1e-3, "{}", g.gap);
    }

    #[test]
    fn unit_parameters_are_not_violating() {
        let f = BlockFamily::new(int(1), int(1), 4, 3).unwrap();
        let v = pairwise_sum_volumes(&f).unwrap();
        assert_eq!(v.v123, int(23));
        let g = conjecture2_gap(&f).unwrap();
        assert!(g.gap_lower > 0.0);
        assert!((g.gap - 0.065).abs() < 1e-3);
    }

    #[test]
    fn degenerate_third_set() {
        let f = BlockFamily::new(int(0), int(0), 4, 3).unwrap();
        let v = pairwise_sum_volumes(&f).unwrap();
        assert_eq!((v.v13.clone(), v.v23.clone()), (int(0), int(0)));
        let g = conjecture2_gap(&f).unwrap();
        assert!((g.gap - 0.5).abs() < 1e-12);
        let small = BlockFamily::new(rat(1, 1000), int(2), 4, 3).unwrap();
        assert!(pairwise_sum_volumes(&small).unwrap().v23 < rat(1, 1_000_000));
    }

    #[test]
    fn closed_forms_match_sweep() {
        for d1 in 1..=4 {
            for d2 in 1..=(8 - d1).min(4) {
                for (a, b) in [(int(2), rat(1, 2)), (rat(3, 2), int(5)), (int(0), int(1))] {
                    let f = BlockFamily::new(a, b, d1, d2).unwrap();
                    assert_eq!(pairwise_sum_volumes(&f).unwrap(), f.closed_forms());
                }
            }
        }
    }

    #[test]
    fn root_interval_encloses() {
        for (v, d) in [(int(598), 7), (int(2), 2), (rat(1, 3), 3), (int(216), 7)] {
            let (lo, hi) = root_interval(&v, d);
            assert!(lo <= hi && hi - lo < 1e-9);
            assert!((lo.powi(d as i32) - rational::to_f64(&v)).abs() < 1e-8 * rational::to_f64(&v));
        }
    }
}
