//! Exact integer and rational formulas for lattice layers, corner volumes of
//! the unit cube, and the stability constant of the layer inequality.
//!
//! Everything here returns big integers or big rationals; conversion to
//! floating point happens only when presenting results.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A point of the lattice layer `{x in N^d : x_1 + ... + x_d = t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LayerIndex(pub Vec<u32>);

impl LayerIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn level(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `k (k-1) ... (k-d+1)`; zero once `d > k`.
pub fn falling_factorial(k: u64, d: u64) -> BigUint {
    if d > k {
        return BigUint::zero();
    }
    (0..d).fold(BigUint::one(), |acc, i| acc * (k - i))
}

/// Number of points in layer `t` of `N^d`: `binom(t+d-1, d-1)`.
pub fn layer_count(d: usize, t: u64) -> Result<BigUint> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(binomial(t + d as u64 - 1, d as u64 - 1))
}

/// All points of layer `t`, in lexicographic order.
pub fn enumerate_layer(d: usize, t: u64) -> Result<Vec<LayerIndex>> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let t = u32::try_from(t).map_err(|_| Error::OutOfDomain(format!("layer {t} too large")))?;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(d);
    fill_layer(d, t, &mut prefix, &mut out);
    Ok(out)
}

fn fill_layer(remaining: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<LayerIndex>) {
    if remaining == 1 {
        prefix.push(budget);
        out.push(LayerIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=budget {
        prefix.push(first);
        fill_layer(remaining - 1, budget - first, prefix, out);
        prefix.pop();
    }
}

/// Volume of `{x in [0,1]^d : x_1 + ... + x_d <= t}`, computed by
/// inclusion-exclusion over the cube's faces (the Irwin-Hall CDF).
pub fn corner_volume(d: usize, t: &Rational) -> Result<Rational> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let upper = Rational::from_integer(BigInt::from(d));
    if t.is_negative() || *t > upper {
        return Err(Error::OutOfDomain(format!(
            "corner volume argument {} outside [0, {d}]",
            rational::format(t)
        )));
    }
    let top = rational::floor_int(t)
        .to_u64()
        .expect("floor of t in [0, d] fits u64");
    let mut sum = Rational::zero();
    for j in 0..=top {
        let base = t - Rational::from_integer(BigInt::from(j));
        let term = Rational::from_integer(BigInt::from(binomial(d as u64, j)))
            * rational::pow(&base, d as u32);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum / Rational::from_integer(BigInt::from(factorial(d as u64))))
}

/// Smallest `k` for which the layer inequality applies: `max(2, (d-1)(d-2))`.
pub fn threshold_k(d: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let d = d as u64;
    Ok(2.max((d - 1) * (d - 2)))
}

/// `C(d,k) = k^d / (1 - k^d / ((k-d+2)(k+1)^(d-1)))`.
pub fn stability_constant(d: usize, k: u64) -> Result<Rational> {
    let threshold = threshold_k(d)?;
    if k < threshold {
        return Err(Error::BelowStabilityThreshold { d, k, threshold });
    }
    let (denom_lhs, kd) = stability_terms(d, k);
    // k >= d - 1 here, so (k - d + 2) >= 1.
    let ratio = Rational::new(kd.clone(), denom_lhs);
    let slack = Rational::one() - ratio;
    debug_assert!(slack.is_positive());
    Ok(Rational::from_integer(kd) / slack)
}

/// Returns `((k-d+2)(k+1)^(d-1), k^d)` as integers. Callers compare the two
/// to check that the stability constant is well defined.
pub fn stability_terms(d: usize, k: u64) -> (BigInt, BigInt) {
    let kk = BigInt::from(k);
    let lead = BigInt::from(k as i64 - d as i64 + 2);
    let lhs = lead * num_traits::pow(BigInt::from(k + 1), d - 1);
    (lhs, num_traits::pow(kk, d))
}

/// Exact `vol(B[k] / k)` for the axis spider `B = U [o, e_i]` in `R^d`:
/// `binom(k, d) / k^d`.
pub fn simplex_spider_volume(d: usize, k: u64) -> Result<Rational> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if k == 0 {
        return Err(Error::OutOfDomain("k must be at least 1".into()));
    }
    let num = BigInt::from(binomial(k, d as u64));
    let den = num_traits::pow(BigInt::from(k), d);
    Ok(Rational::new(num, den))
}

/// `1/d!`, the volume of the standard simplex `conv(o, e_1, ..., e_d)`.
pub fn simplex_volume(d: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(factorial(d as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn brute_layer(d: usize, t: u32) -> Vec<Vec<u32>> {
        // Every tuple in [0, t]^d, filtered by sum; independent of the
        // recursive enumerator.
        let mut out = Vec::new();
        let total = (t as usize + 1).pow(d as u32);
        for code in 0..total {
            let mut c = code;
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                v.push((c % (t as usize + 1)) as u32);
                c /= t as usize + 1;
            }
            v.reverse();
            if v.iter().sum::<u32>() == t {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn layer_count_examples() {
        assert_eq!(layer_count(2, 5).unwrap(), BigUint::from(6u32));
        assert_eq!(layer_count(3, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(brute_layer(4, 3).len(), 20);
        assert_eq!(layer_count(4, 3).unwrap(), BigUint::from(20u32));
        assert_eq!(layer_count(0, 3), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn enumerate_layer_examples() {
        let two = enumerate_layer(2, 2).unwrap();
        let coords: Vec<_> = two.iter().map(|x| x.0.clone()).collect();
        assert_eq!(coords, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        let basis = enumerate_layer(3, 1).unwrap();
        assert_eq!(basis.len(), 3);
        assert!(basis.iter().all(|x| x.level() == 1 && x.0.iter().filter(|&&c| c == 1).count() == 1));
        for t in 0..=8u32 {
            let fast: Vec<_> = enumerate_layer(4, t as u64).unwrap().into_iter().map(|x| x.0).collect();
            assert_eq!(fast, brute_layer(4, t));
            assert_eq!(BigUint::from(fast.len()), layer_count(4, t as u64).unwrap());
        }
    }

    #[test]
    fn corner_volume_examples() {
        assert_eq!(corner_volume(3, &int(1)).unwrap(), rat(1, 6));
        assert_eq!(corner_volume(3, &int(3)).unwrap(), int(1));
        assert_eq!(corner_volume(2, &rat(3, 2)).unwrap(), rat(7, 8));
        assert!(corner_volume(2, &rat(5, 2)).is_err());
        assert!(corner_volume(2, &rat(-1, 2)).is_err());
    }

    #[test]
    fn corner_volume_monte_carlo() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000u32;
        let hits = (0..n)
            .filter(|_| rng.gen::<f64>() + rng.gen::<f64>() <= 1.5)
            .count() as f64;
        let p = hits / f64::from(n);
        let exact = rational::to_f64(&corner_volume(2, &rat(3, 2)).unwrap());
        let sigma = (exact * (1.0 - exact) / f64::from(n)).sqrt();
        assert!((p - exact).abs() <= 3.0 * sigma, "mc {p} vs {exact}");
    }

    #[test]
    fn corner_volume_is_monotone() {
        for d in 1..=5usize {
            let mut prev = Rational::zero();
            for step in 0..=(8 * d as i64) {
                let v = corner_volume(d, &rat(step, 8)).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn stability_examples() {
        assert_eq!(stability_constant(2, 2).unwrap(), int(12));
        assert_eq!(stability_constant(3, 2).unwrap(), int(72));
        assert!(matches!(
            stability_constant(3, 1),
            Err(Error::BelowStabilityThreshold { .. })
        ));
        assert!(matches!(
            stability_constant(5, 11),
            Err(Error::BelowStabilityThreshold { threshold: 12, .. })
        ));
        assert!(stability_constant(5, 12).unwrap().is_positive());
    }

    #[test]
    fn thresholds() {
        assert_eq!(threshold_k(2).unwrap(), 2);
        assert_eq!(threshold_k(3).unwrap(), 2);
        assert_eq!(threshold_k(5).unwrap(), 12);
        assert!(threshold_k(1).is_err());
    }

    #[test]
    fn simplex_spider_examples() {
        assert_eq!(simplex_spider_volume(2, 2).unwrap(), rat(1, 4));
        assert_eq!(simplex_spider_volume(2, 3).unwrap(), rat(1, 3));
        assert_eq!(simplex_spider_volume(3, 2).unwrap(), int(0));
    }

    #[test]
    fn simplex_spider_increases_to_simplex_volume() {
        assert_eq!(simplex_spider_volume(1, 9).unwrap(), int(1));
        for d in 2..=4usize {
            let mut prev = simplex_spider_volume(d, d as u64).unwrap();
            for k in (d as u64 + 1)..40 {
                let v = simplex_spider_volume(d, k).unwrap();
                assert!(v > prev, "d={d} k={k}");
                assert!(v < simplex_volume(d));
                prev = v;
            }
            let far = rational::to_f64(&simplex_spider_volume(d, 4000).unwrap());
            let limit = rational::to_f64(&simplex_volume(d));
            assert!((far - limit).abs() < 5e-3);
        }
    }
}
