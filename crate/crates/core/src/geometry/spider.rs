use serde::{Deserialize, Serialize};

use super::{affine_dim, bounding_box, sub, Point};
use crate::combinatorics::enumerate_layer;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A finite union of segments `[apex, tip_i]` sharing one endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spider {
    #[serde(with = "crate::rational::vec_str")]
    apex: Point,
    #[serde(with = "crate::rational::vecs_str")]
    tips: Vec<Point>,
}

impl Spider {
    pub fn new(apex: Point, tips: Vec<Point>) -> Result<Self> {
        let d = apex.len();
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if tips.is_empty() {
            return Err(Error::EmptySet);
        }
        for (i, tip) in tips.iter().enumerate() {
            if tip.len() != d {
                return Err(Error::InvalidSpec {
                    path: format!("tips[{i}]"),
                    reason: format!("dimension {}, expected {d}", tip.len()),
                });
            }
            if *tip == apex {
                return Err(Error::InvalidSpec {
                    path: format!("tips[{i}]"),
                    reason: "tip coincides with apex".into(),
                });
            }
        }
        Ok(Self { apex, tips })
    }

    /// `U [o, e_i]` in `R^d`.
    pub fn axis(d: usize) -> Self {
        let apex = vec![rational::int(0); d];
        let tips = (0..d)
            .map(|i| (0..d).map(|j| rational::int(i64::from(i == j))).collect())
            .collect();
        Self { apex, tips }
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    pub fn apex(&self) -> &Point {
        &self.apex
    }

    pub fn tips(&self) -> &[Point] {
        &self.tips
    }

    pub fn arms(&self) -> Vec<Point> {
        self.tips.iter().map(|t| sub(t, &self.apex)).collect()
    }

    /// Apex followed by the tips; the spider's convex hull is theirs.
    pub fn vertices(&self) -> Vec<Point> {
        std::iter::once(self.apex.clone()).chain(self.tips.iter().cloned()).collect()
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        bounding_box(&self.vertices())
    }

    pub fn affine_dim(&self) -> usize {
        affine_dim(&self.vertices())
    }

    pub fn diameter(&self) -> f64 {
        let v: Vec<Vec<f64>> = self.vertices().iter().map(|p| super::to_f64(p)).collect();
        let mut best = 0.0f64;
        for a in &v {
            for b in &v {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                best = best.max(d2.sqrt());
            }
        }
        best
    }

    pub fn total_length(&self) -> f64 {
        self.arms()
            .iter()
            .map(|a| a.iter().map(|c| rational::to_f64(c).powi(2)).sum::<f64>().sqrt())
            .sum()
    }

    /// Image under `x -> matrix * x + translation`.
    pub fn transformed(&self, matrix: &[Point], translation: &[Rational]) -> Result<Self> {
        let map = |p: &Point| -> Point {
            matrix
                .iter()
                .zip(translation)
                .map(|(row, t)| super::dot(row, p) + t)
                .collect()
        };
        Self::new(map(&self.apex), self.tips.iter().map(map).collect())
    }
}

/// Multiplicities `t_1..t_m` with `t_1 + ... + t_m = k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition(pub Vec<u32>);

impl Composition {
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&t| u64::from(t)).sum()
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }
}

/// All compositions of `k` into `m` non-negative parts, lexicographic.
pub fn compositions(k: u64, m: usize) -> Result<Vec<Composition>> {
    Ok(enumerate_layer(m, k)?
        .into_iter()
        .map(|x| Composition(x.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_examples() {
        let c: Vec<_> = compositions(2, 2).unwrap().into_iter().map(|c| c.0).collect();
        assert_eq!(c, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(3, 3).unwrap().len(), 10);
        let zero = compositions(0, 4).unwrap();
        assert_eq!(zero, vec![Composition(vec![0, 0, 0, 0])]);
    }

    #[test]
    fn spider_rejects_bad_tips() {
        let apex = vec![rational::int(0); 2];
        let err = Spider::new(apex.clone(), vec![vec![rational::int(1); 2], vec![rational::int(1); 3]]).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { ref path, .. } if path == "tips[1]"));
        assert!(Spider::new(apex.clone(), vec![apex.clone()]).is_err());
    }
}
