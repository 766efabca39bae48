//! Zonotopes `{base + sum lambda_i g_i : lambda_i in [0,1]}` with exact
//! support queries.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::gilbert::SupportBody;
use super::spider::{Composition, Spider};
use super::{add, dot, scale, sub, to_f64, Point};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zonotope {
    #[serde(with = "crate::rational::vec_str")]
    base: Point,
    #[serde(with = "crate::rational::vecs_str")]
    generators: Vec<Point>,
}

impl Zonotope {
    pub fn new(base: Point, generators: Vec<Point>) -> Result<Self> {
        let d = base.len();
        if let Some(g) = generators.iter().find(|g| g.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: g.len() });
        }
        Ok(Self { base, generators })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn is_full_dimensional(&self) -> bool {
        super::rank(&self.generators) == self.dim()
    }

    /// `max <x, u>` over the zonotope and a vertex attaining it.
    pub fn support_point(&self, u: &[Rational]) -> Result<(Rational, Point)> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.len() });
        }
        if u.iter().all(Zero::is_zero) {
            return Err(Error::ZeroDirection);
        }
        let mut value = dot(&self.base, u);
        let mut witness = self.base.clone();
        for g in &self.generators {
            let s = dot(g, u);
            if s.is_positive() {
                value += s;
                witness = add(&witness, g);
            }
        }
        Ok((value, witness))
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = self.base.clone();
        let mut hi = self.base.clone();
        for g in &self.generators {
            for j in 0..g.len() {
                if g[j].is_negative() {
                    lo[j] += &g[j];
                } else {
                    hi[j] += &g[j];
                }
            }
        }
        (lo, hi)
    }

    pub fn to_f64_body(&self) -> ZonotopeF64 {
        ZonotopeF64 {
            base: to_f64(&self.base),
            generators: self.generators.iter().map(|g| to_f64(g)).collect(),
        }
    }
}

/// `sum_i t_i [apex, tip_i]`: base `k * apex`, one generator per used tip.
pub fn zonotope_from_composition(spider: &Spider, c: &Composition) -> Result<Zonotope> {
    if c.0.len() != spider.tips().len() {
        return Err(Error::LengthMismatch { expected: spider.tips().len(), found: c.0.len() });
    }
    let k = Rational::from_integer(c.total().into());
    let base = scale(spider.apex(), &k);
    let generators = spider
        .tips()
        .iter()
        .zip(&c.0)
        .filter(|(_, &t)| t > 0)
        .map(|(tip, &t)| scale(&sub(tip, spider.apex()), &Rational::from_integer(t.into())))
        .collect();
    Zonotope::new(base, generators)
}

/// Floating-point copy of a zonotope for support-oracle iterations.
#[derive(Debug, Clone)]
pub struct ZonotopeF64 {
    pub base: Vec<f64>,
    pub generators: Vec<Vec<f64>>,
}

impl ZonotopeF64 {
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.base.clone();
        let mut hi = self.base.clone();
        for g in &self.generators {
            for j in 0..g.len() {
                if g[j] < 0.0 {
                    lo[j] += g[j];
                } else {
                    hi[j] += g[j];
                }
            }
        }
        (lo, hi)
    }
}

impl SupportBody for ZonotopeF64 {
    fn dim(&self) -> usize {
        self.base.len()
    }

    fn support(&self, u: &[f64]) -> Vec<f64> {
        let mut w = self.base.clone();
        for g in &self.generators {
            let s: f64 = g.iter().zip(u).map(|(a, b)| a * b).sum();
            if s > 0.0 {
                for (wj, gj) in w.iter_mut().zip(g) {
                    *wj += gj;
                }
            }
        }
        w
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn pt(c: &[i64]) -> Point {
        c.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn axis_spider_compositions() {
        let s = Spider::axis(2);
        let sq = zonotope_from_composition(&s, &Composition(vec![1, 1])).unwrap();
        assert_eq!(sq.bounds(), (pt(&[0, 0]), pt(&[1, 1])));
        assert_eq!(sq.generators().len(), 2);
        let seg = zonotope_from_composition(&s, &Composition(vec![2, 0])).unwrap();
        assert_eq!(seg.generators(), &[pt(&[2, 0])]);
        assert!(!seg.is_full_dimensional());
        assert!(matches!(
            zonotope_from_composition(&s, &Composition(vec![1, 1, 0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn support_examples() {
        let s = Spider::axis(2);
        let sq = zonotope_from_composition(&s, &Composition(vec![1, 1])).unwrap();
        assert_eq!(sq.support_point(&pt(&[1, 1])).unwrap(), (int(2), pt(&[1, 1])));
        let seg = zonotope_from_composition(&s, &Composition(vec![2, 0])).unwrap();
        assert_eq!(seg.support_point(&pt(&[0, 1])).unwrap().0, int(0));
        assert_eq!(sq.support_point(&pt(&[0, 0])), Err(Error::ZeroDirection));

        let skew = Spider::new(pt(&[0, 0]), vec![pt(&[1, 0]), pt(&[1, 1])]).unwrap();
        let para = zonotope_from_composition(&skew, &Composition(vec![1, 1])).unwrap();
        // Vertices by hand: o, (1,0), (1,1), (2,1).
        let (v, w) = para.support_point(&pt(&[1, 0])).unwrap();
        assert_eq!(v, int(2));
        assert_eq!(w, pt(&[2, 1]));
        for (dir, expect) in [([0, -1], 0), ([-1, 0], 0), ([-1, 1], 0), ([1, -1], 1)] {
            assert_eq!(para.support_point(&pt(&dir)).unwrap().0, int(expect));
        }
    }
}
