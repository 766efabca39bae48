use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest box list accepted by [`box_union_volume`].
pub const MAX_BOXES: usize = 20;

/// Closed axis-aligned box; degenerate intervals allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisBox {
    #[serde(with = "crate::rational::vec_str")]
    pub lo: Vec<Rational>,
    #[serde(with = "crate::rational::vec_str")]
    pub hi: Vec<Rational>,
}

impl AxisBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::OutOfDomain("box with lo > hi".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> Rational {
        self.lo.iter().zip(&self.hi).fold(Rational::from_integer(1.into()), |acc, (a, b)| acc * (b - a))
    }

    /// Whether some interval has zero length.
    pub fn is_degenerate(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a == b)
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Minkowski sum of two boxes.
    pub fn sum(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Exact volume of a union of at most [`MAX_BOXES`] boxes.
pub fn box_union_volume(boxes: &[AxisBox]) -> Result<Rational> {
    if boxes.len() > MAX_BOXES {
        return Err(Error::TooManyBoxes { count: boxes.len(), cap: MAX_BOXES });
    }
    union_volume(boxes)
}

/// Exact volume of a union of boxes, with no size cap.
pub fn union_volume(boxes: &[AxisBox]) -> Result<Rational> {
    let Some(first) = boxes.first() else {
        return Ok(Rational::zero());
    };
    let d = first.dim();
    if let Some(b) = boxes.iter().find(|b| b.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: b.dim() });
    }
    let solid: Vec<&AxisBox> = boxes.iter().filter(|b| !b.is_degenerate()).collect();
    Ok(sweep(&solid, 0))
}

/// Slabs between consecutive endpoints on `axis`; each slab contributes
/// its width times the union volume of the boxes spanning it in the
/// remaining axes.
fn sweep(boxes: &[&AxisBox], axis: usize) -> Rational {
    if boxes.is_empty() {
        return Rational::zero();
    }
    let d = boxes[0].dim();
    let mut cuts: Vec<&Rational> = boxes.iter().flat_map(|b| [&b.lo[axis], &b.hi[axis]]).collect();
    cuts.sort();
    cuts.dedup();
    let mut total = Rational::zero();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let active: Vec<&AxisBox> = boxes.iter().copied().filter(|x| &x.lo[axis] <= a && b <= &x.hi[axis]).collect();
        if active.is_empty() {
            continue;
        }
        let width = b - a;
        if axis + 1 == d {
            total += width;
        } else {
            let inner = sweep(&active, axis + 1);
            if inner.is_positive() {
                total += width * inner;
            }
        }
    }
    total
}

/// `(U a_i) + (U b_j) = U (a_i + b_j)`.
pub fn sum_unions(a: &[AxisBox], b: &[AxisBox]) -> Vec<AxisBox> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.sum(y))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use rand::{Rng, SeedableRng};

    fn bx(lo: &[i64], hi: &[i64]) -> AxisBox {
        AxisBox::new(lo.iter().map(|&x| int(x)).collect(), hi.iter().map(|&x| int(x)).collect()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(box_union_volume(&[bx(&[0, 0], &[2, 3])]).unwrap(), int(6));
        assert_eq!(box_union_volume(&[bx(&[0, 0], &[1, 1]), bx(&[2, 2], &[3, 3])]).unwrap(), int(2));
        assert_eq!(box_union_volume(&[bx(&[0, 0], &[2, 2]), bx(&[1, 1], &[3, 3])]).unwrap(), int(7));
        assert_eq!(box_union_volume(&[bx(&[0, 0], &[2, 0])]).unwrap(), int(0));
        let many = vec![bx(&[0], &[1]); 21];
        assert!(matches!(box_union_volume(&many), Err(Error::TooManyBoxes { count: 21, .. })));
        assert_eq!(union_volume(&many).unwrap(), int(1));
        assert!(box_union_volume(&[bx(&[0], &[1]), bx(&[0, 0], &[1, 1])]).is_err());
    }

    #[test]
    fn inclusion_exclusion_oracle() {
        // Intersections of boxes are boxes, so the union volume also
        // follows from inclusion-exclusion over all subsets.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let d = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=6);
            let boxes: Vec<AxisBox> = (0..n)
                .map(|_| {
                    let lo: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(0..8), 4)).collect();
                    let hi = lo.iter().map(|l| l + rat(rng.gen_range(0..8), 4)).collect();
                    AxisBox::new(lo, hi).unwrap()
                })
                .collect();
            let mut ie = Rational::zero();
            for mask in 1u32..(1 << n) {
                let members: Vec<&AxisBox> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| &boxes[i]).collect();
                let mut vol = int(1);
                for j in 0..d {
                    let lo = members.iter().map(|b| &b.lo[j]).max().unwrap();
                    let hi = members.iter().map(|b| &b.hi[j]).min().unwrap();
                    vol *= if hi > lo { hi - lo } else { Rational::zero() };
                }
                if mask.count_ones() % 2 == 1 {
                    ie += vol;
                } else {
                    ie -= vol;
                }
            }
            assert_eq!(box_union_volume(&boxes).unwrap(), ie);
        }
    }
}
