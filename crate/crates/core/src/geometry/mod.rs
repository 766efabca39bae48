//! Exact-direction convex geometry: spiders, zonotopes, support oracles and
//! Gilbert distance queries.

pub mod gilbert;
pub mod hull;
pub mod membership;
pub mod polygon;
pub mod spider;
pub mod zonotope;

pub use gilbert::{gilbert_distance, BoxBody, Distance, PointHull, SupportBody};
pub use membership::{hull_membership, membership_kfold, Membership};
pub use polygon::{union_area, ConvexPolygon};
pub use spider::{compositions, Composition, Spider};
pub use zonotope::{zonotope_from_composition, Zonotope};

use crate::rational::{self, Rational};
use num_traits::Zero;

/// A point or vector with exact rational coordinates.
pub type Point = Vec<Rational>;

pub fn to_f64(p: &[Rational]) -> Vec<f64> {
    p.iter().map(rational::to_f64).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> Point {
    a.iter().map(|x| x * s).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Rank of a list of vectors (rows), by Gaussian elimination over the
/// rationals.
pub fn rank(vectors: &[Point]) -> usize {
    let mut rows: Vec<Point> = vectors.to_vec();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of a nonempty point set.
pub fn affine_dim(points: &[Point]) -> usize {
    match points.split_first() {
        None => 0,
        Some((first, rest)) => {
            let diffs: Vec<Point> = rest.iter().map(|p| sub(p, first)).collect();
            rank(&diffs)
        }
    }
}

/// Exact determinant of a square matrix.
pub fn determinant(matrix: &[Point]) -> Rational {
    let n = matrix.len();
    let mut m: Vec<Point> = matrix.to_vec();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if pivot != c {
            m.swap(pivot, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                let pivot_row = m[c].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    det
}

/// Axis-aligned bounding box `(lo, hi)` of a nonempty point list.
pub fn bounding_box(points: &[Point]) -> (Point, Point) {
    let mut lo = points[0].clone();
    let mut hi = points[0].clone();
    for p in &points[1..] {
        for j in 0..p.len() {
            if p[j] < lo[j] {
                lo[j] = p[j].clone();
            }
            if p[j] > hi[j] {
                hi[j] = p[j].clone();
            }
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn rank_and_det() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(rank(&a), 1);
        assert_eq!(determinant(&a), int(0));
        let b = vec![vec![int(2), int(1)], vec![rat(1, 2), int(3)]];
        assert_eq!(rank(&b), 2);
        assert_eq!(determinant(&b), rat(11, 2));
        let pts = vec![vec![int(0), int(0), int(0)], vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]];
        assert_eq!(affine_dim(&pts), 2);
    }
}
