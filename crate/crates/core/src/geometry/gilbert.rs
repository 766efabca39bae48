//! Gilbert's distance algorithm (GJK on a point versus a convex body given
//! by its support map), with the Frank–Wolfe duality gap as a lower bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A compact convex body known only through its support map.
pub trait SupportBody: Sync {
    fn dim(&self) -> usize;

    /// A point of the body maximising `<x, u>`.
    fn support(&self, u: &[f64]) -> Vec<f64>;

    /// Characteristic size, used for relative tolerances.
    fn scale(&self) -> f64;
}

/// Convex hull of a finite point list.
#[derive(Debug, Clone)]
pub struct PointHull {
    points: Vec<Vec<f64>>,
}

impl PointHull {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptySet);
        };
        let d = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: p.len() });
        }
        Ok(Self { points })
    }

    pub fn from_rational(points: &[super::Point]) -> Result<Self> {
        Self::new(points.iter().map(|p| super::to_f64(p)).collect())
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

impl SupportBody for PointHull {
    fn dim(&self) -> usize {
        self.points[0].len()
    }

    fn support(&self, u: &[f64]) -> Vec<f64> {
        let mut best = &self.points[0];
        let mut best_val = f64::NEG_INFINITY;
        for p in &self.points {
            let v = dot(p, u);
            if v > best_val {
                best_val = v;
                best = p;
            }
        }
        best.clone()
    }

    fn scale(&self) -> f64 {
        let mut s = 0.0f64;
        for a in &self.points {
            for b in &self.points {
                s = s.max(norm(&diff(a, b)));
            }
        }
        s
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct BoxBody {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxBody {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::OutOfDomain("box with lo > hi".into()));
        }
        Ok(Self { lo, hi })
    }

    /// Exact Euclidean distance from `q` to the box.
    pub fn distance(&self, q: &[f64]) -> f64 {
        q.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| {
                let e = if x < l { l - x } else if x > h { x - h } else { 0.0 };
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }
}

impl SupportBody for BoxBody {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn support(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(j, &c)| if c > 0.0 { self.hi[j] } else { self.lo[j] })
            .collect()
    }

    fn scale(&self) -> f64 {
        norm(&diff(&self.hi, &self.lo))
    }
}

/// Bounds on `dist(q, body)` and the best body point found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub lower: f64,
    pub upper: f64,
    pub witness: Vec<f64>,
    pub iterations: u64,
}

/// Distance from `q` to `body` to within `tol`.
///
/// Works on the translated body `K - q`; `v` is the point of the current
/// simplex closest to the origin. `|v|` is the upper bound and
/// `<v, s(-v) - q> / |v|` the lower one.
pub fn gilbert_distance<B: SupportBody + ?Sized>(body: &B, q: &[f64], tol: f64) -> Result<Distance> {
    if !(tol > 0.0) {
        return Err(Error::OutOfDomain(format!("tolerance {tol} must be positive")));
    }
    let d = body.dim();
    if q.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: q.len() });
    }
    let cap = (10.0 * (1.0 / tol).ceil()).min(u64::MAX as f64) as u64;

    let start = diff(&body.support(&vec![1.0; d]), q);
    let mut simplex = vec![start.clone()];
    let mut v = start;
    let mut upper = norm(&v);
    let mut lower = 0.0f64;
    let mut iterations = 0u64;

    loop {
        if upper <= tol {
            return Ok(Distance { lower: 0.0, upper, witness: add(q, &v), iterations });
        }
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let w = diff(&body.support(&neg), q);
        lower = lower.max(dot(&v, &w) / upper).max(0.0).min(upper);
        if upper - lower <= tol {
            return Ok(Distance { lower, upper, witness: add(q, &v), iterations });
        }
        iterations += 1;
        if iterations >= cap || simplex.iter().any(|s| s == &w) {
            break;
        }
        simplex.push(w);
        let (next, kept) = closest_in_hull(&simplex);
        let next_norm = norm(&next);
        if next_norm >= upper {
            // Roundoff stall: no further progress is possible in f64.
            break;
        }
        simplex = kept;
        v = next;
        upper = next_norm;
    }
    Err(Error::Nonconvergence { lower, upper, iterations })
}

/// Closest point to the origin in the hull of at most a handful of points,
/// by checking every face; also returns the minimal supporting subset.
fn closest_in_hull(points: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = points.len();
    let mut best: Option<(f64, Vec<f64>, u32)> = None;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let Some(bary) = affine_closest(points, &idx) else {
            continue;
        };
        if bary.iter().any(|&b| b < -1e-12) {
            continue;
        }
        let mut p = vec![0.0; points[0].len()];
        for (&i, &b) in idx.iter().zip(&bary) {
            for (pj, xj) in p.iter_mut().zip(&points[i]) {
                *pj += b * xj;
            }
        }
        let len = norm(&p);
        if best.as_ref().map_or(true, |(l, _, _)| len < *l) {
            best = Some((len, p, mask));
        }
    }
    let (_, p, mask) = best.expect("singletons always qualify");
    let kept = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| points[i].clone()).collect();
    (p, kept)
}

/// Barycentric coordinates of the origin's projection onto the affine hull
/// of `points[idx]`, or `None` if the subset is affinely dependent.
fn affine_closest(points: &[Vec<f64>], idx: &[usize]) -> Option<Vec<f64>> {
    let y0 = &points[idx[0]];
    let m = idx.len() - 1;
    if m == 0 {
        return Some(vec![1.0]);
    }
    let e: Vec<Vec<f64>> = idx[1..].iter().map(|&i| diff(&points[i], y0)).collect();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|r| {
            let mut row: Vec<f64> = (0..m).map(|c| dot(&e[r], &e[c])).collect();
            row.push(-dot(&e[r], y0));
            row
        })
        .collect();
    let scale = e.iter().map(|x| dot(x, x)).fold(0.0f64, f64::max);
    for c in 0..m {
        let pivot = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[pivot][c].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(c, pivot);
        for r in 0..m {
            if r != c {
                let f = a[r][c] / a[c][c];
                for cc in c..=m {
                    a[r][cc] -= f * a[c][cc];
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..m).map(|r| a[r][m] / a[r][r]).collect();
    let mut bary = vec![1.0 - lambda.iter().sum::<f64>()];
    bary.extend(lambda);
    Some(bary)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn box_examples() {
        let b = BoxBody::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
        let r = gilbert_distance(&b, &[3.0, 0.0], 1e-9).unwrap();
        assert!(r.lower <= 1.0 + 1e-12 && 1.0 - 1e-12 <= r.upper && r.upper - r.lower <= 1e-9);
        let r = gilbert_distance(&b, &[3.0, 2.0], 1e-9).unwrap();
        let s = 2f64.sqrt();
        assert!(r.lower <= s + 1e-12 && s - 1e-12 <= r.upper && r.upper - r.lower <= 1e-9);
        let r = gilbert_distance(&b, &[1.0, 0.5], 1e-9).unwrap();
        assert_eq!(r.lower, 0.0);
        assert!(r.upper <= 1e-9);
        assert!(gilbert_distance(&b, &[1.0, 0.5], 0.0).is_err());
    }

    #[test]
    fn random_boxes_match_exact_distance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let d = rng.gen_range(1..=4);
            let lo: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.0..2.0)).collect();
            let b = BoxBody::new(lo, hi).unwrap();
            let q: Vec<f64> = (0..d).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let exact = b.distance(&q);
            let r = gilbert_distance(&b, &q, 1e-9).unwrap();
            assert!(r.lower <= exact + 1e-9 && exact <= r.upper + 1e-9, "{r:?} vs {exact}");
            assert!(r.upper - r.lower <= 1e-9);
            assert!((norm(&diff(&r.witness, &q)) - r.upper).abs() < 1e-9);
        }
    }

    #[test]
    fn hull_triangle() {
        let h = PointHull::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = gilbert_distance(&h, &[1.0, 1.0], 1e-10).unwrap();
        let exact = 0.5f64.sqrt();
        assert!(r.lower <= exact + 1e-12 && exact - 1e-12 <= r.upper);
        let r = gilbert_distance(&h, &[-1.0, 0.5], 1e-10).unwrap();
        assert!((r.upper - 1.0).abs() < 1e-9);
    }
}
