//! Exact planar convex polygons and the area of their unions.
//!
//! Union areas use the boundary integral: each edge contributes the parts of
//! it not covered by another polygon. Edges shared by two polygons lying on
//! the same side are kept for the lower index only.

use num_traits::{Signed, Zero};

use super::hull::{convex_hull_2d, polygon_area};
use crate::rational::{self, Rational};

pub type P2 = [Rational; 2];

/// Counter-clockwise vertex list without collinear repeats. One or two
/// vertices describe a point or a segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<P2>,
}

/// `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    pub normal: P2,
    pub offset: Rational,
}

impl HalfPlane {
    fn eval(&self, p: &P2) -> Rational {
        &self.normal[0] * &p[0] + &self.normal[1] * &p[1] - &self.offset
    }

    /// The closed complement `normal . x >= offset`.
    pub fn flipped(&self) -> Self {
        Self { normal: [-&self.normal[0], -&self.normal[1]], offset: -&self.offset }
    }
}

pub fn p2(x: Rational, y: Rational) -> P2 {
    [x, y]
}

impl ConvexPolygon {
    pub fn hull(points: &[P2]) -> Self {
        Self { vertices: convex_hull_2d(points) }
    }

    pub fn from_rational(points: &[Vec<Rational>]) -> Self {
        let pts: Vec<P2> = points.iter().map(|p| [p[0].clone(), p[1].clone()]).collect();
        Self::hull(&pts)
    }

    pub fn vertices(&self) -> &[P2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Fewer than three vertices: a point or a segment (or nothing).
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> Rational {
        polygon_area(&self.vertices)
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        let mut v: Vec<P2> = self.vertices.iter().map(|p| [&p[0] * s, &p[1] * s]).collect();
        if s.is_negative() {
            return Self::hull(&v);
        }
        if s.is_zero() {
            v.truncate(1);
        }
        Self { vertices: v }
    }

    pub fn translated(&self, t: &P2) -> Self {
        Self { vertices: self.vertices.iter().map(|p| [&p[0] + &t[0], &p[1] + &t[1]]).collect() }
    }

    /// Image under `x -> m x + t`.
    pub fn mapped(&self, m: &[Vec<Rational>], t: &[Rational]) -> Self {
        let pts: Vec<P2> = self
            .vertices
            .iter()
            .map(|p| {
                [
                    &m[0][0] * &p[0] + &m[0][1] * &p[1] + &t[0],
                    &m[1][0] * &p[0] + &m[1][1] * &p[1] + &t[1],
                ]
            })
            .collect();
        Self::hull(&pts)
    }

    pub fn minkowski(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self { vertices: Vec::new() };
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push([&a[0] + &b[0], &a[1] + &b[1]]);
            }
        }
        Self::hull(&pts)
    }

    /// Outward edge half-planes; empty for degenerate polygons.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        if self.is_degenerate() {
            return Vec::new();
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = &self.vertices[i];
                let b = &self.vertices[(i + 1) % n];
                let normal = [&b[1] - &a[1], &a[0] - &b[0]];
                let offset = &normal[0] * &a[0] + &normal[1] * &a[1];
                HalfPlane { normal, offset }
            })
            .collect()
    }

    pub fn clip(&self, h: &HalfPlane) -> Self {
        let n = self.vertices.len();
        if n == 0 {
            return self.clone();
        }
        let mut out: Vec<P2> = Vec::new();
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            let fa = h.eval(a);
            let fb = h.eval(b);
            if !fa.is_positive() {
                out.push(a.clone());
            }
            if (fa.is_negative() && fb.is_positive()) || (fa.is_positive() && fb.is_negative()) {
                let t = &fa / (&fa - &fb);
                out.push([&a[0] + &t * (&b[0] - &a[0]), &a[1] + &t * (&b[1] - &a[1])]);
            }
            if n == 1 {
                break;
            }
        }
        Self::hull(&out)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if other.is_degenerate() {
            // Clip the degenerate one against the full polygon instead.
            if self.is_degenerate() {
                return Self::hull(&self.vertices.iter().filter(|p| other.vertices.contains(p)).cloned().collect::<Vec<_>>());
            }
            return other.intersect(self);
        }
        other.half_planes().iter().fold(self.clone(), |acc, h| acc.clip(h))
    }

    /// Closed containment.
    pub fn contains(&self, p: &P2) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => &self.vertices[0] == p,
            2 => {
                let (a, b) = (&self.vertices[0], &self.vertices[1]);
                let cross = (&b[0] - &a[0]) * (&p[1] - &a[1]) - (&b[1] - &a[1]) * (&p[0] - &a[0]);
                cross.is_zero()
                    && (&p[0] - &a[0]) * (&p[0] - &b[0]) <= Rational::zero()
                    && (&p[1] - &a[1]) * (&p[1] - &b[1]) <= Rational::zero()
            }
            _ => self.half_planes().iter().all(|h| !h.eval(p).is_positive()),
        }
    }

    /// Interior containment for full-dimensional polygons.
    pub fn contains_strictly(&self, p: &P2) -> bool {
        !self.is_degenerate() && self.half_planes().iter().all(|h| h.eval(p).is_negative())
    }

    pub fn contains_polygon(&self, other: &Self) -> bool {
        other.vertices.iter().all(|p| self.contains(p))
    }

    fn bbox(&self) -> Option<(P2, P2)> {
        let first = self.vertices.first()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in &self.vertices {
            for j in 0..2 {
                if p[j] < lo[j] {
                    lo[j] = p[j].clone();
                }
                if p[j] > hi[j] {
                    hi[j] = p[j].clone();
                }
            }
        }
        Some((lo, hi))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|p| vec![rational::to_f64(&p[0]), rational::to_f64(&p[1])]).collect()
    }
}

/// Parameter interval of `a + t (b - a)`, `t` in `[0, 1]`, satisfying every
/// half-plane (closed). `None` when empty or a single point.
pub fn clip_segment(a: &P2, b: &P2, planes: &[HalfPlane]) -> Option<(Rational, Rational)> {
    let mut lo = Rational::zero();
    let mut hi = rational::int(1);
    for h in planes {
        let f0 = h.eval(a);
        let f1 = h.eval(b);
        match (f0.is_positive(), f1.is_positive()) {
            (true, true) => return None,
            (false, false) => {}
            _ => {
                let t = &f0 / (&f0 - &f1);
                if f0.is_positive() {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
        if lo >= hi {
            return None;
        }
    }
    Some((lo, hi))
}

fn covered_interval(a: &P2, b: &P2, edge_normal: &P2, own: usize, other_index: usize, other: &ConvexPolygon) -> Option<(Rational, Rational)> {
    let mut lo = Rational::zero();
    let mut hi = rational::int(1);
    for h in other.half_planes() {
        let f0 = h.eval(a);
        let f1 = h.eval(b);
        if f0.is_zero() && f1.is_zero() {
            let same_side = (&h.normal[0] * &edge_normal[0] + &h.normal[1] * &edge_normal[1]).is_positive();
            if same_side && other_index > own {
                return None;
            }
            continue;
        }
        match (f0.is_positive(), f1.is_positive()) {
            (true, true) => return None,
            (false, false) => {}
            _ => {
                let t = &f0 / (&f0 - &f1);
                if f0.is_positive() {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
        if lo >= hi {
            return None;
        }
    }
    Some((lo, hi))
}

fn overlaps(a: &(P2, P2), b: &(P2, P2)) -> bool {
    (0..2).all(|j| a.0[j] <= b.1[j] && b.0[j] <= a.1[j])
}

/// Exact area of a union of convex polygons. Degenerate members carry no
/// area and are ignored.
pub fn union_area(polys: &[ConvexPolygon]) -> Rational {
    let live: Vec<&ConvexPolygon> = polys.iter().filter(|p| !p.is_degenerate()).collect();
    let boxes: Vec<(P2, P2)> = live.iter().map(|p| p.bbox().expect("non-empty")).collect();
    let per_polygon = crate::par::map_range(live.len(), |i| {
        let poly = live[i];
        let n = poly.vertices.len();
        let mut twice = Rational::zero();
        for e in 0..n {
            let a = &poly.vertices[e];
            let b = &poly.vertices[(e + 1) % n];
            let normal = [&b[1] - &a[1], &a[0] - &b[0]];
            let ebox = (
                [a[0].clone().min(b[0].clone()), a[1].clone().min(b[1].clone())],
                [a[0].clone().max(b[0].clone()), a[1].clone().max(b[1].clone())],
            );
            let mut covered: Vec<(Rational, Rational)> = (0..live.len())
                .filter(|&j| j != i && overlaps(&ebox, &boxes[j]))
                .filter_map(|j| covered_interval(a, b, &normal, i, j, live[j]))
                .collect();
            covered.sort();
            let mut cursor = Rational::zero();
            let mut free: Vec<(Rational, Rational)> = Vec::new();
            for (lo, hi) in covered {
                if lo > cursor {
                    free.push((cursor.clone(), lo));
                }
                if hi > cursor {
                    cursor = hi;
                }
            }
            let one = rational::int(1);
            if cursor < one {
                free.push((cursor, one));
            }
            for (s0, s1) in free {
                let p0 = [&a[0] + &s0 * (&b[0] - &a[0]), &a[1] + &s0 * (&b[1] - &a[1])];
                let p1 = [&a[0] + &s1 * (&b[0] - &a[0]), &a[1] + &s1 * (&b[1] - &a[1])];
                twice += &p0[0] * &p1[1] - &p1[0] * &p0[1];
            }
        }
        twice
    });
    per_polygon.into_iter().fold(Rational::zero(), |acc, x| acc + x) / rational::int(2)
}

/// Drop members contained in another member (keeping one copy of equals).
pub fn prune_contained(polys: Vec<ConvexPolygon>) -> Vec<ConvexPolygon> {
    let mut sorted = polys;
    sorted.sort_by_key(|p| std::cmp::Reverse(p.area()));
    let mut kept: Vec<ConvexPolygon> = Vec::new();
    for p in sorted {
        if p.is_empty() || kept.iter().any(|q| q.contains_polygon(&p)) {
            continue;
        }
        kept.push(p);
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn poly(pts: &[(i64, i64)]) -> ConvexPolygon {
        ConvexPolygon::hull(&pts.iter().map(|&(x, y)| [int(x), int(y)]).collect::<Vec<_>>())
    }

    #[test]
    fn minkowski_of_squares() {
        let s = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let t = poly(&[(0, 0), (2, 0), (0, 2)]);
        assert_eq!(s.minkowski(&s).area(), int(4));
        // [0,3]^2 minus a corner triangle of area 2.
        assert_eq!(s.minkowski(&t).area(), int(7));
    }

    #[test]
    fn clip_and_intersect() {
        let s = poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let t = poly(&[(1, 1), (3, 1), (3, 3), (1, 3)]);
        assert_eq!(s.intersect(&t).area(), int(1));
        let far = poly(&[(5, 5), (6, 5), (6, 6)]);
        assert!(s.intersect(&far).is_empty());
        let seg = ConvexPolygon::hull(&[[int(-1), int(1)], [int(3), int(1)]]);
        let cut = seg.intersect(&s);
        assert_eq!(cut.vertices().len(), 2);
    }

    #[test]
    fn union_of_overlapping_and_touching() {
        let a = poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let b = poly(&[(1, 1), (3, 1), (3, 3), (1, 3)]);
        assert_eq!(union_area(&[a.clone(), b.clone()]), int(7));
        // Duplicates and shared edges.
        let c = poly(&[(2, 0), (4, 0), (4, 2), (2, 2)]);
        assert_eq!(union_area(&[a.clone(), a.clone(), c.clone()]), int(8));
        assert_eq!(union_area(&[a.clone(), c, b]), int(10));
        // Nested.
        let small = poly(&[(0, 0), (1, 0), (1, 1)]);
        assert_eq!(union_area(&[small, a]), int(4));
    }

    #[test]
    fn union_matches_grid_count() {
        // Triangles with vertices on the half-integer lattice; compare with
        // a fine point count.
        let tris = [
            ConvexPolygon::hull(&[[int(0), int(0)], [int(3), int(0)], [int(0), int(3)]]),
            ConvexPolygon::hull(&[[int(1), int(1)], [rat(7, 2), int(1)], [int(1), rat(7, 2)]]),
            ConvexPolygon::hull(&[[rat(1, 2), int(2)], [int(3), int(2)], [int(2), int(4)]]),
        ];
        let exact = rational::to_f64(&union_area(&tris));
        let float: Vec<Vec<Vec<f64>>> = tris.iter().map(|t| t.to_f64()).collect();
        let inside = |v: &[Vec<f64>], x: f64, y: f64| {
            (0..v.len()).all(|i| {
                let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
                (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]) >= 0.0
            })
        };
        let n = 800;
        let mut hits = 0u64;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (4.0 * (i as f64 + 0.5) / n as f64, 4.0 * (j as f64 + 0.5) / n as f64);
                if float.iter().any(|v| inside(v, x, y)) {
                    hits += 1;
                }
            }
        }
        let est = hits as f64 * 16.0 / (n * n) as f64;
        assert!((est - exact).abs() < 0.02, "{est} vs {exact}");
    }

    #[test]
    fn segments_contribute_through_sums() {
        let seg = ConvexPolygon::hull(&[[int(0), int(0)], [int(1), int(0)]]);
        let vert = ConvexPolygon::hull(&[[int(0), int(0)], [int(0), int(1)]]);
        assert!(seg.is_degenerate());
        assert_eq!(seg.minkowski(&vert).area(), int(1));
        assert_eq!(union_area(&[seg]), int(0));
    }

    #[test]
    fn segment_clipping() {
        let sq = poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let (lo, hi) = clip_segment(&[int(-2), int(1)], &[int(4), int(1)], &sq.half_planes()).unwrap();
        assert_eq!((lo, hi), (rat(1, 3), rat(2, 3)));
        assert!(clip_segment(&[int(3), int(0)], &[int(4), int(4)], &sq.half_planes()).is_none());
    }

    #[test]
    fn prune_keeps_maximal() {
        let a = poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let b = poly(&[(0, 0), (1, 0), (1, 1)]);
        let kept = prune_contained(vec![b, a.clone(), a.clone()]);
        assert_eq!(kept, vec![a]);
    }
}
