//! Planar sets `X = K \ (F_1 u ... u F_n)` with `K` a convex polygon and
//! open convex bites `F_i`.
//!
//! `K \ F` is the union of `K` clipped by the closed outer side of each edge
//! of `F`, so `X` is a finite union of convex pieces and `X[k]` is the union
//! of the sums of `k` pieces. That gives an exact area route next to the
//! grid route.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::enumerate_layer;
use crate::error::{Error, Result};
use crate::geometry::polygon::{clip_segment, prune_contained, union_area, ConvexPolygon, HalfPlane, P2};
use crate::geometry::Point;
use crate::grid::{box_self_sum, dilate::self_sum_with, fill_range, GridFrame, GridSet, Mode, VolumeBound};
use crate::rational::{self, Rational};

/// Largest number of piece multisets the exact route will sum.
pub const MAX_EXACT_SUMS: usize = 5000;

#[derive(Debug, Clone)]
pub struct PlanarSet {
    outer: ConvexPolygon,
    bites: Vec<ConvexPolygon>,
    pieces: Vec<ConvexPolygon>,
}

fn bite_error(i: usize, reason: &str) -> Error {
    Error::InvalidSpec { path: format!("bites[{i}]"), reason: reason.into() }
}

impl PlanarSet {
    pub fn new(outer: ConvexPolygon, bites: Vec<ConvexPolygon>) -> Result<Self> {
        if outer.is_degenerate() {
            return Err(Error::InvalidSpec { path: "outer".into(), reason: "polygon must have non-empty interior".into() });
        }
        for (i, b) in bites.iter().enumerate() {
            if b.is_degenerate() {
                return Err(bite_error(i, "polygon must have non-empty interior"));
            }
        }
        for i in 0..bites.len() {
            for j in (i + 1)..bites.len() {
                if !bites[i].intersect(&bites[j]).area().is_zero() {
                    return Err(Error::OverlappingBites { first: i, second: j });
                }
            }
        }
        for (i, b) in bites.iter().enumerate() {
            match boundary_arcs(&outer, b) {
                Arcs::Count(n) if n <= 1 => {}
                Arcs::Count(_) => return Err(bite_error(i, "bite meets the outer boundary in more than one arc")),
                Arcs::Everything => return Err(bite_error(i, "bite covers the whole outer boundary")),
            }
        }
        let mut pieces = vec![outer.clone()];
        for b in &bites {
            let planes = b.half_planes();
            let mut next = Vec::new();
            for p in &pieces {
                for h in &planes {
                    let q = p.clip(&h.flipped());
                    if !q.is_empty() {
                        next.push(q);
                    }
                }
            }
            pieces = prune_contained(next);
        }
        if pieces.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Self { outer, bites, pieces })
    }

    pub fn from_rational(outer: &[Point], bites: &[Vec<Point>]) -> Result<Self> {
        Self::new(
            ConvexPolygon::from_rational(outer),
            bites.iter().map(|b| ConvexPolygon::from_rational(b)).collect(),
        )
    }

    pub fn outer(&self) -> &ConvexPolygon {
        &self.outer
    }

    pub fn bites(&self) -> &[ConvexPolygon] {
        &self.bites
    }

    pub fn pieces(&self) -> &[ConvexPolygon] {
        &self.pieces
    }

    /// Image under an affine map.
    pub fn mapped(&self, m: &[Vec<Rational>], t: &[Rational]) -> Result<Self> {
        Self::new(self.outer.mapped(m, t), self.bites.iter().map(|b| b.mapped(m, t)).collect())
    }

    pub fn vertices(&self) -> Vec<Point> {
        self.pieces.iter().flat_map(|p| p.vertices().iter().map(|v| v.to_vec())).collect()
    }

    pub fn hull(&self) -> ConvexPolygon {
        let pts: Vec<P2> = self.pieces.iter().flat_map(|p| p.vertices().iter().cloned()).collect();
        ConvexPolygon::hull(&pts)
    }

    /// Bites meeting the boundary of `K`.
    pub fn boundary_bites(&self) -> Vec<usize> {
        (0..self.bites.len())
            .filter(|&i| matches!(boundary_arcs(&self.outer, &self.bites[i]), Arcs::Count(1)))
            .collect()
    }

    /// The convex pieces of `X[k]`, one per multiset of pieces, with pieces
    /// inside another dropped.
    pub fn kfold_pieces(&self, k: u64) -> Result<Vec<ConvexPolygon>> {
        let m = self.pieces.len();
        let count = crate::combinatorics::binomial(m as u64 + k - 1, k);
        if count.to_usize().is_none_or(|c| c > MAX_EXACT_SUMS) {
            return Err(Error::Unsupported(format!("{count} piece sums exceed the exact-route limit")));
        }
        let layer = enumerate_layer(m, k)?;
        let sums = crate::par::map_slice(&layer, |t| {
            let mut acc: Option<ConvexPolygon> = None;
            for (p, &c) in self.pieces.iter().zip(t.coords()) {
                if c == 0 {
                    continue;
                }
                let scaled = p.scaled(&rational::int(i64::from(c)));
                acc = Some(match acc {
                    None => scaled,
                    Some(a) => a.minkowski(&scaled),
                });
            }
            acc.expect("k >= 1")
        });
        Ok(prune_contained(sums))
    }

    /// Exact `area(X[k] / k)`.
    pub fn kfold_area(&self, k: u64) -> Result<Rational> {
        if k == 0 {
            return Err(Error::OutOfDomain("k must be at least 1".into()));
        }
        Ok(union_area(&self.kfold_pieces(k)?) / rational::pow(&rational::int(k as i64), 2))
    }

    pub fn frame(&self, h: &Rational) -> Result<GridFrame> {
        let (lo, hi) = crate::geometry::bounding_box(&self.outer.vertices().iter().map(|v| v.to_vec()).collect::<Vec<_>>());
        GridFrame::covering(&lo, &hi, h)
    }

    /// Cells inside `X` and a cell cover of `X`, on `frame`.
    pub fn rasters(&self, frame: &GridFrame) -> Result<(GridSet, GridSet)> {
        let mut inner = column_raster(&self.outer, frame, Fill::Inside)?;
        let mut outer = column_raster(&self.outer, frame, Fill::Touching)?;
        for b in &self.bites {
            inner = inner.difference(&column_raster(b, frame, Fill::Touching)?)?;
            outer = outer.difference(&column_raster(b, frame, Fill::Inside)?)?;
        }
        Ok((inner.with_mode(Mode::Inner), outer.with_mode(Mode::Outer)))
    }

    /// Grid bracket for `area(X[k] / k)` at spacing `h`: the index sumset of
    /// the inner cells lies in `X[k]`, the box sum of the cover contains it.
    pub fn grid_bounds(&self, k: u64, h: &Rational, cap: u64) -> Result<VolumeBound> {
        let frame = self.frame(h)?;
        let (inner, outer) = self.rasters(&frame)?;
        let scale = frame.cell_volume() / rational::pow(&rational::int(k as i64), 2);
        let lower = if inner.is_empty() { 0 } else { self_sum_with(&inner, k, cap)?.count() };
        let upper = box_self_sum(&outer, k, cap)?.count();
        VolumeBound::new(rational::int(lower as i64) * &scale, rational::int(upper as i64) * &scale)
    }

    /// `gamma_i`: the part of the bite's boundary inside `K`, as segments.
    pub fn gamma(&self, bite: usize) -> Vec<(P2, P2)> {
        let planes = self.outer.half_planes();
        let v = self.bites[bite].vertices();
        let n = v.len();
        (0..n)
            .filter_map(|e| {
                let (a, b) = (&v[e], &v[(e + 1) % n]);
                let (t0, t1) = clip_segment(a, b, &planes)?;
                let at = |t: &Rational| [&a[0] + t * (&b[0] - &a[0]), &a[1] + t * (&b[1] - &a[1])];
                Some((at(&t0), at(&t1)))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Fill {
    /// Closed cells inside the closed polygon.
    Inside,
    /// Closed cells meeting the closed polygon.
    Touching,
}

fn band(x0: &Rational, x1: &Rational) -> [HalfPlane; 2] {
    let one = rational::int(1);
    let zero = Rational::zero();
    [
        HalfPlane { normal: [-&one, zero.clone()], offset: -x0 },
        HalfPlane { normal: [one, zero], offset: x1.clone() },
    ]
}

fn y_range(q: &ConvexPolygon) -> Option<(Rational, Rational)> {
    let ys = q.vertices().iter().map(|v| &v[1]);
    let lo = ys.clone().min()?.clone();
    let hi = ys.max()?.clone();
    Some((lo, hi))
}

/// Rows run along the last axis (`y`), so each row is one column of cells.
fn column_raster(poly: &ConvexPolygon, frame: &GridFrame, fill: Fill) -> Result<GridSet> {
    if frame.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: frame.dim() });
    }
    let h = frame.spacing().clone();
    let (ax, ay) = (&frame.anchor()[0], &frame.anchor()[1]);
    let (nx, ny) = (frame.extents()[0], frame.extents()[1]);
    let mut out = GridSet::empty(frame.clone(), Mode::Exact)?;
    let big = ny as i64 + 1;
    let floor = |v: &Rational| rational::floor_int(v).to_i64().map_or(if v.is_positive() { big } else { -1 }, |x| x.clamp(-1, big));
    let ceil = |v: &Rational| rational::ceil_int(v).to_i64().map_or(if v.is_positive() { big } else { -1 }, |x| x.clamp(-1, big));
    for i in 0..nx {
        let x0 = ax + &h * rational::int(i as i64);
        let x1 = &x0 + &h;
        let range = match fill {
            Fill::Touching => {
                let [a, b] = band(&x0, &x1);
                let q = poly.clip(&a).clip(&b);
                y_range(&q).map(|(lo, hi)| {
                    // Cell j meets [lo, hi] when y_j <= hi and y_j + h >= lo.
                    let j0 = ceil(&((&lo - ay) / &h - rational::int(1)));
                    let j1 = floor(&((&hi - ay) / &h));
                    (j0, j1)
                })
            }
            Fill::Inside => {
                let at = |x: &Rational| {
                    let line = ConvexPolygon::hull(&[[x.clone(), rational::int(-1) + ay], [x.clone(), ay + &h * rational::int(ny as i64 + 1)]]);
                    y_range(&poly.intersect(&line))
                };
                match (at(&x0), at(&x1)) {
                    (Some((l0, h0)), Some((l1, h1))) => {
                        let lo = l0.max(l1);
                        let hi = h0.min(h1);
                        // Cell j fits when y_j >= lo and y_j + h <= hi.
                        let j0 = ceil(&((&lo - ay) / &h));
                        let j1 = floor(&((&hi - ay) / &h - rational::int(1)));
                        Some((j0, j1))
                    }
                    _ => None,
                }
            }
        };
        if let Some((j0, j1)) = range {
            let j0 = j0.max(0);
            let j1 = j1.min(ny as i64 - 1);
            if j0 <= j1 {
                fill_range(out.row_mut(i), j0 as usize, j1 as usize + 1);
            }
        }
    }
    Ok(out)
}

enum Arcs {
    Count(usize),
    Everything,
}

/// Connected components of `F n boundary(K)` for an open convex `F`.
fn boundary_arcs(k: &ConvexPolygon, f: &ConvexPolygon) -> Arcs {
    let fv = f.half_planes();
    let v = k.vertices();
    let n = v.len();
    // Open parameter interval of each edge inside F, and whether it reaches
    // either endpoint.
    let mut spans: Vec<Option<(bool, bool)>> = Vec::with_capacity(n);
    for e in 0..n {
        let (a, b) = (&v[e], &v[(e + 1) % n]);
        let mut lo = rational::int(-1);
        let mut hi = rational::int(2);
        let mut empty = false;
        for h in &fv {
            let f0 = &h.normal[0] * &a[0] + &h.normal[1] * &a[1] - &h.offset;
            let f1 = &h.normal[0] * &b[0] + &h.normal[1] * &b[1] - &h.offset;
            let slope = &f1 - &f0;
            if slope.is_zero() {
                if !f0.is_negative() {
                    empty = true;
                }
                continue;
            }
            let t = -&f0 / &slope;
            if slope.is_positive() {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
        }
        let zero = Rational::zero();
        let one = rational::int(1);
        if empty || lo >= hi || hi <= zero || lo >= one {
            spans.push(None);
        } else {
            spans.push(Some((lo < zero, hi > one)));
        }
    }
    let count = spans.iter().filter(|s| s.is_some()).count();
    if count == 0 {
        return Arcs::Count(0);
    }
    let mut merges = 0;
    for e in 0..n {
        if let (Some((_, to_end)), Some((from_start, _))) = (spans[e], spans[(e + 1) % n]) {
            if to_end && from_start {
                merges += 1;
            }
        }
    }
    if merges == n {
        Arcs::Everything
    } else {
        Arcs::Count(count - merges)
    }
}

/// The inequality `area(M / k) <= area((M + gamma) / (k + 1))` for
/// `M = X[k] n k conv(gamma)` and a boundary bite's curve `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiteCheck {
    pub bite: usize,
    pub k: u64,
    #[serde(with = "crate::rational::as_str")]
    pub lhs: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub rhs: Rational,
    pub holds: bool,
}

pub fn bite_check(set: &PlanarSet, bite: usize, k: u64) -> Result<BiteCheck> {
    let gamma = set.gamma(bite);
    if gamma.is_empty() {
        return Err(bite_error(bite, "bite does not reach inside the outer polygon"));
    }
    let ends: Vec<P2> = gamma.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let kk = rational::int(k as i64);
    let window = ConvexPolygon::hull(&ends).scaled(&kk);
    let m: Vec<ConvexPolygon> = set
        .kfold_pieces(k)?
        .iter()
        .map(|p| p.intersect(&window))
        .filter(|p| !p.is_empty())
        .collect();
    let segments: Vec<ConvexPolygon> = gamma.iter().map(|(a, b)| ConvexPolygon::hull(&[a.clone(), b.clone()])).collect();
    let sums: Vec<ConvexPolygon> = m.iter().flat_map(|p| segments.iter().map(move |s| p.minkowski(s))).collect();
    let lhs = union_area(&m) / rational::pow(&kk, 2);
    let rhs = union_area(&prune_contained(sums)) / rational::pow(&rational::int(k as i64 + 1), 2);
    Ok(BiteCheck { bite, k, holds: lhs <= rhs, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn poly(pts: &[(Rational, Rational)]) -> ConvexPolygon {
        ConvexPolygon::hull(&pts.iter().map(|(x, y)| [x.clone(), y.clone()]).collect::<Vec<_>>())
    }

    fn square() -> ConvexPolygon {
        poly(&[(int(0), int(0)), (int(1), int(0)), (int(1), int(1)), (int(0), int(1))])
    }

    #[test]
    fn no_bites_is_convex() {
        let x = PlanarSet::new(square(), vec![]).unwrap();
        for k in 1..=4 {
            assert_eq!(x.kfold_area(k).unwrap(), int(1));
        }
    }

    #[test]
    fn interior_hole_fills_from_two() {
        let hole = poly(&[(rat(1, 4), rat(1, 4)), (rat(3, 4), rat(1, 4)), (rat(1, 2), rat(3, 4))]);
        let x = PlanarSet::new(square(), vec![hole]).unwrap();
        assert!(x.boundary_bites().is_empty());
        assert_eq!(x.kfold_area(1).unwrap(), int(1) - rat(1, 8));
        for k in 2..=4 {
            assert_eq!(x.kfold_area(k).unwrap(), int(1));
        }
    }

    #[test]
    fn corner_notch_areas_increase() {
        // Removing the open square (1/2, 3/2)^2 leaves an L.
        let bite = poly(&[(rat(1, 2), rat(1, 2)), (rat(3, 2), rat(1, 2)), (rat(3, 2), rat(3, 2)), (rat(1, 2), rat(3, 2))]);
        let x = PlanarSet::new(square(), vec![bite]).unwrap();
        assert_eq!(x.boundary_bites(), vec![0]);
        assert_eq!(x.kfold_area(1).unwrap(), rat(3, 4));
        assert_eq!(x.kfold_area(2).unwrap(), rat(13, 16));
        let mut prev = x.kfold_area(2).unwrap();
        for k in 3..=5 {
            let a = x.kfold_area(k).unwrap();
            assert!(a > prev);
            assert!(a < rat(7, 8));
            prev = a;
        }
    }

    #[test]
    fn grid_brackets_exact_area() {
        let bite = poly(&[(rat(1, 2), rat(3, 10)), (rat(3, 2), rat(3, 10)), (rat(3, 2), rat(3, 2)), (rat(1, 2), rat(3, 2))]);
        let x = PlanarSet::new(square(), vec![bite]).unwrap();
        for k in 1..=3 {
            let exact = x.kfold_area(k).unwrap();
            let b = x.grid_bounds(k, &rat(1, 32), 1 << 24).unwrap();
            assert!(b.contains(&exact), "k={k} {exact} not in {b:?}");
        }
    }

    #[test]
    fn rasters_of_a_triangle() {
        let tri = poly(&[(int(0), int(0)), (int(1), int(0)), (int(0), int(1))]);
        let x = PlanarSet::new(tri, vec![]).unwrap();
        let frame = x.frame(&rat(1, 8)).unwrap();
        let (inner, outer) = x.rasters(&frame).unwrap();
        // Cells with i + j <= 6 lie inside; cells with i + j <= 7 touch.
        assert_eq!(inner.count(), 28);
        assert_eq!(outer.count(), 36 + 7);
        assert!(inner.is_subset(&outer).unwrap());
    }

    #[test]
    fn bite_validation() {
        let a = poly(&[(rat(1, 4), rat(-1, 4)), (rat(3, 4), rat(-1, 4)), (rat(1, 2), rat(1, 2))]);
        let b = poly(&[(rat(1, 2), rat(1, 4)), (rat(3, 2), rat(1, 4)), (int(1), int(1))]);
        assert!(matches!(PlanarSet::new(square(), vec![a.clone(), b]), Err(Error::OverlappingBites { first: 0, second: 1 })));
        // A slab crossing the square meets its boundary twice.
        let slab = poly(&[(rat(-1, 2), rat(1, 4)), (rat(3, 2), rat(1, 4)), (rat(3, 2), rat(1, 2)), (rat(-1, 2), rat(1, 2))]);
        assert!(PlanarSet::new(square(), vec![slab]).is_err());
        let huge = poly(&[(int(-1), int(-1)), (int(2), int(-1)), (int(2), int(2)), (int(-1), int(2))]);
        assert!(PlanarSet::new(square(), vec![huge]).is_err());
        assert!(PlanarSet::new(square(), vec![a]).is_ok());
    }

    #[test]
    fn notch_lemma_holds() {
        let notch = poly(&[(rat(3, 10), rat(-1, 10)), (rat(7, 10), rat(-1, 10)), (rat(1, 2), rat(2, 5))]);
        let x = PlanarSet::new(square(), vec![notch]).unwrap();
        assert_eq!(x.gamma(0).len(), 2);
        for k in 2..=4 {
            let c = bite_check(&x, 0, k).unwrap();
            assert!(c.holds, "{c:?}");
        }
    }
}
