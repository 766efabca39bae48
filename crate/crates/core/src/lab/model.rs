//! Evaluation of a [`SetSpec`]: certified brackets for `vol(A[k] / k)`, the
//! hull volume, and rasters for Hausdorff measurements.

use num_traits::{Signed, ToPrimitive, Zero};

use super::planar::PlanarSet;
use crate::counterexamples::{union_volume, AxisBox};
use crate::error::{Error, Result};
use crate::geometry::polygon::{union_area, ConvexPolygon};
use crate::geometry::{affine_dim, compositions, hull, zonotope_from_composition, Point, PointHull, Spider};
use crate::grid::kfold::{kfold_bounds_with, kfold_raster, KfoldOptions, ScanMode};
use crate::grid::{box_self_sum, hausdorff, rasterize_touching, GridFrame, GridSet, VolumeBound};
use crate::rational::{self, Rational};
use crate::spec::SetSpec;

/// Largest k-fold box list the exact box route will sweep.
pub const MAX_SUM_BOXES: usize = 4096;

/// Planar spiders with more tips skip the exact zonotope-union route.
pub const MAX_EXACT_TIPS: usize = 12;

#[derive(Debug, Clone)]
pub enum Model {
    Spider(Spider),
    /// The convex hull of the points.
    Hull(Vec<Point>),
    /// Union of boxes; `factor` is the `|det|` of affine maps that could not
    /// be applied to boxes directly.
    Boxes { boxes: Vec<AxisBox>, factor: Rational },
    Planar(PlanarSet),
}

/// One measurement of `vol(A[k] / k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    /// Bracket used for verdicts: the grid bracket tightened by the exact
    /// value when both exist.
    pub bound: VolumeBound,
    pub grid: Option<VolumeBound>,
    pub exact: Option<Rational>,
}

fn map_point(m: &[Point], t: &[Rational], p: &[Rational]) -> Point {
    m.iter().zip(t).map(|(row, ti)| crate::geometry::dot(row, p) + ti).collect()
}

impl Model {
    pub fn from_spec(spec: &SetSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec {
            SetSpec::Spider { apex, tips, .. } => Self::Spider(Spider::new(apex.clone(), tips.clone())?),
            SetSpec::Hull { points, .. } => Self::Hull(points.clone()),
            SetSpec::BoxUnion { boxes, .. } => Self::Boxes {
                boxes: boxes.iter().map(|b| AxisBox::new(b.lo.clone(), b.hi.clone())).collect::<Result<_>>()?,
                factor: rational::int(1),
            },
            SetSpec::PlanarHoles { outer, bites, .. } => {
                Self::Planar(PlanarSet::from_rational(&outer.0, &bites.iter().map(|b| b.0.clone()).collect::<Vec<_>>())?)
            }
            SetSpec::Affine { matrix, translation, inner, .. } => {
                Self::from_spec(inner)?.mapped(matrix, translation)?
            }
        })
    }

    fn mapped(self, m: &[Point], t: &[Rational]) -> Result<Self> {
        Ok(match self {
            Self::Spider(s) => Self::Spider(s.transformed(m, t)?),
            Self::Hull(points) => Self::Hull(points.iter().map(|p| map_point(m, t, p)).collect()),
            Self::Boxes { boxes, factor } => {
                Self::Boxes { boxes, factor: factor * rational::abs(&crate::geometry::determinant(m)) }
            }
            Self::Planar(p) => Self::Planar(p.mapped(m, t)?),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Spider(s) => s.dim(),
            Self::Hull(p) => p[0].len(),
            Self::Boxes { boxes, .. } => boxes[0].dim(),
            Self::Planar(_) => 2,
        }
    }

    /// Points whose hull is `conv A`.
    pub fn hull_points(&self) -> Vec<Point> {
        match self {
            Self::Spider(s) => s.vertices(),
            Self::Hull(p) => p.clone(),
            Self::Boxes { boxes, .. } => boxes
                .iter()
                .flat_map(|b| {
                    let d = b.dim();
                    (0..1usize << d).map(move |mask| {
                        (0..d).map(|j| if mask >> j & 1 == 1 { b.hi[j].clone() } else { b.lo[j].clone() }).collect()
                    })
                })
                .collect(),
            Self::Planar(p) => p.vertices(),
        }
    }

    pub fn is_dim_deficient(&self) -> bool {
        affine_dim(&self.hull_points()) < self.dim()
    }

    /// Exact `vol(conv A)` where available (dimension at most 3).
    pub fn hull_volume(&self) -> Option<Rational> {
        let v = hull::hull_volume(&self.hull_points()).ok()?;
        Some(match self {
            Self::Boxes { factor, .. } => v * factor,
            _ => v,
        })
    }

    /// Whether the model carries its true geometry (Hausdorff distances are
    /// not affine invariant, so boxes behind a map do not).
    pub fn has_geometry(&self) -> bool {
        match self {
            Self::Boxes { factor, .. } => factor == &rational::int(1),
            _ => true,
        }
    }

    /// Grid frame of spacing `h` around the set.
    pub fn frame(&self, h: &Rational) -> Result<GridFrame> {
        let (lo, hi) = crate::geometry::bounding_box(&self.hull_points());
        GridFrame::covering(&lo, &hi, h)
    }

    /// Exact value where a closed form route exists.
    pub fn exact(&self, k: u64) -> Result<Option<Rational>> {
        let kd = rational::pow(&rational::int(k as i64), self.dim() as u32);
        Ok(match self {
            Self::Hull(points) => Some(hull::hull_volume(points)?),
            Self::Boxes { boxes, factor } => Some(union_volume(&kfold_boxes(boxes, k)?)? / kd * factor),
            Self::Planar(p) => match p.kfold_area(k) {
                Ok(a) => Some(a),
                Err(Error::Unsupported(_)) => None,
                Err(e) => return Err(e),
            },
            Self::Spider(s) if s.dim() == 2 && s.tips().len() <= MAX_EXACT_TIPS => {
                let count = crate::combinatorics::binomial(k + s.tips().len() as u64 - 1, k);
                if count > num_bigint::BigUint::from(MAX_SUM_BOXES) {
                    None
                } else {
                    Some(spider_area(s, k)? / kd)
                }
            }
            // d tips in general position: an affine image of the axis spider.
            Self::Spider(s) if s.tips().len() == s.dim() && s.affine_dim() == s.dim() => {
                let rows: Vec<Point> = s.tips().iter().map(|t| crate::geometry::sub(t, s.apex())).collect();
                Some(crate::combinatorics::simplex_spider_volume(s.dim(), k)? * crate::geometry::determinant(&rows).abs())
            }
            Self::Spider(_) => None,
        })
    }

    pub fn has_grid_route(&self) -> bool {
        matches!(self, Self::Spider(_) | Self::Planar(_))
    }

    /// Grid bracket at spacing `h`, where the model has a grid route.
    pub fn grid(&self, k: u64, h: &Rational, cap: u64) -> Result<Option<VolumeBound>> {
        Ok(match self {
            Self::Spider(s) => {
                let opts = KfoldOptions { cap, dilation_route: false };
                Some(kfold_bounds_with(s, k, &self.frame(h)?, &opts)?.bound)
            }
            Self::Planar(p) => Some(p.grid_bounds(k, h, cap)?),
            _ => None,
        })
    }

    pub fn measure(&self, k: u64, h: &Rational, cap: u64, exact: Option<&Rational>) -> Result<Measured> {
        if k == 0 {
            return Err(Error::OutOfDomain("k must be at least 1".into()));
        }
        let grid = self.grid(k, h, cap)?;
        let bound = match (&grid, exact) {
            (Some(g), Some(e)) => g.tighten(&VolumeBound::exact(e.clone())),
            (Some(g), None) => g.clone(),
            (None, Some(e)) => VolumeBound::exact(e.clone()),
            (None, None) => return Err(Error::Unsupported("no route for this set".into())),
        };
        Ok(Measured { bound, grid, exact: exact.cloned() })
    }

    /// `d_H((1/k) A[k], conv A)` from touching rasters on the k-space lattice
    /// of spacing `h`, with the discretisation slack `2 h sqrt(d) / k`.
    pub fn hausdorff(&self, k: u64, h: &Rational, cap: u64, tol: f64) -> Result<Option<(f64, f64)>> {
        if !self.has_geometry() {
            return Ok(None);
        }
        let d = self.dim();
        let base = self.frame(h)?;
        let frame = base.scaled(k)?;
        if frame.cell_count() > u128::from(cap) {
            return Err(Error::CellCap { requested: frame.cell_count(), cap });
        }
        let kk = rational::int(k as i64);
        let set: GridSet = match self {
            Self::Spider(s) => kfold_raster(s, k, &base, ScanMode::Touching, cap)?,
            Self::Hull(_) => return Ok(Some((0.0, 0.0))),
            Self::Boxes { boxes, .. } => box_raster(&kfold_boxes(boxes, k)?, &frame)?,
            Self::Planar(p) => {
                let (_, outer) = p.rasters(&base)?;
                box_self_sum(&outer, k, cap)?
            }
        };
        let hull_pts: Vec<Point> = self.hull_points().iter().map(|p| crate::geometry::scale(p, &kk)).collect();
        let body = PointHull::from_rational(&hull_pts)?;
        let conv = rasterize_touching(&body, set.frame(), tol)?;
        let dist = hausdorff(&set, &conv)? / k as f64;
        let slack = 2.0 * rational::to_f64(h) * (d as f64).sqrt() / k as f64;
        Ok(Some((dist, slack)))
    }
}

/// Area of the union of the composition zonotopes of a planar spider.
pub fn spider_area(s: &Spider, k: u64) -> Result<Rational> {
    let polys: Vec<ConvexPolygon> = compositions(k, s.tips().len())?
        .iter()
        .map(|c| {
            let z = zonotope_from_composition(s, c)?;
            let mut pts = vec![z.base().clone()];
            for g in z.generators() {
                let shifted: Vec<Point> = pts.iter().map(|p| crate::geometry::add(p, g)).collect();
                pts.extend(shifted);
            }
            Ok(ConvexPolygon::from_rational(&pts))
        })
        .collect::<Result<_>>()?;
    if polys.iter().all(ConvexPolygon::is_degenerate) {
        return Ok(Rational::zero());
    }
    Ok(union_area(&crate::geometry::polygon::prune_contained(polys)))
}

/// Boxes of `A[k]`, with boxes inside another dropped.
pub fn kfold_boxes(boxes: &[AxisBox], k: u64) -> Result<Vec<AxisBox>> {
    if k == 0 {
        return Err(Error::OutOfDomain("k must be at least 1".into()));
    }
    let prune = |mut v: Vec<AxisBox>| -> Result<Vec<AxisBox>> {
        v.sort_by(|a, b| (&a.lo, &a.hi).cmp(&(&b.lo, &b.hi)));
        v.dedup();
        let kept: Vec<AxisBox> = v
            .iter()
            .enumerate()
            .filter(|(i, b)| {
                !v.iter().enumerate().any(|(j, o)| j != *i && o != *b && o.contains(&b.lo) && o.contains(&b.hi))
            })
            .map(|(_, b)| b.clone())
            .collect();
        if kept.len() > MAX_SUM_BOXES {
            return Err(Error::TooManyBoxes { count: kept.len(), cap: MAX_SUM_BOXES });
        }
        Ok(kept)
    };
    let mut acc = prune(boxes.to_vec())?;
    for _ in 1..k {
        acc = prune(crate::counterexamples::sum_unions(&acc, boxes))?;
    }
    Ok(acc)
}

/// Cells meeting any of the closed boxes.
fn box_raster(boxes: &[AxisBox], frame: &GridFrame) -> Result<GridSet> {
    let h = frame.spacing();
    let d = frame.dim();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for b in boxes {
        let ranges: Vec<(usize, usize)> = (0..d)
            .map(|j| {
                let lo = rational::ceil_int(&((&b.lo[j] - &frame.anchor()[j]) / h - rational::int(1)));
                let hi = rational::floor_int(&((&b.hi[j] - &frame.anchor()[j]) / h));
                let e = frame.extents()[j] as i64 - 1;
                (lo.to_i64().unwrap_or(0).clamp(0, e) as usize, hi.to_i64().unwrap_or(e).clamp(0, e) as usize)
            })
            .collect();
        let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            cells.push(idx.clone());
            for j in 0..d {
                if idx[j] < ranges[j].1 {
                    idx[j] += 1;
                    continue 'outer;
                }
                idx[j] = ranges[j].0;
            }
            break;
        }
    }
    GridSet::from_cells(frame.clone(), crate::grid::Mode::Outer, cells.iter().map(|c| c.as_slice()))
}
