//! Exact line scans of `B[k]` for a spider `B`.
//!
//! `B[k]` is the union over compositions `t` of the zonotopes
//! `k apex + sum_i t_i [0, tip_i - apex]`. In integer grid units each one
//! has an exact facet description, so for every line of cells along the
//! last axis the cells inside a zonotope (or meeting it) form an integer
//! interval that can be computed without floating point.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{fill_range, raster, row_count, row_multi_index, GridFrame, GridSet, Mode, VolumeBound, DEFAULT_CELL_CAP};
use crate::error::{Error, Result};
use crate::geometry::{compositions, rank, Spider};
use crate::par;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    /// Cells contained in a single full-dimensional composition zonotope.
    Inner,
    /// Cells whose interior meets a full-dimensional composition zonotope;
    /// covers `B[k]` up to a null set.
    Interior,
    /// Cells whose closed box meets any composition zonotope.
    Touching,
}

#[derive(Debug, Clone)]
pub struct KfoldOptions {
    pub cap: u64,
    /// Also bound from above by the box-sum of the supercover raster.
    pub dilation_route: bool,
}

impl Default for KfoldOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CELL_CAP, dilation_route: true }
    }
}

/// Details behind a k-fold bound; counts are cells of the k-space frame.
#[derive(Debug, Clone, PartialEq)]
pub struct KfoldBounds {
    pub bound: VolumeBound,
    pub inner_cells: u64,
    pub interior_cells: u64,
    pub dilation_cells: Option<u64>,
}

/// Certified bracket for `vol(B[k] / k)` on the lattice of `frame`, which
/// must contain the spider.
pub fn kfold_volume_bounds(spider: &Spider, k: u64, frame: &GridFrame) -> Result<VolumeBound> {
    Ok(kfold_bounds_with(spider, k, frame, &KfoldOptions::default())?.bound)
}

pub fn kfold_bounds_with(spider: &Spider, k: u64, frame: &GridFrame, opts: &KfoldOptions) -> Result<KfoldBounds> {
    let scan = Scan::new(spider, k, frame, opts.cap)?;
    let inner_cells = scan.count(ScanMode::Inner);
    let interior_cells = scan.count(ScanMode::Interior);
    let scale = frame.cell_volume() / rational::pow(&Rational::from_integer(k.into()), frame.dim() as u32);
    let mut upper_cells = interior_cells;
    let mut dilation_cells = None;
    if opts.dilation_route {
        let outer = raster::rasterize_spider(spider, frame)?;
        let sum = super::dilate::box_self_sum(&outer, k, opts.cap)?;
        let c = sum.count();
        dilation_cells = Some(c);
        upper_cells = upper_cells.min(c);
    }
    let bound = VolumeBound::new(
        Rational::from_integer(inner_cells.into()) * &scale,
        Rational::from_integer(upper_cells.into()) * &scale,
    )?;
    Ok(KfoldBounds { bound, inner_cells, interior_cells, dilation_cells })
}

/// Raster of `B[k]` on the k-space frame `k * frame` (anchor scaled, same
/// spacing).
pub fn kfold_raster(spider: &Spider, k: u64, frame: &GridFrame, mode: ScanMode, cap: u64) -> Result<GridSet> {
    Scan::new(spider, k, frame, cap)?.raster(mode)
}

/// Cells of `B[k]` under `mode`, without materialising a grid.
pub fn kfold_count(spider: &Spider, k: u64, frame: &GridFrame, mode: ScanMode, cap: u64) -> Result<u64> {
    Ok(Scan::new(spider, k, frame, cap)?.count(mode))
}

struct Facet {
    normal: Vec<i128>,
    lo: i128,
    hi: i128,
}

struct Piece {
    full_dim: bool,
    /// Facets of the zonotope itself (full-dimensional pieces only).
    facets: Vec<Facet>,
    /// Facets of the zonotope plus the cell box `[-D, 0]^d`.
    padded: Vec<Facet>,
    bbox: (Vec<i128>, Vec<i128>),
    padded_bbox: (Vec<i128>, Vec<i128>),
}

struct Scan {
    frame: GridFrame,
    unit: i128,
    pieces: Vec<Piece>,
}

fn to_i128(q: &Rational) -> Result<i128> {
    if !q.is_integer() {
        return Err(Error::OutOfDomain("non-integral scaled coordinate".into()));
    }
    q.to_integer().to_i128().ok_or_else(|| Error::Unsupported("coordinates too large for exact scan".into()))
}

impl Scan {
    fn new(spider: &Spider, k: u64, frame: &GridFrame, cap: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfDomain("k must be at least 1".into()));
        }
        let d = frame.dim();
        if spider.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: spider.dim() });
        }
        for p in spider.vertices() {
            if !frame.contains_point(&p) {
                return Err(Error::OutsideFrame("spider leaves the frame".into()));
            }
        }
        let kframe = frame.scaled(k)?;
        let requested = kframe.cell_count();
        if requested > u128::from(cap) {
            return Err(Error::CellCap { requested, cap });
        }
        let h = frame.spacing();
        let apex_off: Vec<Rational> = spider.apex().iter().zip(frame.anchor()).map(|(x, a)| (x - a) / h).collect();
        let arms: Vec<Vec<Rational>> = spider.arms().iter().map(|v| v.iter().map(|x| x / h).collect()).collect();
        let unit = rational::lcm_denominators(apex_off.iter().chain(arms.iter().flatten()));
        let unit_r = Rational::from_integer(unit.clone());
        let unit = unit.to_i128().filter(|&u| u < 1 << 40).ok_or_else(|| Error::Unsupported("lattice too fine for exact scan".into()))?;
        let base_unit: Vec<i128> = apex_off.iter().map(|x| to_i128(&(x * &unit_r))).collect::<Result<_>>()?;
        let arm_units: Vec<Vec<i128>> = arms
            .iter()
            .map(|v| v.iter().map(|x| to_i128(&(x * &unit_r))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;

        let k_i = k as i128;
        let pieces = compositions(k, arm_units.len())?
            .into_iter()
            .map(|c| {
                let base: Vec<i128> = base_unit.iter().map(|b| b * k_i).collect();
                let gens: Vec<Vec<i128>> = c
                    .parts()
                    .iter()
                    .zip(&arm_units)
                    .filter(|(&t, _)| t > 0)
                    .map(|(&t, v)| v.iter().map(|x| x * t as i128).collect())
                    .collect();
                Piece::new(base, gens, unit, d)
            })
            .collect();
        Ok(Self { frame: kframe, unit, pieces })
    }

    /// Merged cell intervals `[start, end)` of one line.
    fn line(&self, prefix: &[usize], mode: ScanMode) -> Vec<(usize, usize)> {
        let d = self.frame.dim();
        let n = self.frame.extents()[d - 1] as i128;
        let u = self.unit;
        let mut spans: Vec<(usize, usize)> = Vec::new();
        for piece in &self.pieces {
            let (facets, bbox, strict) = match mode {
                ScanMode::Inner | ScanMode::Interior if !piece.full_dim => continue,
                ScanMode::Inner => (&piece.facets, &piece.bbox, false),
                ScanMode::Interior => (&piece.padded, &piece.padded_bbox, true),
                ScanMode::Touching => (&piece.padded, &piece.padded_bbox, false),
            };
            let reject = prefix.iter().enumerate().any(|(j, &c)| {
                let lo = c as i128 * u;
                match mode {
                    ScanMode::Inner => lo < bbox.0[j] || lo + u > bbox.1[j],
                    _ => lo < bbox.0[j] || lo > bbox.1[j],
                }
            });
            if reject {
                continue;
            }
            let range = match mode {
                ScanMode::Inner => inner_range(facets, prefix, u),
                _ => point_range(facets, prefix, u, strict),
            };
            if let Some((a, b)) = range {
                let (a, b) = (a.max(0), b.min(n - 1));
                if a <= b {
                    spans.push((a as usize, b as usize + 1));
                }
            }
        }
        spans.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(spans.len());
        for (s, e) in spans {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        merged
    }

    fn count(&self, mode: ScanMode) -> u64 {
        let extents = self.frame.extents();
        par::sum_range(row_count(extents), |r| {
            let prefix = row_multi_index(extents, r);
            self.line(&prefix, mode).iter().map(|(s, e)| (e - s) as u64).sum()
        })
    }

    fn raster(&self, mode: ScanMode) -> Result<GridSet> {
        let tag = if mode == ScanMode::Inner { Mode::Inner } else { Mode::Outer };
        let empty = GridSet::empty(self.frame.clone(), tag)?;
        let words = empty.words_per_row();
        let extents = self.frame.extents();
        let rows = par::map_range(row_count(extents), |r| {
            let prefix = row_multi_index(extents, r);
            let mut row = vec![0u64; words];
            for (s, e) in self.line(&prefix, mode) {
                fill_range(&mut row, s, e);
            }
            row
        });
        Ok(GridSet::from_rows(self.frame.clone(), tag, rows))
    }
}

impl Piece {
    fn new(base: Vec<i128>, gens: Vec<Vec<i128>>, unit: i128, d: usize) -> Self {
        let full_dim = {
            let rows: Vec<Vec<Rational>> = gens
                .iter()
                .map(|g| g.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect();
            rank(&rows) == d
        };
        let facets = if full_dim { facets_of(&base, &gens, d) } else { Vec::new() };
        let bbox = bounds_of(&base, &gens);
        let mut padded_gens = gens.clone();
        for j in 0..d {
            let mut e = vec![0; d];
            e[j] = unit;
            padded_gens.push(e);
        }
        let padded_base: Vec<i128> = base.iter().map(|b| b - unit).collect();
        let padded = facets_of(&padded_base, &padded_gens, d);
        let padded_bbox = bounds_of(&padded_base, &padded_gens);
        Self { full_dim, facets, padded, bbox, padded_bbox }
    }
}

fn bounds_of(base: &[i128], gens: &[Vec<i128>]) -> (Vec<i128>, Vec<i128>) {
    let mut lo = base.to_vec();
    let mut hi = base.to_vec();
    for g in gens {
        for j in 0..g.len() {
            if g[j] < 0 {
                lo[j] += g[j];
            } else {
                hi[j] += g[j];
            }
        }
    }
    (lo, hi)
}

/// H-description of a full-dimensional zonotope: its facet normals are
/// among the normals of `(d-1)`-subsets of generators.
fn facets_of(base: &[i128], gens: &[Vec<i128>], d: usize) -> Vec<Facet> {
    let mut seen: HashSet<Vec<i128>> = HashSet::new();
    let mut out = Vec::new();
    for_each_subset(gens.len(), d - 1, &mut |idx| {
        let rows: Vec<&Vec<i128>> = idx.iter().map(|&i| &gens[i]).collect();
        let Some(n) = normalise(cross(&rows, d)) else {
            return;
        };
        if !seen.insert(n.clone()) {
            return;
        }
        let b = dot(base, &n);
        let (mut lo, mut hi) = (b, b);
        for g in gens {
            let s = dot(g, &n);
            if s < 0 {
                lo += s;
            } else {
                hi += s;
            }
        }
        out.push(Facet { normal: n, lo, hi });
    });
    out
}

fn for_each_subset(n: usize, r: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == r {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, f);
            cur.pop();
        }
    }
    rec(0, n, r, &mut Vec::with_capacity(r), f);
}

/// Generalised cross product of `d - 1` vectors in `Z^d`.
fn cross(rows: &[&Vec<i128>], d: usize) -> Vec<i128> {
    (0..d)
        .map(|j| {
            let minor: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let det = det_bareiss(minor);
            if j % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

/// Fraction-free integer determinant.
fn det_bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for c in 0..n - 1 {
        if m[c][c] == 0 {
            let Some(p) = (c + 1..n).find(|&i| m[i][c] != 0) else {
                return 0;
            };
            m.swap(c, p);
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                m[i][j] = (m[i][j] * m[c][c] - m[i][c] * m[c][j]) / prev;
            }
        }
        prev = m[c][c];
    }
    sign * m[n - 1][n - 1]
}

fn normalise(n: Vec<i128>) -> Option<Vec<i128>> {
    let g = n.iter().fold(0i128, |acc, &x| acc.gcd(&x));
    if g.is_zero() {
        return None;
    }
    let first = *n.iter().find(|&&x| x != 0).expect("nonzero");
    let s = if first < 0 { -g } else { g };
    Some(n.into_iter().map(|x| x / s).collect())
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&-a, &b)
}

/// Integer `x` with `(u prefix, u x)` in the polytope (closed or open).
fn point_range(facets: &[Facet], prefix: &[usize], u: i128, strict: bool) -> Option<(i128, i128)> {
    let d = prefix.len() + 1;
    let (mut xlo, mut xhi) = (i128::MIN, i128::MAX);
    for f in facets {
        let s: i128 = prefix.iter().zip(&f.normal).map(|(&c, &n)| n * c as i128 * u).sum();
        let nd = f.normal[d - 1];
        if nd == 0 {
            let ok = if strict { f.lo < s && s < f.hi } else { f.lo <= s && s <= f.hi };
            if !ok {
                return None;
            }
            continue;
        }
        let (lo, hi, nd) = if nd > 0 { (f.lo - s, f.hi - s, nd) } else { (s - f.hi, s - f.lo, -nd) };
        let q = nd * u;
        if strict {
            xlo = xlo.max(floor_div(lo, q) + 1);
            xhi = xhi.min(ceil_div(hi, q) - 1);
        } else {
            xlo = xlo.max(ceil_div(lo, q));
            xhi = xhi.min(floor_div(hi, q));
        }
        if xlo > xhi {
            return None;
        }
    }
    Some((xlo, xhi))
}

/// Integer `x` such that every corner of cell `(prefix, x)` lies in the
/// polytope.
fn inner_range(facets: &[Facet], prefix: &[usize], u: i128) -> Option<(i128, i128)> {
    let d = prefix.len() + 1;
    let (mut xlo, mut xhi) = (i128::MIN, i128::MAX);
    for f in facets {
        let base: i128 = prefix.iter().zip(&f.normal).map(|(&c, &n)| n * c as i128 * u).sum();
        // Extremes of the prefix part over the 2^(d-1) corner offsets.
        let mut smin = base;
        let mut smax = base;
        for &n in &f.normal[..d - 1] {
            if n < 0 {
                smin += n * u;
            } else {
                smax += n * u;
            }
        }
        let nd = f.normal[d - 1];
        if nd == 0 {
            if smin < f.lo || smax > f.hi {
                return None;
            }
            continue;
        }
        // Need lo <= s + nd u y <= hi for s in {smin, smax}, y in {x, x+1}.
        let (lo, hi, nd) = if nd > 0 { (f.lo - smin, f.hi - smax, nd) } else { (smax - f.hi, smin - f.lo, -nd) };
        let q = nd * u;
        xlo = xlo.max(ceil_div(lo, q));
        xhi = xhi.min(floor_div(hi, q) - 1);
        if xlo > xhi {
            return None;
        }
    }
    Some((xlo, xhi))
}
