//! Binary voxel sets with rational anchor and spacing.
//!
//! Cell `i` of a frame is the box `anchor + h [i, i + 1]` (componentwise).
//! Occupancy is stored row by row along the last axis, 64 cells per word,
//! least significant bit first.

pub mod boundary;
pub mod dilate;
pub mod edt;
pub mod kfold;
pub mod raster;
pub mod stream;

pub use boundary::{boundary_cells, components, exterior_boundary, Connectivity};
pub use dilate::{block, box_sum, box_self_sum, dilate, dilate_iterated, dilate_with, self_sum, Kernel};
pub use edt::{distance_transform, hausdorff, hausdorff_sq_cells, DistanceField};
pub use kfold::{kfold_raster, kfold_volume_bounds, KfoldOptions, ScanMode};
pub use raster::{rasterize_convex, rasterize_segment, rasterize_spider, rasterize_touching};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rational::{self, Rational};

pub const DEFAULT_CELL_CAP: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every occupied cell lies inside the represented set.
    Inner,
    /// Every point of the set lies in some occupied cell.
    Outer,
    /// The set is exactly the union of the occupied cells.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFrame {
    #[serde(with = "crate::rational::vec_str")]
    anchor: Point,
    #[serde(with = "crate::rational::as_str")]
    spacing: Rational,
    extents: Vec<usize>,
}

impl GridFrame {
    pub fn new(anchor: Point, spacing: Rational, extents: Vec<usize>) -> Result<Self> {
        if anchor.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if anchor.len() != extents.len() {
            return Err(Error::DimensionMismatch { expected: anchor.len(), found: extents.len() });
        }
        if !spacing.is_positive() {
            return Err(Error::OutOfDomain("spacing must be positive".into()));
        }
        if extents.iter().any(|&e| e == 0) {
            return Err(Error::OutOfDomain("extents must be positive".into()));
        }
        Ok(Self { anchor, spacing, extents })
    }

    /// Smallest frame of spacing `h` with anchor on the lattice `h Z^d`
    /// whose box contains `[lo, hi]`.
    pub fn covering(lo: &[Rational], hi: &[Rational], spacing: &Rational) -> Result<Self> {
        let anchor: Point = lo
            .iter()
            .map(|l| Rational::from_integer(rational::floor_int(&(l / spacing))) * spacing)
            .collect();
        let extents = hi
            .iter()
            .zip(&anchor)
            .map(|(h, a)| {
                let cells = rational::ceil_int(&((h - a) / spacing)).to_usize().unwrap_or(usize::MAX);
                cells.max(1)
            })
            .collect();
        Self::new(anchor, spacing.clone(), extents)
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn spacing(&self) -> &Rational {
        &self.spacing
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn cell_count(&self) -> u128 {
        self.extents.iter().map(|&e| e as u128).product()
    }

    pub fn cell_volume(&self) -> Rational {
        rational::pow(&self.spacing, self.dim() as u32)
    }

    /// `h sqrt(d)`, the diameter of one cell.
    pub fn diagonal(&self) -> f64 {
        rational::to_f64(&self.spacing) * (self.dim() as f64).sqrt()
    }

    /// Far corner of the frame box.
    pub fn upper_corner(&self) -> Point {
        self.anchor
            .iter()
            .zip(&self.extents)
            .map(|(a, &e)| a + &self.spacing * Rational::from_integer(e.into()))
            .collect()
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        let hi = self.upper_corner();
        p.iter().zip(self.anchor.iter().zip(&hi)).all(|(x, (a, b))| a <= x && x <= b)
    }

    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        let h = rational::to_f64(&self.spacing);
        idx.iter()
            .zip(&self.anchor)
            .map(|(&i, a)| rational::to_f64(a) + h * (i as f64 + 0.5))
            .collect()
    }

    pub fn cell_corner(&self, idx: &[usize]) -> Vec<f64> {
        let h = rational::to_f64(&self.spacing);
        idx.iter()
            .zip(&self.anchor)
            .map(|(&i, a)| rational::to_f64(a) + h * i as f64)
            .collect()
    }

    /// The same lattice scaled by `factor` about the origin: anchor and
    /// extents multiplied, spacing kept.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let f = Rational::from_integer(factor.into());
        let extents = self
            .extents
            .iter()
            .map(|&e| e.checked_mul(factor as usize).ok_or(Error::CellCap { requested: u128::MAX, cap: 0 }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.anchor.iter().map(|a| a * &f).collect(), self.spacing.clone(), extents)
    }

    /// Whether the anchor sits on the lattice `h Z^d`.
    pub fn is_lattice_anchored(&self) -> bool {
        self.anchor.iter().all(|a| (a / &self.spacing).is_integer())
    }

    fn check_cap(&self, cap: u64) -> Result<()> {
        let requested = self.cell_count();
        if requested > u128::from(cap) {
            return Err(Error::CellCap { requested, cap });
        }
        Ok(())
    }
}

/// Certified bracket `lower <= value <= upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeBound {
    #[serde(with = "crate::rational::as_str")]
    pub lower: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub upper: Rational,
}

impl VolumeBound {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self> {
        if lower.is_negative() || lower > upper {
            return Err(Error::OutOfDomain(format!(
                "invalid volume bound [{}, {}]",
                rational::format(&lower),
                rational::format(&upper)
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn exact(v: Rational) -> Self {
        Self { lower: v.clone(), upper: v }
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lower <= v && v <= &self.upper
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self { lower: &self.lower * factor, upper: &self.upper * factor }
    }

    /// Intersection of two valid brackets for the same quantity.
    pub fn tighten(&self, other: &Self) -> Self {
        Self {
            lower: self.lower.clone().max(other.lower.clone()),
            upper: self.upper.clone().min(other.upper.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSet {
    frame: GridFrame,
    mode: Mode,
    words: usize,
    bits: Vec<u64>,
}

impl GridSet {
    pub fn empty(frame: GridFrame, mode: Mode) -> Result<Self> {
        Self::empty_capped(frame, mode, DEFAULT_CELL_CAP)
    }

    pub fn empty_capped(frame: GridFrame, mode: Mode, cap: u64) -> Result<Self> {
        frame.check_cap(cap)?;
        let words = frame.extents[frame.dim() - 1].div_ceil(64);
        let rows = row_count(&frame.extents);
        Ok(Self { frame, mode, words, bits: vec![0; rows * words] })
    }

    pub fn full(frame: GridFrame, mode: Mode) -> Result<Self> {
        let mut g = Self::empty(frame, mode)?;
        let n = g.row_len();
        for r in 0..g.rows() {
            fill_range(g.row_mut(r), 0, n);
        }
        Ok(g)
    }

    pub fn from_cells<'a>(frame: GridFrame, mode: Mode, cells: impl IntoIterator<Item = &'a [usize]>) -> Result<Self> {
        let mut g = Self::empty(frame, mode)?;
        for c in cells {
            g.insert(c)?;
        }
        Ok(g)
    }

    /// Assembles a set from finished rows (each `words` long).
    pub(crate) fn from_rows(frame: GridFrame, mode: Mode, rows: Vec<Vec<u64>>) -> Self {
        let words = frame.extents[frame.dim() - 1].div_ceil(64);
        let bits: Vec<u64> = rows.into_iter().flatten().collect();
        debug_assert_eq!(bits.len(), row_count(&frame.extents) * words);
        Self { frame, mode, words, bits }
    }

    pub fn frame(&self) -> &GridFrame {
        &self.frame
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn extents(&self) -> &[usize] {
        &self.frame.extents
    }

    pub fn rows(&self) -> usize {
        self.bits.len() / self.words.max(1)
    }

    pub fn row_len(&self) -> usize {
        self.frame.extents[self.dim() - 1]
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub(crate) fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn raw_words(&self) -> &[u64] {
        &self.bits
    }

    fn locate(&self, idx: &[usize]) -> Option<(usize, usize)> {
        if idx.len() != self.dim() || idx.iter().zip(self.extents()).any(|(&i, &e)| i >= e) {
            return None;
        }
        let d = self.dim();
        let mut r = 0usize;
        for j in 0..d - 1 {
            r = r * self.frame.extents[j] + idx[j];
        }
        Some((r, idx[d - 1]))
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        self.locate(idx)
            .is_some_and(|(r, x)| self.bits[r * self.words + x / 64] >> (x % 64) & 1 == 1)
    }

    /// Like [`contains`](Self::contains) but for possibly negative indices.
    pub fn contains_signed(&self, idx: &[i64]) -> bool {
        if idx.iter().any(|&i| i < 0) {
            return false;
        }
        let u: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
        self.contains(&u)
    }

    pub fn insert(&mut self, idx: &[usize]) -> Result<()> {
        let (r, x) = self
            .locate(idx)
            .ok_or_else(|| Error::OutsideFrame(format!("cell {idx:?}")))?;
        self.bits[r * self.words + x / 64] |= 1 << (x % 64);
        Ok(())
    }

    pub fn remove(&mut self, idx: &[usize]) {
        if let Some((r, x)) = self.locate(idx) {
            self.bits[r * self.words + x / 64] &= !(1 << (x % 64));
        }
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn volume(&self) -> Rational {
        Rational::from_integer(self.count().into()) * self.frame.cell_volume()
    }

    /// Multi-index of row `r` over the first `d - 1` axes.
    pub fn row_index(&self, r: usize) -> Vec<usize> {
        row_multi_index(&self.frame.extents, r)
    }

    /// Occupied cells in row-major order.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for r in 0..self.rows() {
            let prefix = self.row_index(r);
            for x in row_bits(self.row(r)) {
                let mut c = prefix.clone();
                c.push(x);
                out.push(c);
            }
        }
        out
    }

    /// Cellwise union; frames must agree.
    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { frame: self.frame.clone(), mode: self.mode, words: self.words, bits })
    }

    /// Copies the set into a larger frame on the same lattice. Cells that
    /// fall outside the target are an error.
    pub fn embed(&self, target: &GridFrame) -> Result<Self> {
        if target.spacing != self.frame.spacing || target.dim() != self.dim() {
            return Err(Error::SpacingMismatch);
        }
        let mut offset = Vec::with_capacity(self.dim());
        for (a, b) in self.frame.anchor.iter().zip(&target.anchor) {
            let shift = (a - b) / &self.frame.spacing;
            if !shift.is_integer() {
                return Err(Error::FrameMismatch);
            }
            offset.push(shift.to_integer().to_i64().ok_or(Error::FrameMismatch)?);
        }
        let mut out = Self::empty(target.clone(), self.mode)?;
        for c in self.cells() {
            let moved: Vec<usize> = c
                .iter()
                .zip(&offset)
                .map(|(&i, &o)| usize::try_from(i as i64 + o).map_err(|_| Error::OutsideFrame(format!("cell {c:?}"))))
                .collect::<Result<_>>()?;
            out.insert(&moved)?;
        }
        Ok(out)
    }
}

pub(crate) fn row_count(extents: &[usize]) -> usize {
    extents[..extents.len() - 1].iter().product()
}

pub(crate) fn row_multi_index(extents: &[usize], mut r: usize) -> Vec<usize> {
    let d = extents.len();
    let mut idx = vec![0; d - 1];
    for j in (0..d - 1).rev() {
        idx[j] = r % extents[j];
        r /= extents[j];
    }
    idx
}

pub(crate) fn row_linear_index(extents: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(extents).fold(0, |acc, (&i, &e)| acc * e + i)
}

/// Positions of set bits in a row.
pub fn row_bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + b)
        })
    })
}

/// Maximal runs `[start, end)` of set bits in a row.
pub fn row_runs(row: &[u64]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let total = row.len() * 64;
    let mut x = 0;
    while x < total {
        let w = x / 64;
        let word = row[w] >> (x % 64);
        if word == 0 {
            x = (w + 1) * 64;
            continue;
        }
        let start = x + word.trailing_zeros() as usize;
        let mut end = start;
        loop {
            let w = end / 64;
            if w >= row.len() {
                break;
            }
            let ones = (!(row[w] >> (end % 64))).trailing_zeros() as usize;
            let ones = ones.min(64 - end % 64);
            end += ones;
            if end % 64 != 0 || ones == 0 {
                break;
            }
        }
        runs.push((start, end));
        x = end;
    }
    runs
}

/// Sets bits `[start, end)`.
pub(crate) fn fill_range(row: &mut [u64], start: usize, end: usize) {
    if start >= end {
        return;
    }
    let (ws, we) = (start / 64, (end - 1) / 64);
    let head = !0u64 << (start % 64);
    let tail = !0u64 >> (63 - (end - 1) % 64);
    if ws == we {
        row[ws] |= head & tail;
        return;
    }
    row[ws] |= head;
    for w in &mut row[ws + 1..we] {
        *w = !0;
    }
    row[we] |= tail;
}

pub(crate) fn one() -> Rational {
    Rational::one()
}

pub(crate) fn zero() -> Rational {
    Rational::zero()
}
