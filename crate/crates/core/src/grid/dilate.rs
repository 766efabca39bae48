//! Index-lattice Minkowski sums of voxel sets.
//!
//! `dilate(A, B)` is the sumset `{i + j}` with anchors added. Rows of the
//! output are independent: output row `r` is the OR over row pairs
//! `(ra, r - ra)` of the one-dimensional sumset of the two rows.

use super::{fill_range, row_count, row_linear_index, row_multi_index, row_runs, GridFrame, GridSet, Mode, DEFAULT_CELL_CAP};
use crate::error::{Error, Result};
use crate::geometry::add;
use crate::par;

/// One-dimensional row-sum kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// Chooses per row pair whichever of the two is cheaper.
    Auto,
    /// OR of shifted copies; runs of the second row are smeared by doubling.
    ShiftOr,
    /// Products of run intervals, filled directly.
    Runs,
}

pub fn dilate(a: &GridSet, b: &GridSet) -> Result<GridSet> {
    dilate_with(a, b, Kernel::Auto, DEFAULT_CELL_CAP)
}

fn combine_modes(a: Mode, b: Mode) -> Result<Mode> {
    match (a, b) {
        (x, y) if x == y => Ok(x),
        (Mode::Exact, x) | (x, Mode::Exact) => Ok(x),
        _ => Err(Error::Unsupported("sum of an inner and an outer raster".into())),
    }
}

pub fn dilate_with(a: &GridSet, b: &GridSet, kernel: Kernel, cap: u64) -> Result<GridSet> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if a.frame().spacing() != b.frame().spacing() {
        return Err(Error::SpacingMismatch);
    }
    let mode = combine_modes(a.mode(), b.mode())?;
    let d = a.dim();
    let extents: Vec<usize> = a.extents().iter().zip(b.extents()).map(|(x, y)| x + y - 1).collect();
    let frame = GridFrame::new(add(a.frame().anchor(), b.frame().anchor()), a.frame().spacing().clone(), extents.clone())?;
    let requested = frame.cell_count();
    if requested > u128::from(cap) {
        return Err(Error::CellCap { requested, cap });
    }
    let words = extents[d - 1].div_ceil(64);

    let a_rows = RowCache::new(a);
    let b_rows = RowCache::new(b);
    let ea = &a.extents()[..d - 1];
    let eb = &b.extents()[..d - 1];

    let rows = par::map_range(row_count(&extents), |r| {
        let mut out = vec![0u64; words];
        let ro = row_multi_index(&extents, r);
        // Range of A-row prefixes pairing with a valid B-row prefix.
        let lo: Vec<usize> = ro.iter().zip(eb).map(|(&o, &e)| (o + 1).saturating_sub(e)).collect();
        let hi: Vec<usize> = ro.iter().zip(ea).map(|(&o, &e)| o.min(e - 1)).collect();
        let mut ia = lo.clone();
        loop {
            let ra = row_linear_index(ea, &ia);
            if !a_rows.runs[ra].is_empty() {
                let ib: Vec<usize> = ro.iter().zip(&ia).map(|(o, i)| o - i).collect();
                let rb = row_linear_index(eb, &ib);
                if !b_rows.runs[rb].is_empty() {
                    sum_rows(&mut out, a, &a_rows, ra, &b_rows, rb, kernel);
                }
            }
            // Odometer over the box lo..=hi.
            let mut j = ia.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if ia[j] < hi[j] {
                    ia[j] += 1;
                    break;
                }
                ia[j] = lo[j];
            }
        }
    });
    Ok(GridSet::from_rows(frame, mode, rows))
}

struct RowCache {
    runs: Vec<Vec<(usize, usize)>>,
}

impl RowCache {
    fn new(g: &GridSet) -> Self {
        Self { runs: par::map_range(g.rows(), |r| row_runs(g.row(r))) }
    }
}

fn sum_rows(out: &mut [u64], a: &GridSet, ac: &RowCache, ra: usize, bc: &RowCache, rb: usize, kernel: Kernel) {
    let runs_a = &ac.runs[ra];
    let runs_b = &bc.runs[rb];
    let use_runs = match kernel {
        Kernel::Runs => true,
        Kernel::ShiftOr => false,
        Kernel::Auto => {
            let run_cost = runs_a.len() * runs_b.len();
            let words = a.words_per_row();
            let shift_cost = runs_b
                .iter()
                .map(|(s, e)| (usize::BITS - (e - s).leading_zeros()) as usize)
                .sum::<usize>()
                * words;
            run_cost <= shift_cost
        }
    };
    if use_runs {
        let mut spans: Vec<(usize, usize)> = Vec::with_capacity(runs_a.len() * runs_b.len());
        for &(sa, ea) in runs_a {
            for &(sb, eb) in runs_b {
                spans.push((sa + sb, ea + eb - 1));
            }
        }
        spans.sort_unstable();
        let mut cur: Option<(usize, usize)> = None;
        for (s, e) in spans {
            match cur {
                Some((cs, ce)) if s <= ce => cur = Some((cs, ce.max(e))),
                Some((cs, ce)) => {
                    fill_range(out, cs, ce);
                    cur = Some((s, e));
                }
                None => cur = Some((s, e)),
            }
        }
        if let Some((cs, ce)) = cur {
            fill_range(out, cs, ce);
        }
    } else {
        let src = a.row(ra);
        let mut smear = vec![0u64; out.len()];
        for &(sb, eb) in runs_b {
            // smear = OR of src shifted by 0..len.
            let len = eb - sb;
            smear.fill(0);
            smear[..src.len()].copy_from_slice(src);
            let mut have = 1;
            while have < len {
                let step = have.min(len - have);
                let copy = smear.clone();
                or_shifted(&mut smear, &copy, step);
                have += step;
            }
            or_shifted(out, &smear, sb);
        }
    }
}

/// `dst |= src << shift` (towards higher indices), truncated to `dst`.
fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let t = i + ws;
        if t >= dst.len() {
            break;
        }
        dst[t] |= w << bs;
        if bs != 0 && t + 1 < dst.len() {
            dst[t + 1] |= w >> (64 - bs);
        }
    }
}

/// `A[k]` on the index lattice, by binary doubling.
pub fn self_sum(a: &GridSet, k: u64) -> Result<GridSet> {
    self_sum_with(a, k, DEFAULT_CELL_CAP)
}

pub fn self_sum_with(a: &GridSet, k: u64, cap: u64) -> Result<GridSet> {
    if k == 0 {
        return Err(Error::OutOfDomain("k must be at least 1".into()));
    }
    let mut acc: Option<GridSet> = None;
    let mut power = a.clone();
    let mut rest = k;
    loop {
        if rest & 1 == 1 {
            acc = Some(match acc {
                None => power.clone(),
                Some(x) => dilate_with(&x, &power, Kernel::Auto, cap)?,
            });
        }
        rest >>= 1;
        if rest == 0 {
            break;
        }
        power = dilate_with(&power, &power, Kernel::Auto, cap)?;
    }
    Ok(acc.expect("k >= 1"))
}

/// `A + A + ... + A` by repeated single dilations; the reference for
/// [`self_sum`].
pub fn dilate_iterated(a: &GridSet, k: u64) -> Result<GridSet> {
    if k == 0 {
        return Err(Error::OutOfDomain("k must be at least 1".into()));
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = dilate(&acc, a)?;
    }
    Ok(acc)
}

/// Solid block `{0, ..., n-1}^d` with zero anchor.
pub fn block(like: &GridFrame, n: usize, mode: Mode) -> Result<GridSet> {
    let frame = GridFrame::new(vec![super::zero(); like.dim()], like.spacing().clone(), vec![n; like.dim()])?;
    GridSet::full(frame, mode)
}

/// Set-level sum of two cell unions: `(U cells of A) + (U cells of B)` is
/// exactly the union of the cells of `dilate(A, B) + {0,1}^d`.
pub fn box_sum(a: &GridSet, b: &GridSet) -> Result<GridSet> {
    let s = dilate(a, b)?;
    let blk = block(s.frame(), 2, Mode::Exact)?;
    dilate(&s, &blk)
}

/// Set-level `k`-fold sum of a cell union: index sumset plus the block
/// `{0..k-1}^d`, since a sum of `k` cells is a `k`-by-`k` box.
pub fn box_self_sum(a: &GridSet, k: u64, cap: u64) -> Result<GridSet> {
    let s = self_sum_with(a, k, cap)?;
    if k == 1 {
        return Ok(s);
    }
    let blk = block(s.frame(), k as usize, Mode::Exact)?;
    dilate_with(&s, &blk, Kernel::Auto, cap)
}
