//! Rasterisation of segments, spiders and support-oracle convex bodies.

use num_traits::{ToPrimitive, Zero};

use super::{row_count, row_multi_index, GridFrame, GridSet, Mode};
use crate::error::{Error, Result};
use crate::geometry::{gilbert_distance, Point, Spider, SupportBody};
use crate::par;
use crate::rational::{self, Rational};

/// Supercover of the segment `[p, q]`: every cell whose closed box meets
/// it. Ties at faces and corners mark all touching cells; cells beyond the
/// frame are dropped.
pub fn rasterize_segment(p: &[Rational], q: &[Rational], frame: &GridFrame) -> Result<GridSet> {
    let mut g = GridSet::empty(frame.clone(), Mode::Outer)?;
    add_segment(&mut g, p, q)?;
    Ok(g)
}

fn add_segment(g: &mut GridSet, p: &[Rational], q: &[Rational]) -> Result<()> {
    let frame = g.frame().clone();
    let d = frame.dim();
    if p.len() != d || q.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: p.len().max(q.len()) });
    }
    for x in [p, q] {
        if !frame.contains_point(x) {
            return Err(Error::OutsideFrame(format!(
                "({})",
                x.iter().map(rational::format).collect::<Vec<_>>().join(", ")
            )));
        }
    }
    let h = frame.spacing();
    let u0: Vec<Rational> = p.iter().zip(frame.anchor()).map(|(x, a)| (x - a) / h).collect();
    let u1: Vec<Rational> = q.iter().zip(frame.anchor()).map(|(x, a)| (x - a) / h).collect();
    let du: Vec<Rational> = u0.iter().zip(&u1).map(|(a, b)| b - a).collect();

    // Parameters where some coordinate crosses a lattice plane.
    let mut breaks = vec![Rational::zero(), super::one()];
    for j in 0..d {
        if du[j].is_zero() {
            continue;
        }
        let (lo, hi) = if u0[j] < u1[j] { (&u0[j], &u1[j]) } else { (&u1[j], &u0[j]) };
        let mut n = rational::ceil_int(lo);
        let top = rational::floor_int(hi);
        while n <= top {
            breaks.push((Rational::from_integer(n.clone()) - &u0[j]) / &du[j]);
            n += 1;
        }
    }
    breaks.sort();
    breaks.dedup();

    let two = Rational::from_integer(2.into());
    let mut samples = Vec::with_capacity(2 * breaks.len());
    for (i, s) in breaks.iter().enumerate() {
        samples.push(s.clone());
        if let Some(next) = breaks.get(i + 1) {
            samples.push((s + next) / &two);
        }
    }
    for s in samples {
        let u: Vec<Rational> = u0.iter().zip(&du).map(|(a, b)| a + b * &s).collect();
        mark_cells_containing(g, &u);
    }
    Ok(())
}

/// Marks every in-frame cell whose closed box contains the point with grid
/// coordinates `u`.
fn mark_cells_containing(g: &mut GridSet, u: &[Rational]) {
    let extents = g.extents().to_vec();
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(u.len());
    for (x, &e) in u.iter().zip(&extents) {
        let f = rational::floor_int(x).to_i64().unwrap_or(i64::MIN);
        let mut opts = vec![f];
        if x.is_integer() {
            opts.push(f - 1);
        }
        let opts: Vec<usize> = opts
            .into_iter()
            .filter(|&c| c >= 0 && (c as u64) < e as u64)
            .map(|c| c as usize)
            .collect();
        if opts.is_empty() {
            return;
        }
        choices.push(opts);
    }
    let mut pick = vec![0usize; choices.len()];
    loop {
        let cell: Vec<usize> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        g.insert(&cell).expect("filtered to frame");
        let mut j = 0;
        loop {
            if j == pick.len() {
                return;
            }
            pick[j] += 1;
            if pick[j] < choices[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

/// Union of the supercovers of all arms.
pub fn rasterize_spider(spider: &Spider, frame: &GridFrame) -> Result<GridSet> {
    let mut g = GridSet::empty(frame.clone(), Mode::Outer)?;
    for tip in spider.tips() {
        add_segment(&mut g, spider.apex(), tip)?;
    }
    Ok(g)
}

/// Outer: cells whose centre is within `h sqrt(d) / 2 + tol` of the body.
/// Inner: cells whose `2^d` corners are all within `tol` of the body.
pub fn rasterize_convex<B: SupportBody + ?Sized>(body: &B, frame: &GridFrame, mode: Mode, tol: f64) -> Result<GridSet> {
    if body.dim() != frame.dim() {
        return Err(Error::DimensionMismatch { expected: frame.dim(), found: body.dim() });
    }
    match mode {
        Mode::Outer => {
            let reach = frame.diagonal() / 2.0 + tol;
            scan_centres(body, frame, reach, tol, Mode::Outer)
        }
        Mode::Inner => rasterize_inner(body, frame, tol),
        Mode::Exact => Err(Error::Unsupported("exact rasterisation of a general convex body".into())),
    }
}

/// Cells whose closed box meets the body (up to `tol`).
pub fn rasterize_touching<B: SupportBody + ?Sized>(body: &B, frame: &GridFrame, tol: f64) -> Result<GridSet> {
    if body.dim() != frame.dim() {
        return Err(Error::DimensionMismatch { expected: frame.dim(), found: body.dim() });
    }
    let half = rational::to_f64(frame.spacing()) / 2.0;
    let padded = WithBox { body, half };
    scan_centres(&padded, frame, tol, tol, Mode::Outer)
}

struct WithBox<'a, B: ?Sized> {
    body: &'a B,
    half: f64,
}

impl<B: SupportBody + ?Sized> SupportBody for WithBox<'_, B> {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn support(&self, u: &[f64]) -> Vec<f64> {
        let mut s = self.body.support(u);
        for (x, &c) in s.iter_mut().zip(u) {
            if c > 0.0 {
                *x += self.half;
            } else if c < 0.0 {
                *x -= self.half;
            }
        }
        s
    }

    fn scale(&self) -> f64 {
        self.body.scale() + 2.0 * self.half * (self.dim() as f64).sqrt()
    }
}

fn body_bounds<B: SupportBody + ?Sized>(body: &B) -> (Vec<f64>, Vec<f64>) {
    let d = body.dim();
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    for j in 0..d {
        let mut u = vec![0.0; d];
        u[j] = 1.0;
        hi[j] = body.support(&u)[j];
        u[j] = -1.0;
        lo[j] = body.support(&u)[j];
    }
    (lo, hi)
}

/// Marks cells whose centre lies within `reach` of the body.
fn scan_centres<B: SupportBody + ?Sized>(body: &B, frame: &GridFrame, reach: f64, tol: f64, mode: Mode) -> Result<GridSet> {
    let empty = GridSet::empty(frame.clone(), mode)?;
    let (lo, hi) = body_bounds(body);
    let d = frame.dim();
    let n = frame.extents()[d - 1];
    let words = empty.words_per_row();
    let rows = par::map_range(row_count(frame.extents()), |r| -> Result<Vec<u64>> {
        let mut out = vec![0u64; words];
        let mut idx = row_multi_index(frame.extents(), r);
        idx.push(0);
        for x in 0..n {
            idx[d - 1] = x;
            let c = frame.cell_center(&idx);
            if c.iter().zip(lo.iter().zip(&hi)).any(|(v, (l, h))| *v < l - reach || *v > h + reach) {
                continue;
            }
            let lower = match gilbert_distance(body, &c, tol) {
                Ok(dist) => dist.lower,
                Err(Error::Nonconvergence { lower, .. }) => lower,
                Err(e) => return Err(e),
            };
            if lower <= reach {
                out[x / 64] |= 1 << (x % 64);
            }
        }
        Ok(out)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(GridSet::from_rows(frame.clone(), mode, rows))
}

fn rasterize_inner<B: SupportBody + ?Sized>(body: &B, frame: &GridFrame, tol: f64) -> Result<GridSet> {
    let d = frame.dim();
    let empty = GridSet::empty(frame.clone(), Mode::Inner)?;
    let corner_ext: Vec<usize> = frame.extents().iter().map(|e| e + 1).collect();
    let (lo, hi) = body_bounds(body);
    let h = rational::to_f64(frame.spacing());
    let anchor: Point = frame.anchor().clone();
    let anchor_f: Vec<f64> = anchor.iter().map(rational::to_f64).collect();
    let n = corner_ext[d - 1];
    // Inside flags on the corner lattice, one row at a time.
    let corner_rows = par::map_range(row_count(&corner_ext), |r| -> Vec<bool> {
        let mut idx = row_multi_index(&corner_ext, r);
        idx.push(0);
        (0..n)
            .map(|x| {
                idx[d - 1] = x;
                let p: Vec<f64> = idx.iter().zip(&anchor_f).map(|(&i, a)| a + h * i as f64).collect();
                if p.iter().zip(lo.iter().zip(&hi)).any(|(v, (l, hh))| *v < l - tol || *v > hh + tol) {
                    return false;
                }
                gilbert_distance(body, &p, tol).is_ok_and(|dist| dist.upper <= tol)
            })
            .collect()
    });
    let words = empty.words_per_row();
    let cells_last = frame.extents()[d - 1];
    let rows = par::map_range(row_count(frame.extents()), |r| {
        let mut out = vec![0u64; words];
        let prefix = row_multi_index(frame.extents(), r);
        'cell: for x in 0..cells_last {
            for mask in 0..(1usize << (d - 1)) {
                let corner: Vec<usize> = prefix.iter().enumerate().map(|(j, &i)| i + (mask >> j & 1)).collect();
                let cr = super::row_linear_index(&corner_ext[..d - 1], &corner);
                let row = &corner_rows[cr];
                if !row[x] || !row[x + 1] {
                    continue 'cell;
                }
            }
            out[x / 64] |= 1 << (x % 64);
        }
        out
    });
    Ok(GridSet::from_rows(frame.clone(), Mode::Inner, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxBody, PointHull};
    use crate::grid::tests::unit_frame;
    use crate::rational::{int, rat};

    #[test]
    fn degenerate_segment() {
        let f = unit_frame(2, 4);
        let g = rasterize_segment(&[rat(3, 8), rat(5, 8)], &[rat(3, 8), rat(5, 8)], &f).unwrap();
        assert_eq!(g.cells(), vec![vec![1, 2]]);
    }

    #[test]
    fn axis_segments_by_alignment() {
        let f = GridFrame::new(vec![int(0), int(0)], rat(1, 4), vec![6, 6]).unwrap();
        let aligned = rasterize_segment(&[int(0), rat(1, 8)], &[int(1), rat(1, 8)], &f).unwrap();
        assert_eq!(aligned.count(), 5);
        let shifted = rasterize_segment(&[rat(1, 8), rat(1, 8)], &[rat(9, 8), rat(1, 8)], &f).unwrap();
        assert_eq!(shifted.count(), 5);
        let f4 = unit_frame(2, 4);
        let inside = rasterize_segment(&[int(0), rat(1, 8)], &[int(1), rat(1, 8)], &f4).unwrap();
        assert_eq!(inside.count(), 4);
        let mid = rasterize_segment(&[rat(1, 16), rat(1, 8)], &[rat(1, 16) + int(1) - rat(1, 8), rat(1, 8)], &f).unwrap();
        assert_eq!(mid.count(), 4);
    }

    #[test]
    fn diagonal_of_unit_square() {
        let f = unit_frame(2, 2);
        let g = rasterize_segment(&[int(0), int(0)], &[int(1), int(1)], &f).unwrap();
        assert_eq!(g.count(), 4);
        let f3 = unit_frame(3, 2);
        let g3 = rasterize_segment(&[int(0), int(0), int(0)], &[int(1), int(1), int(1)], &f3).unwrap();
        assert_eq!(g3.count(), 8);
    }

    #[test]
    fn outside_frame_rejected() {
        let f = unit_frame(2, 4);
        assert!(matches!(
            rasterize_segment(&[int(0), int(0)], &[int(2), int(0)], &f),
            Err(Error::OutsideFrame(_))
        ));
    }

    #[test]
    fn supercover_matches_brute_force() {
        // A closed cell meets the segment iff the clipped parameter range
        // per axis has a common point.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let f = GridFrame::new(vec![int(0), int(0), int(0)], rat(1, 6), vec![6, 6, 6]).unwrap();
        for _ in 0..40 {
            let p: Vec<Rational> = (0..3).map(|_| rat(rng.gen_range(0..=12), 12)).collect();
            let q: Vec<Rational> = (0..3).map(|_| rat(rng.gen_range(0..=12), 12)).collect();
            let g = rasterize_segment(&p, &q, &f).unwrap();
            for cell in f_cells(&f) {
                let mut lo = Rational::zero();
                let mut hi = int(1);
                for j in 0..3 {
                    let a = rat(cell[j] as i64, 6);
                    let b = rat(cell[j] as i64 + 1, 6);
                    let dq = &q[j] - &p[j];
                    if dq.is_zero() {
                        if p[j] < a || p[j] > b {
                            hi = int(-1);
                        }
                        continue;
                    }
                    let (mut s0, mut s1) = ((&a - &p[j]) / &dq, (&b - &p[j]) / &dq);
                    if s0 > s1 {
                        std::mem::swap(&mut s0, &mut s1);
                    }
                    lo = lo.max(s0);
                    hi = hi.min(s1);
                }
                assert_eq!(g.contains(&cell), lo <= hi, "cell {cell:?}");
            }
        }
    }

    fn f_cells(f: &GridFrame) -> Vec<Vec<usize>> {
        GridSet::full(f.clone(), Mode::Exact).unwrap().cells()
    }

    #[test]
    fn convex_square_and_triangle() {
        let f = GridFrame::new(vec![int(-1), int(-1)], rat(1, 4), vec![12, 12]).unwrap();
        let sq = BoxBody::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let inner = rasterize_convex(&sq, &f, Mode::Inner, 1e-9).unwrap();
        assert_eq!(inner.volume(), int(1));
        let touching = rasterize_touching(&sq, &f, 1e-9).unwrap();
        assert_eq!(touching.count(), 36);

        let f8 = GridFrame::new(vec![int(0), int(0)], rat(1, 8), vec![8, 8]).unwrap();
        let tri = PointHull::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let inner = rasterize_convex(&tri, &f8, Mode::Inner, 1e-9).unwrap();
        let outer = rasterize_convex(&tri, &f8, Mode::Outer, 1e-9).unwrap();
        assert!(inner.count() <= 32 && 32 <= outer.count());
        assert!(inner.is_subset(&outer).unwrap());
    }

    #[test]
    fn segment_has_empty_inner_raster() {
        let f = unit_frame(2, 8);
        let seg = PointHull::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(rasterize_convex(&seg, &f, Mode::Inner, 1e-9).unwrap().is_empty());
    }
}
