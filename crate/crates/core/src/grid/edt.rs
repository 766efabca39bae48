//! Exact squared Euclidean distance transform on the cell-centre lattice,
//! one axis at a time with the lower envelope of parabolas.

use super::{GridFrame, GridSet};
use crate::error::{Error, Result};
use crate::par;
use crate::rational::{self, Rational};

/// Squared distances in cell units; `u64::MAX` never appears because the
/// source set is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    frame: GridFrame,
    cells: Vec<u64>,
}

impl DistanceField {
    pub fn frame(&self) -> &GridFrame {
        &self.frame
    }

    /// Squared distance in cell units at a row-major linear index.
    pub fn cells_sq(&self) -> &[u64] {
        &self.cells
    }

    pub fn at(&self, idx: &[usize]) -> u64 {
        self.cells[linear(self.frame.extents(), idx)]
    }

    /// Exact squared distance `h^2 n`.
    pub fn squared_distance(&self, idx: &[usize]) -> Rational {
        Rational::from_integer(self.at(idx).into()) * rational::pow(self.frame.spacing(), 2)
    }
}

fn linear(extents: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(extents).fold(0, |acc, (&i, &e)| acc * e + i)
}

const INF: u64 = u64::MAX;

pub fn distance_transform(a: &GridSet) -> Result<DistanceField> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let extents = a.extents().to_vec();
    let total: usize = extents.iter().product();
    let mut field = vec![INF; total];
    for c in a.cells() {
        field[linear(&extents, &c)] = 0;
    }
    let d = extents.len();
    for axis in 0..d {
        let n = extents[axis];
        let stride: usize = extents[axis + 1..].iter().product();
        let outer: usize = extents[..axis].iter().product();
        // Every line along `axis` is independent.
        let lines: Vec<(usize, Vec<u64>)> = par::map_range(outer * stride, |l| {
            let (o, s) = (l / stride, l % stride);
            let base = o * n * stride + s;
            let f: Vec<u64> = (0..n).map(|i| field[base + i * stride]).collect();
            (base, envelope_1d(&f))
        });
        for (base, line) in lines {
            for (i, v) in line.into_iter().enumerate() {
                field[base + i * stride] = v;
            }
        }
    }
    Ok(DistanceField { frame: a.frame().clone(), cells: field })
}

/// `g(i) = min_j f(j) + (i - j)^2`, skipping infinite sites.
fn envelope_1d(f: &[u64]) -> Vec<u64> {
    let n = f.len();
    let sites: Vec<usize> = (0..n).filter(|&j| f[j] != INF).collect();
    if sites.is_empty() {
        return vec![INF; n];
    }
    // Parabola `j` beats parabola `v` (v < j) for positions >= the
    // intersection s = ((f_j + j^2) - (f_v + v^2)) / (2 (j - v)); kept as a
    // fraction (num, den) with den > 0.
    let key = |j: usize| f[j] as i128 + (j as i128) * (j as i128);
    let cross = |v: usize, j: usize| (key(j) - key(v), 2 * (j as i128 - v as i128));
    let mut hull: Vec<usize> = Vec::with_capacity(sites.len());
    let mut starts: Vec<(i128, i128)> = Vec::with_capacity(sites.len());
    for &j in &sites {
        loop {
            let Some(&v) = hull.last() else {
                hull.push(j);
                starts.push((i128::MIN, 1));
                break;
            };
            let s = cross(v, j);
            let z = *starts.last().unwrap();
            // Drop v when s <= z.
            let dominated = z.0 != i128::MIN && s.0 * z.1 <= z.0 * s.1;
            if dominated {
                hull.pop();
                starts.pop();
            } else {
                hull.push(j);
                starts.push(s);
                break;
            }
        }
    }
    let mut out = vec![0u64; n];
    let mut k = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let i128i = i as i128;
        while k + 1 < hull.len() && starts[k + 1].0 <= i128i * starts[k + 1].1 {
            k += 1;
        }
        let j = hull[k];
        let dx = i as i128 - j as i128;
        *o = f[j] + (dx * dx) as u64;
    }
    out
}

/// Largest squared cell-unit distance from a cell of `a` to the nearest
/// cell of `b`, and vice versa; the maximum of the two.
pub fn hausdorff_sq_cells(a: &GridSet, b: &GridSet) -> Result<u64> {
    if a.frame() != b.frame() {
        return Err(Error::FrameMismatch);
    }
    let da = distance_transform(a)?;
    let db = distance_transform(b)?;
    let directed = |src: &GridSet, field: &DistanceField| src.cells().iter().map(|c| field.at(c)).max().unwrap_or(0);
    Ok(directed(a, &db).max(directed(b, &da)))
}

/// Hausdorff distance between the cell-centre sets. The distance between
/// the underlying continuous sets differs by at most the cell diagonal.
pub fn hausdorff(a: &GridSet, b: &GridSet) -> Result<f64> {
    let sq = hausdorff_sq_cells(a, b)?;
    Ok(rational::to_f64(a.frame().spacing()) * (sq as f64).sqrt())
}
