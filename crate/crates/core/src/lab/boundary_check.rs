//! Sums of a set with its boundary.
//!
//! For a union of closed cells `A`, the exterior boundary cells `E` satisfy
//! `d_ext A <= E <= A`, so when the boundary of the unbounded complement
//! component is connected, `E + E = A + E = A + A` as sets. All three sums
//! are exact on the lattice (see [`box_sum`]), so the identity is checked
//! cell for cell, and through the Hausdorff distance and volume as well.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{box_sum, components, exterior_boundary, hausdorff, Connectivity, GridFrame, GridSet, Mode};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub cells: u64,
    pub boundary_cells: u64,
    /// Touching components of the exterior boundary.
    pub boundary_components: usize,
    #[serde(with = "crate::rational::as_str")]
    pub vol_aa: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub vol_ab: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub vol_bb: Rational,
    pub hausdorff_ab: f64,
    pub hausdorff_bb: f64,
    /// `2 h sqrt(d)`.
    pub slack: f64,
    /// The three sums agree cell for cell.
    pub identical: bool,
}

impl BoundaryReport {
    pub fn passes(&self) -> bool {
        self.boundary_components == 1
            && self.hausdorff_ab <= self.slack
            && self.hausdorff_bb <= self.slack
            && self.vol_ab == self.vol_aa
            && self.vol_bb == self.vol_aa
    }
}

/// The three sums and their comparison, whatever the boundary looks like.
pub fn boundary_diagnostics(a: &GridSet) -> Result<BoundaryReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let b = exterior_boundary(a)?;
    let comps = components(&b, Connectivity::Touching).len();
    let aa = box_sum(a, a)?;
    let ab = box_sum(a, &b)?;
    let bb = box_sum(&b, &b)?;
    let d = a.dim() as f64;
    Ok(BoundaryReport {
        cells: a.count(),
        boundary_cells: b.count(),
        boundary_components: comps,
        vol_aa: aa.volume(),
        vol_ab: ab.volume(),
        vol_bb: bb.volume(),
        hausdorff_ab: hausdorff(&aa, &ab)?,
        hausdorff_bb: hausdorff(&aa, &bb)?,
        slack: 2.0 * rational::to_f64(a.frame().spacing()) * d.sqrt(),
        identical: aa == ab && aa == bb,
    })
}

/// Rejects sets whose exterior boundary is disconnected, where the
/// identity fails.
pub fn boundary_lemma_check(a: &GridSet) -> Result<BoundaryReport> {
    let r = boundary_diagnostics(a)?;
    if r.boundary_components != 1 {
        return Err(Error::DisconnectedBoundary { components: r.boundary_components });
    }
    Ok(r)
}

/// Cells of an `extent^d` frame of spacing `h` anchored at the origin whose
/// centres `c` satisfy `r_inner <= |c - centre| <= r_outer`.
pub fn ring_raster(d: usize, extent: usize, h: &Rational, centre: &[f64], r_inner: f64, r_outer: f64) -> Result<GridSet> {
    let frame = GridFrame::new(vec![rational::int(0); d], h.clone(), vec![extent; d])?;
    let mut out = GridSet::empty(frame.clone(), Mode::Exact)?;
    for c in GridSet::full(frame.clone(), Mode::Exact)?.cells() {
        let p = frame.cell_center(&c);
        let r = p.iter().zip(centre).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        if r_inner <= r && r <= r_outer {
            out.insert(&c)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn disc_square_annulus() {
        let h = rat(1, 32);
        let disc = ring_raster(2, 40, &h, &[0.625, 0.625], 0.0, 0.5).unwrap();
        let square = ring_raster(2, 40, &h, &[0.625, 0.625], 0.0, 10.0).unwrap();
        let annulus = ring_raster(2, 40, &h, &[0.625, 0.625], 0.25, 0.5).unwrap();
        for a in [&disc, &square, &annulus] {
            let r = boundary_lemma_check(a).unwrap();
            assert!(r.passes() && r.identical, "{r:?}");
        }
        // Only the outer ring of the annulus counts.
        let r = boundary_lemma_check(&annulus).unwrap();
        assert!(r.boundary_cells < crate::grid::boundary_cells(&annulus).count());
    }

    #[test]
    fn far_point_breaks_the_identity() {
        let h = rat(1, 32);
        let mut a = ring_raster(2, 64, &h, &[0.5, 0.5], 0.0, 0.4).unwrap();
        a.insert(&[60, 60]).unwrap();
        assert_eq!(boundary_lemma_check(&a).unwrap_err(), Error::DisconnectedBoundary { components: 2 });
        let r = boundary_diagnostics(&a).unwrap();
        assert!(r.vol_bb < r.vol_aa);
        assert!(r.hausdorff_bb > r.slack);
    }

    #[test]
    fn cube_in_space() {
        let a = ring_raster(3, 12, &rat(1, 8), &[0.75, 0.75, 0.75], 0.0, 0.6).unwrap();
        assert!(boundary_lemma_check(&a).unwrap().identical);
    }
}
