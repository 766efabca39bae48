//! Boundary cells and connected components.

use super::{GridSet, Mode};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Cells sharing a facet (`2d` neighbours).
    Face,
    /// Cells sharing any point (`3^d - 1` neighbours).
    Touching,
}

fn offsets(d: usize, conn: Connectivity) -> Vec<Vec<i64>> {
    match conn {
        Connectivity::Face => (0..d)
            .flat_map(|j| {
                [-1i64, 1].into_iter().map(move |s| {
                    let mut o = vec![0; d];
                    o[j] = s;
                    o
                })
            })
            .collect(),
        Connectivity::Touching => {
            let mut out = Vec::new();
            for code in 0..3usize.pow(d as u32) {
                let mut c = code;
                let o: Vec<i64> = (0..d)
                    .map(|_| {
                        let v = (c % 3) as i64 - 1;
                        c /= 3;
                        v
                    })
                    .collect();
                if o.iter().any(|&x| x != 0) {
                    out.push(o);
                }
            }
            out
        }
    }
}

fn neighbour(cell: &[usize], off: &[i64], extents: &[usize]) -> Option<Vec<usize>> {
    cell.iter()
        .zip(off)
        .zip(extents)
        .map(|((&c, &o), &e)| {
            let v = c as i64 + o;
            (v >= 0 && (v as usize) < e).then_some(v as usize)
        })
        .collect()
}

/// Occupied cells with at least one unoccupied face neighbour; cells past
/// the frame count as unoccupied.
pub fn boundary_cells(a: &GridSet) -> GridSet {
    let offs = offsets(a.dim(), Connectivity::Face);
    let mut out = GridSet::empty(a.frame().clone(), a.mode()).expect("same frame as input");
    for c in a.cells() {
        let exposed = offs.iter().any(|o| match neighbour(&c, o, a.extents()) {
            Some(n) => !a.contains(&n),
            None => true,
        });
        if exposed {
            out.insert(&c).expect("in frame");
        }
    }
    out
}

/// Connected components of the occupied cells, as separate sets.
pub fn components(a: &GridSet, conn: Connectivity) -> Vec<GridSet> {
    let offs = offsets(a.dim(), conn);
    let mut seen = GridSet::empty(a.frame().clone(), Mode::Exact).expect("same frame as input");
    let mut out = Vec::new();
    for start in a.cells() {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = GridSet::empty(a.frame().clone(), a.mode()).expect("same frame as input");
        let mut stack = vec![start.clone()];
        seen.insert(&start).expect("in frame");
        while let Some(c) = stack.pop() {
            comp.insert(&c).expect("in frame");
            for o in &offs {
                if let Some(n) = neighbour(&c, o, a.extents()) {
                    if a.contains(&n) && !seen.contains(&n) {
                        seen.insert(&n).expect("in frame");
                        stack.push(n);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Boundary cells facing the unbounded complement component: cells of `a`
/// with a face neighbour that can reach the outside of the frame through
/// unoccupied cells. Boundaries of holes are excluded.
pub fn exterior_boundary(a: &GridSet) -> Result<GridSet> {
    let extents = a.extents().to_vec();
    let d = a.dim();
    let offs = offsets(d, Connectivity::Face);
    let mut outside = GridSet::empty(a.frame().clone(), Mode::Exact)?;
    let mut stack: Vec<Vec<usize>> = Vec::new();
    // Seed with unoccupied cells on the frame's faces.
    for c in GridSet::full(a.frame().clone(), Mode::Exact)?.cells() {
        let on_face = c.iter().zip(&extents).any(|(&i, &e)| i == 0 || i + 1 == e);
        if on_face && !a.contains(&c) {
            outside.insert(&c)?;
            stack.push(c);
        }
    }
    while let Some(c) = stack.pop() {
        for o in &offs {
            if let Some(n) = neighbour(&c, o, &extents) {
                if !a.contains(&n) && !outside.contains(&n) {
                    outside.insert(&n)?;
                    stack.push(n);
                }
            }
        }
    }
    let mut out = GridSet::empty(a.frame().clone(), a.mode())?;
    for c in a.cells() {
        let exposed = offs.iter().any(|o| match neighbour(&c, o, &extents) {
            Some(n) => outside.contains(&n),
            None => true,
        });
        if exposed {
            out.insert(&c)?;
        }
    }
    Ok(out)
}
