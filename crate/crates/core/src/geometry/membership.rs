use serde::{Deserialize, Serialize};

use super::gilbert::{gilbert_distance, PointHull};
use super::spider::{compositions, Spider};
use super::zonotope::zonotope_from_composition;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Inside,
    Outside,
    BoundaryBand,
}

/// Decides `q in B[k] / k` by checking `k q` against every composition's
/// zonotope. Zonotopes whose bounding box is farther than `tol` are skipped
/// without a distance query.
pub fn membership_kfold(spider: &Spider, k: u64, q: &[f64], tol: f64) -> Result<Membership> {
    if k == 0 {
        return Err(Error::OutOfDomain("k must be at least 1".into()));
    }
    if q.len() != spider.dim() {
        return Err(Error::DimensionMismatch { expected: spider.dim(), found: q.len() });
    }
    let kq: Vec<f64> = q.iter().map(|x| x * k as f64).collect();
    let mut verdict = Membership::Outside;
    for c in compositions(k, spider.tips().len())? {
        let z = zonotope_from_composition(spider, &c)?.to_f64_body();
        let (lo, hi) = z.bounds();
        let box_gap = kq
            .iter()
            .zip(lo.iter().zip(&hi))
            .map(|(x, (l, h))| (l - x).max(x - h).max(0.0).powi(2))
            .sum::<f64>()
            .sqrt();
        if box_gap > tol {
            continue;
        }
        let dist = gilbert_distance(&z, &kq, tol)?;
        if dist.upper <= tol {
            return Ok(Membership::Inside);
        }
        if dist.lower <= tol {
            verdict = Membership::BoundaryBand;
        }
    }
    Ok(verdict)
}

/// Decides `q in conv(points)`.
pub fn hull_membership(points: &[Vec<f64>], q: &[f64], tol: f64) -> Result<Membership> {
    let hull = PointHull::new(points.to_vec())?;
    let dist = gilbert_distance(&hull, q, tol)?;
    Ok(if dist.upper <= tol {
        Membership::Inside
    } else if dist.lower > tol {
        Membership::Outside
    } else {
        Membership::BoundaryBand
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_spider_examples() {
        let s = Spider::axis(2);
        assert_eq!(membership_kfold(&s, 2, &[0.25, 0.25], 1e-9).unwrap(), Membership::Inside);
        assert_eq!(membership_kfold(&s, 2, &[0.6, 0.6], 1e-9).unwrap(), Membership::Outside);
        assert_eq!(membership_kfold(&s, 1, &[0.0, 0.0], 1e-9).unwrap(), Membership::Inside);
        assert!(membership_kfold(&s, 0, &[0.0, 0.0], 1e-9).is_err());
    }

    #[test]
    fn hull_examples() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(hull_membership(&tri, &[1.0, 0.0], 1e-9).unwrap(), Membership::Inside);
        assert_eq!(hull_membership(&tri, &[0.6, 0.6], 1e-9).unwrap(), Membership::Outside);
        assert_eq!(hull_membership(&tri, &[1.0 / 3.0, 1.0 / 3.0], 1e-9).unwrap(), Membership::Inside);
        assert!(hull_membership(&[], &[0.0], 1e-9).is_err());
    }
}
