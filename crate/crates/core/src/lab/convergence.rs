//! `d_H((1/k) A[k], conv A)` along a list of `k`.

use serde::{Deserialize, Serialize};

use super::model::Model;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spec::SetSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffPoint {
    pub k: u64,
    pub distance: f64,
    /// Discretisation slack `2 h sqrt(d) / k`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffSeries {
    pub points: Vec<HausdorffPoint>,
    /// `p` in a least-squares fit `d_H ~ c k^-p` over the positive
    /// distances; `None` with fewer than two.
    pub decay_exponent: Option<f64>,
}

impl HausdorffSeries {
    /// `d_H(k_{i+1}) / d_H(k_i)` for consecutive positive distances.
    pub fn ratios(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .filter(|w| w[0].distance > 0.0)
            .map(|w| w[1].distance / w[0].distance)
            .collect()
    }
}

fn fit_exponent(points: &[HausdorffPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> =
        points.iter().filter(|p| p.distance > 0.0).map(|p| ((p.k as f64).ln(), p.distance.ln())).collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let (mx, my) = (xy.iter().map(|p| p.0).sum::<f64>() / n, xy.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

pub fn hausdorff_convergence(spec: &SetSpec, ks: &[u64], h: &Rational, cap: u64, tol: f64) -> Result<HausdorffSeries> {
    let model = Model::from_spec(spec)?;
    if !model.has_geometry() {
        return Err(Error::Unsupported("Hausdorff distance of a box union behind an affine map".into()));
    }
    let points = ks
        .iter()
        .map(|&k| {
            let (distance, slack) = model.hausdorff(k, h, cap, tol)?.expect("model has geometry");
            Ok(HausdorffPoint { k, distance, slack })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HausdorffSeries { decay_exponent: fit_exponent(&points), points })
}
