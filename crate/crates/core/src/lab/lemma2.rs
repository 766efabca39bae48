//! Grid verifier for the layer inequality behind the spider case.
//!
//! `B` is the axis spider `U [o, e_j]` (any spider with linearly
//! independent arms maps onto it). `M` is a union of cells of spacing
//! `h = 1/n` with `B[k] <= M <= k conv B`. On that lattice everything in the
//! proof is exact: `M + B` is the union of the cells of the index sumset of
//! `M` with `{m e_j : 0 <= m <= n}`, so the masses `mu_i = vol(C_i n M)` and
//! `lambda_i = vol(C_i n (M + B))` of the unit cells `C_i` are cell counts.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{corner_volume, enumerate_layer, falling_factorial, simplex_volume, stability_constant, threshold_k, LayerIndex};
use crate::error::{Error, Result};
use crate::grid::{dilate, GridFrame, GridSet, Mode};
use crate::rational::{self, Rational};

/// `alpha_{i i'} = i_j / (t + 1)` for `i in X_d(t+1)` and `i' = i - e_j`;
/// `None` when the two are not adjacent.
pub fn alpha(i: &[u32], i_prime: &[u32]) -> Option<Rational> {
    if i.len() != i_prime.len() {
        return None;
    }
    let mut axis = None;
    for (j, (&a, &b)) in i.iter().zip(i_prime).enumerate() {
        match i64::from(a) - i64::from(b) {
            0 => {}
            1 if axis.is_none() => axis = Some(j),
            _ => return None,
        }
    }
    let j = axis?;
    let t1: u64 = i.iter().map(|&c| u64::from(c)).sum();
    Some(Rational::new(i64::from(i[j]).into(), (t1 as i64).into()))
}

/// Neighbours `i - e_j` of `i` one layer down.
fn below(i: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    (0..i.len()).filter(move |&j| i[j] > 0).map(move |j| {
        let mut p = i.to_vec();
        p[j] -= 1;
        p
    })
}

/// Both weight normalisations between layers `t` and `t + 1`: every
/// `i in X_d(t+1)` has `sum_{i'} alpha = 1`, and every `i' in X_d(t)` has
/// `sum_i alpha = (t + d) / (t + 1)`.
pub fn weight_identities(d: usize, t: u64) -> Result<(bool, bool)> {
    let upper = enumerate_layer(d, t + 1)?;
    let rows = upper.iter().all(|i| {
        below(i.coords()).map(|p| alpha(i.coords(), &p).expect("adjacent")).sum::<Rational>() == Rational::one()
    });
    let target = Rational::new(((t + d as u64) as i64).into(), ((t + 1) as i64).into());
    let cols = enumerate_layer(d, t)?.iter().all(|p| {
        let sum: Rational = (0..d)
            .map(|j| {
                let mut i = p.coords().to_vec();
                i[j] += 1;
                alpha(&i, p.coords()).expect("adjacent")
            })
            .sum();
        sum == target
    });
    Ok((rows, cols))
}

/// `sum_{t=k-d+1}^{k-1} V(k-t) N_d(t)`: the part of `k conv B` in cells not
/// contained in it. Equals `(k^d - k^(d)) / d!`.
pub fn shell_volume(d: usize, k: u64) -> Result<Rational> {
    let mut sum = Rational::zero();
    for t in k.saturating_sub(d as u64 - 1)..k {
        let n = Rational::from_integer(crate::combinatorics::layer_count(d, t)?.into());
        sum += corner_volume(d, &rational::int((k - t) as i64))? * n;
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMass {
    pub index: Vec<u32>,
    #[serde(with = "crate::rational::as_str")]
    pub mass: Rational,
}

/// Masses of the unit cells of one layer `X_d(t)`; cells without mass are
/// listed with zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMassLayer {
    pub t: u64,
    pub masses: Vec<CellMass>,
}

impl CellMassLayer {
    fn collect(d: usize, t: u64, counts: &HashMap<Vec<u32>, u64>, cell: &Rational) -> Result<Self> {
        let masses = enumerate_layer(d, t)?
            .into_iter()
            .map(|LayerIndex(index)| {
                let c = counts.get(&index).copied().unwrap_or(0);
                CellMass { mass: rational::int(c as i64) * cell, index }
            })
            .collect();
        Ok(Self { t, masses })
    }

    pub fn total(&self) -> Rational {
        self.masses.iter().map(|m| &m.mass).sum()
    }

    pub fn get(&self, index: &[u32]) -> Rational {
        self.masses.iter().find(|m| m.index == index).map(|m| m.mass.clone()).unwrap_or_else(Rational::zero)
    }
}

/// The per-layer inequality `sum lambda(t+1) >= (t+d)/(t+1) sum mu(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCheck {
    pub t: u64,
    #[serde(with = "crate::rational::as_str")]
    pub mu_sum: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub lambda_sum: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub slack: Rational,
    pub weights_normalised: bool,
    pub weights_dual: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub d: usize,
    pub k: u64,
    /// Cells per unit length.
    pub n: u64,
    pub mu: Vec<CellMassLayer>,
    pub lambda: Vec<CellMassLayer>,
    /// Every `mu_i` is at most `V(k - t)`.
    pub capacities_hold: bool,
    /// Per-cell `lambda_i >= max` of adjacent `mu` below.
    pub cells_hold: bool,
    #[serde(with = "crate::rational::as_str")]
    pub cells_min_slack: Rational,
    pub layers: Vec<LayerCheck>,
    #[serde(with = "crate::rational::as_str")]
    pub vol_m: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub vol_mb: Rational,
    /// `vol(M) = k^(d) V + sum mu` and `vol(M+B) = (k+1)^(d) V + sum lambda`.
    pub volume_identities_hold: bool,
    /// `vol(M / k)`.
    #[serde(with = "crate::rational::as_str")]
    pub lhs: Rational,
    /// `vol((M + B) / (k + 1))`.
    #[serde(with = "crate::rational::as_str")]
    pub rhs: Rational,
    pub inequality_holds: bool,
    /// `rhs >= c lhs + (1 - c) V` with `c = k^d / ((k-d+2)(k+1)^(d-1))`.
    pub convex_bound_holds: bool,
    /// `rhs - lhs`.
    #[serde(with = "crate::rational::as_str")]
    pub delta: Rational,
    #[serde(with = "crate::lab::audit::opt_rational")]
    pub stability_constant: Option<Rational>,
    /// `vol(M) >= vol(k conv B) - C(d,k) delta`; `None` below the
    /// threshold `k >= max(2, (d-1)(d-2))`.
    pub stability_holds: Option<bool>,
}

impl Lemma2Report {
    pub fn all_hold(&self) -> bool {
        self.capacities_hold
            && self.cells_hold
            && self.layers.iter().all(|l| l.holds && l.weights_normalised && l.weights_dual)
            && self.volume_identities_hold
            && self.inequality_holds
            && self.convex_bound_holds
            && self.stability_holds != Some(false)
    }
}

/// Frame `[0, k]^d` with `n` cells per unit.
pub fn lemma_frame(d: usize, k: u64, n: u64) -> Result<GridFrame> {
    GridFrame::new(vec![rational::int(0); d], Rational::new(1.into(), (n as i64).into()), vec![(k * n) as usize; d])
}

fn unit_sum(idx: &[usize], n: u64) -> u64 {
    idx.iter().map(|&i| i as u64 / n + 1).sum()
}

/// `B[k]`: the unit cells `C_i` with `sum (i_j + 1) <= k`.
pub fn staircase_cells(d: usize, k: u64, n: u64) -> Result<GridSet> {
    sandwich(d, k, n, |_| false)
}

/// Cells of spacing `1/n` inside `k conv B`.
pub fn simplex_cells(d: usize, k: u64, n: u64) -> Result<GridSet> {
    sandwich(d, k, n, |_| true)
}

/// `B[k]` together with the cells of `k conv B` outside it for which
/// `keep` holds.
pub fn sandwich(d: usize, k: u64, n: u64, mut keep: impl FnMut(&[usize]) -> bool) -> Result<GridSet> {
    let frame = lemma_frame(d, k, n)?;
    let mut out = GridSet::empty(frame.clone(), Mode::Exact)?;
    let mut idx = vec![0usize; d];
    loop {
        let fine: u64 = idx.iter().map(|&i| i as u64 + 1).sum();
        if unit_sum(&idx, n) <= k || (fine <= k * n && keep(&idx)) {
            out.insert(&idx)?;
        }
        // Odometer over the cells of the frame.
        let mut j = 0;
        loop {
            if j == d {
                return Ok(out);
            }
            idx[j] += 1;
            if idx[j] < frame.extents()[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `{m e_j : 0 <= m <= n}`, the index form of `B`.
fn index_spider(d: usize, n: u64, spacing: &Rational) -> Result<GridSet> {
    let frame = GridFrame::new(vec![rational::int(0); d], spacing.clone(), vec![n as usize + 1; d])?;
    let mut s = GridSet::empty(frame, Mode::Exact)?;
    for j in 0..d {
        for m in 0..=n as usize {
            let mut c = vec![0; d];
            c[j] = m;
            s.insert(&c)?;
        }
    }
    Ok(s)
}

fn unit_counts(set: &GridSet, n: u64) -> HashMap<Vec<u32>, u64> {
    let mut counts = HashMap::new();
    for c in set.cells() {
        *counts.entry(c.iter().map(|&i| (i as u64 / n) as u32).collect()).or_insert(0) += 1;
    }
    counts
}

/// Evaluates every step of the layer argument on `M`, a cell union taken
/// together with `B[k]`.
pub fn lemma2_check(d: usize, k: u64, m: &GridSet) -> Result<Lemma2Report> {
    if d < 2 || m.dim() != d {
        return Err(Error::InvalidDimension(m.dim()));
    }
    if k == 0 {
        return Err(Error::OutOfDomain("k must be at least 1".into()));
    }
    let h = m.frame().spacing().clone();
    let inv = Rational::one() / &h;
    if !inv.is_integer() {
        return Err(Error::OutOfDomain(format!("spacing {} does not divide 1", rational::format(&h))));
    }
    let n: u64 = rational::floor_int(&inv).try_into().map_err(|_| Error::OutOfDomain("spacing too fine".into()))?;
    let frame = lemma_frame(d, k, n)?;
    let m = m
        .embed(&frame)
        .map_err(|_| Error::SandwichViolated("M leaves [0, k]^d or is off the lattice".into()))?;
    let stair = staircase_cells(d, k, n)?;
    if !stair.is_subset(&m)? {
        return Err(Error::SandwichViolated("M misses cells of B[k]".into()));
    }
    if !m.is_subset(&simplex_cells(d, k, n)?)? {
        return Err(Error::SandwichViolated("M leaves k conv B".into()));
    }
    // `M` is read as its cells together with `B[k]`, whose lower-dimensional
    // parts no cell union carries; they add `B[k+1]` to `M + B`.
    let mb = dilate(&m, &index_spider(d, n, &h)?)?.union(&staircase_cells(d, k + 1, n)?)?;

    let cell = rational::pow(&h, d as u32);
    let mu_counts = unit_counts(&m, n);
    let la_counts = unit_counts(&mb, n);
    let lo = k.saturating_sub(d as u64 - 1);
    let mu: Vec<CellMassLayer> =
        (lo..k).map(|t| CellMassLayer::collect(d, t, &mu_counts, &cell)).collect::<Result<_>>()?;
    let lambda: Vec<CellMassLayer> =
        (lo + 1..=k).map(|t| CellMassLayer::collect(d, t, &la_counts, &cell)).collect::<Result<_>>()?;

    let mut capacities_hold = true;
    for layer in &mu {
        let cap = corner_volume(d, &rational::int((k - layer.t) as i64))?;
        capacities_hold &= layer.masses.iter().all(|c| !c.mass.is_negative() && c.mass <= cap);
    }

    let mut cells_min_slack: Option<Rational> = None;
    for (below_layer, above) in mu.iter().zip(&lambda) {
        for c in &above.masses {
            let best = below(&c.index).map(|p| below_layer.get(&p)).max().unwrap_or_else(Rational::zero);
            let s = &c.mass - best;
            cells_min_slack = Some(match cells_min_slack {
                Some(x) if x <= s => x,
                _ => s,
            });
        }
    }
    let cells_min_slack = cells_min_slack.unwrap_or_else(Rational::zero);

    let layers = mu
        .iter()
        .zip(&lambda)
        .map(|(m_t, l_t)| {
            let t = m_t.t;
            let factor = Rational::new(((t + d as u64) as i64).into(), ((t + 1) as i64).into());
            let (mu_sum, lambda_sum) = (m_t.total(), l_t.total());
            let slack = &lambda_sum - factor * &mu_sum;
            let (weights_normalised, weights_dual) = weight_identities(d, t)?;
            Ok(LayerCheck { t, holds: !slack.is_negative(), mu_sum, lambda_sum, slack, weights_normalised, weights_dual })
        })
        .collect::<Result<Vec<_>>>()?;

    let v = simplex_volume(d);
    let fall = |x: u64| Rational::from_integer(falling_factorial(x, d as u64).into());
    let vol_m = m.volume();
    let vol_mb = mb.volume();
    let mu_total: Rational = mu.iter().map(CellMassLayer::total).sum();
    let la_total: Rational = lambda.iter().map(CellMassLayer::total).sum();
    let volume_identities_hold = vol_m == fall(k) * &v + mu_total && vol_mb == fall(k + 1) * &v + la_total;

    let kk = rational::int(k as i64);
    let k1 = rational::int(k as i64 + 1);
    let lhs = &vol_m / rational::pow(&kk, d as u32);
    let rhs = &vol_mb / rational::pow(&k1, d as u32);
    let delta = &rhs - &lhs;
    let threshold = threshold_k(d)?;
    let (convex_bound_holds, stability, stability_holds) = if k >= threshold {
        let c = rational::pow(&kk, d as u32) / (rational::int(k as i64 - d as i64 + 2) * rational::pow(&k1, d as u32 - 1));
        let bound = &c * &lhs + (Rational::one() - &c) * &v;
        let cst = stability_constant(d, k)?;
        let floor = rational::pow(&kk, d as u32) * &v - &cst * &delta;
        (rhs >= bound, Some(cst), Some(vol_m >= floor))
    } else {
        (true, None, None)
    };

    Ok(Lemma2Report {
        d,
        k,
        n,
        mu,
        lambda,
        capacities_hold,
        cells_hold: !cells_min_slack.is_negative(),
        cells_min_slack,
        layers,
        vol_m,
        vol_mb,
        volume_identities_hold,
        inequality_holds: rhs >= lhs,
        lhs,
        rhs,
        convex_bound_holds,
        delta,
        stability_constant: stability,
        stability_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::simplex_spider_volume;
    use crate::rational::{int, rat};
    use rand::{Rng, SeedableRng};

    #[test]
    fn weights_and_shell() {
        for d in 2..=5 {
            for t in 0..=8 {
                assert_eq!(weight_identities(d, t).unwrap(), (true, true));
            }
            for k in d as u64..=10 {
                let kd = rational::pow(&int(k as i64), d as u32);
                let fall = Rational::from_integer(falling_factorial(k, d as u64).into());
                assert_eq!(shell_volume(d, k).unwrap(), (kd - fall) * simplex_volume(d));
            }
        }
        assert_eq!(alpha(&[2, 1], &[1, 1]), Some(rat(2, 3)));
        assert_eq!(alpha(&[2, 1], &[2, 0]), Some(rat(1, 3)));
        assert_eq!(alpha(&[2, 1], &[0, 2]), None);
    }

    #[test]
    fn staircase_is_spider_sum() {
        // B[k] has volume binom(k, d).
        let s = staircase_cells(2, 4, 4).unwrap();
        assert_eq!(s.volume() / int(16), simplex_spider_volume(2, 4).unwrap());
        let s = staircase_cells(3, 4, 2).unwrap();
        assert_eq!(s.volume() / int(64), simplex_spider_volume(3, 4).unwrap());
    }

    #[test]
    fn staircase_itself() {
        let r = lemma2_check(2, 4, &staircase_cells(2, 4, 16).unwrap()).unwrap();
        assert!(r.all_hold(), "{r:?}");
        // M + B is B[5] exactly: vol 10 vs 6 before scaling.
        assert_eq!(r.vol_m, int(6));
        assert_eq!(r.vol_mb, int(10));
        assert_eq!(r.lhs, rat(3, 8));
        assert_eq!(r.rhs, rat(2, 5));
        // The boundary layers of B[k] and B[k+1] are empty.
        assert!(r.layers.iter().all(|l| l.slack.is_zero()));
    }

    #[test]
    fn full_simplex_is_nearly_tight() {
        let n = 16;
        let r = lemma2_check(2, 4, &simplex_cells(2, 4, n).unwrap()).unwrap();
        assert!(r.all_hold());
        // Both sides sit within one cell row of 1/2.
        assert!(r.delta < rat(2, n as i64));
        assert!(int(1) / int(2) - &r.lhs < rat(2, n as i64));
    }

    #[test]
    fn random_sandwiches_in_space() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            let p: f64 = rng.gen();
            let m = sandwich(3, 2, 6, |_| rng.gen_bool(p)).unwrap();
            let r = lemma2_check(3, 2, &m).unwrap();
            assert!(r.all_hold(), "{r:?}");
            assert!(r.stability_holds == Some(true));
        }
    }

    #[test]
    fn sandwich_violations() {
        let mut m = staircase_cells(2, 3, 4).unwrap();
        m.remove(&[0, 0]);
        assert!(matches!(lemma2_check(2, 3, &m), Err(Error::SandwichViolated(_))));
        let mut m = staircase_cells(2, 3, 4).unwrap();
        m.insert(&[11, 11]).unwrap();
        assert!(matches!(lemma2_check(2, 3, &m), Err(Error::SandwichViolated(_))));
    }
}
