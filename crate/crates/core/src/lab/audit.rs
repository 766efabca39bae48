//! Monotonicity audits of `vol(A[k] / k)`.
//!
//! Each `k` is measured on the first level of the resolution schedule; a
//! step `k - 1 -> k` whose grid comparison is inconclusive refines both
//! ends level by level. Exact routes, where a set kind has one, tighten the
//! grid brackets and are reported next to them.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::model::{Measured, Model};
use crate::error::{Error, Result};
use crate::grid::VolumeBound;
use crate::par;
use crate::rational::{self, Rational};
use crate::spec::{RunConfig, SetSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedNondecreasing,
    CertifiedViolation,
    Inconclusive,
}

impl Verdict {
    /// `next.lower >= prev.upper` certifies a non-decrease and
    /// `next.upper < prev.lower` a violation; overlap decides nothing.
    pub fn compare(prev: &VolumeBound, next: &VolumeBound) -> Self {
        if next.lower >= prev.upper {
            Self::CertifiedNondecreasing
        } else if next.upper < prev.lower {
            Self::CertifiedViolation
        } else {
            Self::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CertifiedNondecreasing => "certified-nondecreasing",
            Self::CertifiedViolation => "certified-violation",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub k: u64,
    /// Best bracket over all levels measured, tightened by `exact`.
    pub bound: Option<VolumeBound>,
    /// Best grid bracket alone.
    pub grid: Option<VolumeBound>,
    #[serde(with = "opt_rational")]
    pub exact: Option<Rational>,
    /// Against `k - 1`; absent for `k = 1`.
    pub verdict: Option<Verdict>,
    pub grid_verdict: Option<Verdict>,
    /// Finest spacing measured for this `k`.
    #[serde(with = "opt_rational")]
    pub spacing: Option<Rational>,
    pub level: usize,
    pub hausdorff: Option<f64>,
    pub hausdorff_slack: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualityFlags {
    /// `dim conv A < d`: every volume is zero.
    pub dim_deficient: bool,
    /// `vol(A[k] / k)` reaches `vol(conv A)` within twice the bracket width
    /// from `hull_reached_from` on.
    pub hull_reached: bool,
    pub hull_reached_from: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub kind: String,
    pub dim: usize,
    pub k_max: u64,
    #[serde(with = "opt_rational")]
    pub hull_volume: Option<Rational>,
    #[serde(with = "crate::rational::vec_str")]
    pub schedule: Vec<Rational>,
    pub entries: Vec<AuditEntry>,
    pub flags: EqualityFlags,
    /// Every grid bracket contained the exact value where both exist.
    pub consistent: bool,
}

pub(crate) mod opt_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{self, Rational};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&rational::format(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| rational::parse(&t).ok_or_else(|| serde::de::Error::custom(format!("bad rational {t:?}"))))
            .transpose()
    }
}

impl AuditReport {
    pub fn verdicts(&self) -> impl Iterator<Item = Verdict> + '_ {
        self.entries.iter().filter_map(|e| e.verdict)
    }

    pub fn has_violation(&self) -> bool {
        self.verdicts().any(|v| v == Verdict::CertifiedViolation)
    }

    /// Every step certified non-decreasing.
    pub fn all_certified(&self) -> bool {
        self.entries.len() >= 2 && self.verdicts().all(|v| v == Verdict::CertifiedNondecreasing)
            && self.verdicts().count() + 1 == self.entries.len()
    }

    /// No entry produced any bracket.
    pub fn infeasible(&self) -> bool {
        self.entries.iter().all(|e| e.bound.is_none())
    }

    /// The report with wall-clock fields zeroed, for determinism checks.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.seconds = 0.0;
        }
        out
    }

    /// Flat CSV: `k, lower, upper, verdict, hausdorff, seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lower,upper,verdict,hausdorff,seconds\n");
        for e in &self.entries {
            let (lo, hi) = match &e.bound {
                Some(b) => (format!("{:.12}", rational::to_f64(&b.lower)), format!("{:.12}", rational::to_f64(&b.upper))),
                None => (String::new(), String::new()),
            };
            let verdict = e.verdict.map(Verdict::as_str).unwrap_or("");
            let haus = e.hausdorff.map(|h| format!("{h:.6}")).unwrap_or_default();
            let _ = writeln!(out, "{},{lo},{hi},{verdict},{haus},{:.3}", e.k, e.seconds);
        }
        out
    }
}

/// Measurements of one `k`, one per level reached.
struct Track {
    exact: Option<Rational>,
    levels: Vec<Measured>,
    seconds: f64,
    error: Option<String>,
}

impl Track {
    fn best_grid(&self) -> Option<VolumeBound> {
        self.levels.iter().filter_map(|m| m.grid.clone()).reduce(|a, b| a.tighten(&b))
    }

    fn best(&self) -> Option<VolumeBound> {
        let exact = self.exact.clone().map(VolumeBound::exact);
        match (self.best_grid(), exact) {
            (Some(g), Some(e)) if g.contains(&e.lower) => Some(g.tighten(&e)),
            (_, Some(e)) => Some(e),
            (g, None) => g,
        }
    }
}

struct Auditor<'a> {
    model: &'a Model,
    config: &'a RunConfig,
    tracks: Vec<Track>,
}

impl Auditor<'_> {
    fn track(&mut self, k: u64) -> &mut Track {
        &mut self.tracks[k as usize - 1]
    }

    /// Measures `k` down to `level`; false once the schedule is exhausted or
    /// the level fails.
    fn ensure(&mut self, k: u64, level: usize) -> bool {
        let (model, config) = (self.model, self.config);
        let t = self.track(k);
        while t.levels.len() <= level {
            if t.error.is_some() || t.levels.len() >= config.resolutions.len() {
                return false;
            }
            let h = &config.resolutions[t.levels.len()];
            let start = Instant::now();
            let m = model.measure(k, h, config.cap, t.exact.as_ref());
            t.seconds += start.elapsed().as_secs_f64();
            match m {
                Ok(m) => t.levels.push(m),
                Err(e) => {
                    t.error = Some(e.to_string());
                    return false;
                }
            }
        }
        true
    }

    fn grid_verdict(&self, k: u64) -> Option<Verdict> {
        let prev = self.tracks[k as usize - 2].best_grid()?;
        let next = self.tracks[k as usize - 1].best_grid()?;
        Some(Verdict::compare(&prev, &next))
    }

    /// Refines the step `k - 1 -> k` while its grid verdict is open.
    fn refine(&mut self, k: u64) {
        if !self.model.has_grid_route() {
            return;
        }
        let exact_tie = match (&self.tracks[k as usize - 2].exact, &self.tracks[k as usize - 1].exact) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        let mut level = 1;
        while !exact_tie && self.grid_verdict(k) == Some(Verdict::Inconclusive) {
            if !self.ensure(k - 1, level) | !self.ensure(k, level) {
                break;
            }
            level += 1;
        }
    }
}

/// Audits `vol(A[k] / k)` for `k = 1..=k_max`.
pub fn audit_monotonicity(spec: &SetSpec, config: &RunConfig) -> Result<AuditReport> {
    spec.require_volume_semantics()?;
    config.validate()?;
    let model = Model::from_spec(spec)?;
    audit_model(&model, spec.kind(), config)
}

pub fn audit_model(model: &Model, kind: &str, config: &RunConfig) -> Result<AuditReport> {
    config.validate()?;
    let k_max = config.k_max;
    // Level 0 of every k, exact values and Hausdorff distances are
    // independent tasks.
    let first: Vec<(Track, Option<(f64, f64)>)> = par::map_range(k_max as usize, |i| {
        let k = i as u64 + 1;
        let start = Instant::now();
        let (exact, mut error) = match model.exact(k) {
            Ok(e) => (e, None),
            Err(e) => (None, Some(e.to_string())),
        };
        let mut levels = Vec::new();
        match model.measure(k, &config.resolutions[0], config.cap, exact.as_ref()) {
            Ok(m) => levels.push(m),
            Err(e) => error = error.or(Some(e.to_string())),
        }
        let haus = if config.hausdorff {
            model.hausdorff(k, &config.resolutions[0], config.cap, config.tol).ok().flatten()
        } else {
            None
        };
        let seconds = start.elapsed().as_secs_f64();
        (Track { exact, levels, seconds, error }, haus)
    });
    let (tracks, haus): (Vec<Track>, Vec<Option<(f64, f64)>>) = first.into_iter().unzip();
    let mut auditor = Auditor { model, config, tracks };
    for k in 2..=k_max {
        auditor.refine(k);
    }

    let mut consistent = true;
    let mut entries = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let t = &auditor.tracks[k as usize - 1];
        if let Some(e) = &t.exact {
            consistent &= t.levels.iter().filter_map(|m| m.grid.as_ref()).all(|g| g.contains(e));
        }
        let bound = t.best();
        let verdict = if k == 1 {
            None
        } else {
            match (auditor.tracks[k as usize - 2].best(), &bound) {
                (Some(p), Some(n)) => Some(Verdict::compare(&p, n)),
                _ => Some(Verdict::Inconclusive),
            }
        };
        let level = t.levels.len().saturating_sub(1);
        entries.push(AuditEntry {
            k,
            bound,
            grid: t.best_grid(),
            exact: t.exact.clone(),
            verdict,
            grid_verdict: if k == 1 { None } else { auditor.grid_verdict(k) },
            spacing: t.levels.iter().any(|m| m.grid.is_some()).then(|| config.resolutions[level].clone()),
            level,
            hausdorff: haus[k as usize - 1].map(|h| h.0),
            hausdorff_slack: haus[k as usize - 1].map(|h| h.1),
            seconds: t.seconds,
            error: t.error.clone(),
        });
    }

    let hull_volume = model.hull_volume();
    let hull_reached_from = hull_volume.as_ref().and_then(|v| {
        let reached = |e: &AuditEntry| e.bound.as_ref().is_some_and(|b| v - &b.lower <= b.width() * rational::int(2));
        let tail = entries.iter().rev().take_while(|e| reached(e)).count();
        (tail > 0).then(|| k_max - tail as u64 + 1)
    });
    let flags = EqualityFlags {
        dim_deficient: model.is_dim_deficient(),
        hull_reached: hull_reached_from.is_some(),
        hull_reached_from,
    };
    if entries.iter().all(|e| e.bound.is_none()) {
        let reason = entries.iter().find_map(|e| e.error.clone()).unwrap_or_default();
        return Err(Error::Unsupported(format!("no k could be measured: {reason}")));
    }
    Ok(AuditReport {
        kind: kind.to_string(),
        dim: model.dim(),
        k_max,
        hull_volume,
        schedule: config.resolutions.clone(),
        entries,
        flags,
        consistent,
    })
}
