//! Audits of planar sets with convex bites removed.

use serde::{Deserialize, Serialize};

use super::audit::{audit_model, AuditReport};
use super::model::Model;
use super::planar::{bite_check, BiteCheck};
use crate::error::{Error, Result};
use crate::spec::{RunConfig, SetSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolesReport {
    pub audit: AuditReport,
    pub boundary_bites: Vec<usize>,
    /// `area(M / k) <= area((M + gamma) / (k + 1))` per boundary bite and
    /// `k = 2..k_max`.
    pub bite_checks: Vec<BiteCheck>,
}

impl HolesReport {
    pub fn bites_hold(&self) -> bool {
        self.bite_checks.iter().all(|b| b.holds)
    }
}

pub fn holes_audit(spec: &SetSpec, config: &RunConfig) -> Result<HolesReport> {
    spec.require_volume_semantics()?;
    let model = Model::from_spec(spec)?;
    let Model::Planar(set) = &model else {
        return Err(Error::Unsupported(format!("holes audit needs a planar-holes set, got {}", spec.kind())));
    };
    let audit = audit_model(&model, spec.kind(), config)?;
    let boundary_bites = set.boundary_bites();
    let mut bite_checks = Vec::new();
    for &b in &boundary_bites {
        for k in 2..=config.k_max {
            bite_checks.push(bite_check(set, b, k)?);
        }
    }
    Ok(HolesReport { audit, boundary_bites, bite_checks })
}
