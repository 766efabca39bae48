//! Audits of the monotonicity of `vol(A[k] / k)` and grid verifiers for the
//! lemmas behind it.

pub mod audit;
pub mod boundary_check;
pub mod convergence;
pub mod holes;
pub mod lemma2;
pub mod model;
pub mod planar;

pub use audit::{audit_model, audit_monotonicity, AuditEntry, AuditReport, EqualityFlags, Verdict};
pub use boundary_check::{boundary_diagnostics, boundary_lemma_check, ring_raster, BoundaryReport};
pub use convergence::{hausdorff_convergence, HausdorffPoint, HausdorffSeries};
pub use holes::{holes_audit, HolesReport};
pub use lemma2::{lemma2_check, sandwich, simplex_cells, staircase_cells, CellMassLayer, Lemma2Report};
pub use model::{Measured, Model};
pub use planar::{bite_check, BiteCheck, PlanarSet};
