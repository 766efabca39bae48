//! Exact reproductions of counterexamples for measures other than volume
//! and for the three-set sum inequality.

pub mod boxes;
pub mod family;
pub mod measures;

pub use boxes::{box_union_volume, sum_unions, union_volume, AxisBox, MAX_BOXES};
pub use family::{conjecture2_gap, pairwise_sum_volumes, root_interval, BlockFamily, GapReport, SumVolumes};
pub use measures::{cube_measure_check, ellipse_measure_check, CubeMeasureReport, EllipseReport};
