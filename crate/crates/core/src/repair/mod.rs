//! Topology repair: duplicate merging, degenerate and duplicate cell removal,
//! detached-domain elimination, dead-arm pruning, support reachability and
//! rigid links.
//!
//! Every operation works in place and keeps the ids of surviving entities, so
//! the ids recorded in a [`RepairReport`] always refer to the input model.
//! An operation that fails leaves the model untouched.

mod cells;
mod components;
mod merge;
mod prune;
mod rigid;
mod support;
pub(crate) mod union_find;

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{CellId, PointId, StructuralModel};
use crate::validate::DEFAULT_MERGE_TOL;

pub use cells::remove_degenerate_cells;
pub use components::{component_labels, remove_detached_components, ComponentLabels};
pub use merge::merge_duplicate_nodes;
pub use prune::{prune_dead_arms, prune_dead_arms_with};
pub use rigid::{link_arm, make_rigid_link};
pub use support::{check_support_reachability, UnsupportedComponent};

#[derive(Debug, Error, PartialEq)]
pub enum RepairError {
    #[error("tolerance must be finite and non-negative, got {0}")]
    BadTolerance(f64),
    #[error("max_degree must be at least 1")]
    BadDegree,
    #[error("points {survivor} and {other} coincide but carry different loads ({first} and {second})")]
    LoadConflict {
        survivor: PointId,
        other: PointId,
        first: u32,
        second: u32,
    },
    #[error("pruning dead arms would remove every point of the model")]
    WouldEmpty,
    #[error("point {0} does not exist")]
    UnknownPoint(PointId),
    #[error("a rigid link needs two distinct points, got {0} twice")]
    SelfLink(PointId),
    #[error("point {0} is already the slave of a rigid link")]
    DuplicateSlave(PointId),
    #[error("linking {master} -> {slave} would chain rigid links")]
    CyclicLink { master: PointId, slave: PointId },
    #[error("rigid link offset must be finite")]
    NonFiniteOffset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedComponent {
    /// Lowest point id in the component.
    pub representative: PointId,
    pub points: usize,
    pub cells: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RepairReport {
    /// `(survivor, merged)` pairs.
    pub merged_point_pairs: Vec<(PointId, PointId)>,
    pub removed_degenerate_cells: Vec<CellId>,
    pub removed_duplicate_cells: Vec<CellId>,
    pub removed_components: Vec<RemovedComponent>,
    pub removed_component_cells: Vec<CellId>,
    pub pruned_arm_points: Vec<PointId>,
    pub pruned_cells: Vec<CellId>,
    /// Cell count of the model before the first recorded operation.
    pub initial_cells: usize,
    pub element_removal_fraction: f64,
}

impl RepairReport {
    pub(crate) fn starting_from(model: &StructuralModel) -> Self {
        RepairReport {
            initial_cells: model.cells.len(),
            ..Default::default()
        }
    }

    pub fn removed_cell_count(&self) -> usize {
        self.removed_degenerate_cells.len()
            + self.removed_duplicate_cells.len()
            + self.removed_component_cells.len()
            + self.pruned_cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merged_point_pairs.is_empty()
            && self.removed_cell_count() == 0
            && self.removed_components.is_empty()
            && self.pruned_arm_points.is_empty()
    }

    pub(crate) fn finish(mut self) -> Self {
        self.element_removal_fraction = if self.initial_cells == 0 {
            0.0
        } else {
            self.removed_cell_count() as f64 / self.initial_cells as f64
        };
        self
    }

    /// Append the records of a later step; `initial_cells` stays ours.
    pub fn absorb(&mut self, other: RepairReport) {
        self.merged_point_pairs.extend(other.merged_point_pairs);
        self.removed_degenerate_cells.extend(other.removed_degenerate_cells);
        self.removed_duplicate_cells.extend(other.removed_duplicate_cells);
        self.removed_components.extend(other.removed_components);
        self.removed_component_cells.extend(other.removed_component_cells);
        self.pruned_arm_points.extend(other.pruned_arm_points);
        self.pruned_cells.extend(other.pruned_cells);
        let initial = self.initial_cells;
        *self = std::mem::take(self).finish();
        self.initial_cells = initial;
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "merged point pairs:       {}", self.merged_point_pairs.len());
        for (s, m) in &self.merged_point_pairs {
            let _ = writeln!(out, "  point {m} merged into {s}");
        }
        let _ = writeln!(out, "degenerate cells removed: {}", self.removed_degenerate_cells.len());
        let _ = writeln!(out, "duplicate cells removed:  {}", self.removed_duplicate_cells.len());
        let _ = writeln!(out, "detached components:      {}", self.removed_components.len());
        for c in &self.removed_components {
            let _ = writeln!(
                out,
                "  component at point {}: {} points, {} cells",
                c.representative, c.points, c.cells
            );
        }
        let _ = writeln!(
            out,
            "dead-arm points pruned:   {} ({} cells)",
            self.pruned_arm_points.len(),
            self.pruned_cells.len()
        );
        let _ = writeln!(
            out,
            "element removal fraction: {:.6} ({} of {})",
            self.element_removal_fraction,
            self.removed_cell_count(),
            self.initial_cells
        );
        out
    }

    /// Flat `key=value` records, in a stable order.
    pub fn to_records(&self) -> Vec<(String, String)> {
        let join_cells = |v: &[CellId]| v.iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = vec![
            (
                "merged_point_pairs".to_string(),
                self.merged_point_pairs
                    .iter()
                    .map(|(s, m)| format!("{s}:{m}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            (
                "removed_degenerate_cells".to_string(),
                join_cells(&self.removed_degenerate_cells),
            ),
            (
                "removed_duplicate_cells".to_string(),
                join_cells(&self.removed_duplicate_cells),
            ),
            (
                "removed_components".to_string(),
                self.removed_components
                    .iter()
                    .map(|c| format!("{}:{}:{}", c.representative, c.points, c.cells))
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            (
                "pruned_arm_points".to_string(),
                self.pruned_arm_points
                    .iter()
                    .map(|p| p.0.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            ("pruned_cells".to_string(), join_cells(&self.pruned_cells)),
        ];
        out.push(("initial_cells".to_string(), self.initial_cells.to_string()));
        out.push(("removed_cells".to_string(), self.removed_cell_count().to_string()));
        out.push((
            "element_removal_fraction".to_string(),
            format!("{:?}", self.element_removal_fraction),
        ));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairConfig {
    pub merge_tol: f64,
    pub prune_degree: usize,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            merge_tol: DEFAULT_MERGE_TOL,
            prune_degree: 2,
        }
    }
}

/// Merge, drop degenerate cells, keep the main body, prune dead arms.
///
/// Pruning can strip every cell from a protected point at the tip of an arm,
/// leaving it isolated, so the detached-domain step runs once more at the
/// end; the result is then a fixpoint of the whole sequence.
pub fn repair_pipeline(model: &mut StructuralModel, config: &RepairConfig) -> Result<RepairReport, RepairError> {
    let mut work = model.clone();
    let mut report = RepairReport::starting_from(&work);
    report.absorb(merge_duplicate_nodes(&mut work, config.merge_tol)?);
    report.absorb(remove_degenerate_cells(&mut work, config.merge_tol)?);
    if !work.is_empty() {
        report.absorb(remove_detached_components(&mut work));
        report.absorb(prune_dead_arms(&mut work, config.prune_degree)?);
        report.absorb(remove_detached_components(&mut work));
    }
    *model = work;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, Point};

    #[test]
    fn fraction_accumulates_against_initial_count() {
        let mut m = StructuralModel::new();
        for i in 0..5 {
            m.points.push(Point::new(i, [i as f64, 0.0, 0.0]));
        }
        for i in 0..4 {
            m.cells.push(Cell::beam(i, i, i + 1, 1, 1));
        }
        let mut r = RepairReport::starting_from(&m);
        r.absorb(RepairReport {
            removed_degenerate_cells: vec![CellId(0)],
            ..Default::default()
        });
        r.absorb(RepairReport {
            pruned_cells: vec![CellId(3)],
            ..Default::default()
        });
        assert_eq!(r.initial_cells, 4);
        assert_eq!(r.element_removal_fraction, 0.5);
        assert!(r.to_text().contains("0.500000"));
    }
}
