use std::collections::HashSet;

use super::{RepairError, RepairReport};
use crate::model::{distance, CellId, StructuralModel};

/// Drop cells of length `<= tol` (including collapsed ones) and keep only the
/// lowest-id cell of every unordered endpoint pair.
pub fn remove_degenerate_cells(model: &mut StructuralModel, tol: f64) -> Result<RepairReport, RepairError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(RepairError::BadTolerance(tol));
    }
    let mut report = RepairReport::starting_from(model);
    let index = model.point_index();

    let mut order: Vec<usize> = (0..model.cells.len()).collect();
    order.sort_by_key(|&i| model.cells[i].id);

    let mut removed: HashSet<CellId> = HashSet::new();
    let mut seen = HashSet::new();
    for i in order {
        let cell = &model.cells[i];
        let [a, b] = cell.nodes;
        let length = match (index.get(&a), index.get(&b)) {
            (Some(&pa), Some(&pb)) => distance(&model.points[pa].coords, &model.points[pb].coords),
            // unresolved references are left for validation to report
            _ => f64::INFINITY,
        };
        if a == b || length <= tol {
            report.removed_degenerate_cells.push(cell.id);
            removed.insert(cell.id);
        } else if !seen.insert((a.min(b), a.max(b))) {
            report.removed_duplicate_cells.push(cell.id);
            removed.insert(cell.id);
        }
    }
    if !removed.is_empty() {
        model.cells.retain(|c| !removed.contains(&c.id));
    }
    Ok(report.finish())
}
